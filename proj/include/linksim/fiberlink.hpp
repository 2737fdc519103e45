#pragma once

#include <cstdint>
#include <vector>

#include "linksim/sigkit.hpp"

namespace linksim::fiberlink {

/// 7-core multicore fiber link parameters.
struct McfParams {
    int n_cores = 7;
    double dispersion_ps_nm_km = 17.1;
    double length_m = 1000.0;
    double attenuation_db_km = 0.2;
    double xt_per_100km_db = -45.0;
    double fanio_loss_db = 1.5;       // per module, two modules per link
    double fanio_xt_db = -50.0;
    double ripple_max_db = 0.75;      // per-core electrical-equivalent ripple
    uint64_t variation_seed = 1;
    double dcm_ps_nm = 0.0;           // 0 or -159
    bool fan_modules = true;
    bool crosstalk_enabled = true;

    void validate() const;
    /// Total accumulated dispersion, ps/nm, including the DCM.
    double total_dispersion_ps_nm() const
    {
        return dispersion_ps_nm_km * length_m / 1000.0 + dcm_ps_nm;
    }
};

/// All-pass chromatic dispersion operator H(f) = exp(+j theta(f)),
/// theta = pi lambda^2 D_total f^2 / c, on the FFT grid of an n-sample
/// frame at sim_rate. Positive D delays longer wavelengths; the sign is
/// fixed so that positive chirp lowers the first fading notch.
sigkit::FrequencyResponse dispersion_response(double d_total_ps_nm, double wavelength_m,
                                              const std::vector<double>& freqs);

/// Convenience: dispersion response on the full FFT grid of a field.
sigkit::OpticalField apply_dispersion(const sigkit::OpticalField& field,
                                      double d_total_ps_nm);

/// Closed-form first power-fading null for transient chirp:
/// f = sqrt(theta* c / (pi lambda^2 D)), theta* = arctan(1/alpha_h)
/// (pi/2 when alpha_h = 0).
double predict_notch(double alpha_h, double d_total_ps_nm, double wavelength_m);

/// Low-order per-core ripple on the electrical-equivalent response,
/// two cosine terms over [0, 35 GHz], peak ripple_max_db, seeded per core.
sigkit::FrequencyResponse core_ripple(const McfParams& params, int core_idx,
                                      double f_max, size_t n_points = 1024);

/// Fan-in loss, per-core ripple, dispersion (+DCM), attenuation,
/// fan-out loss, in that order.
sigkit::OpticalField propagate_core(const sigkit::OpticalField& field,
                                    const McfParams& params, int core_idx);

/// Lumped inter-core crosstalk with hex adjacency (core 0 center).
/// Per-pair phases derive from the seed.
std::vector<sigkit::OpticalField> add_crosstalk(const std::vector<sigkit::OpticalField>& fields,
                                                const McfParams& params, uint64_t seed);

}  // namespace linksim::fiberlink
