#pragma once

#include <optional>

#include "linksim/sigkit.hpp"

namespace linksim::vcsel {

/// Behavioral parameters of the 1550 nm single-mode VCSEL.
struct VcselParams {
    double i_th = 1.5e-3;        // A, threshold
    double i_rollover = 8.0e-3;  // A, static L-I peak
    double p_max = 4.0e-3;       // W at rollover
    double alpha_h = 12.0;       // linewidth enhancement factor
    double kappa = 0.0;          // adiabatic chirp, rad*Hz/W
    double f_r7 = 0.0;           // relaxation-oscillation freq at 7 mA, Hz (calibrated)
    double k_damping = 2.5e-10;  // gamma_d = k_damping * f_r^2 + gamma0
    double gamma0 = 5e9;         // Hz
    double f_p = 28e9;           // parasitic pole, Hz
    double bias = 7.8e-3;        // A
    double wavelength = 1550e-9; // m
    double r_drive = 100.0;      // ohm; 700 mVpp -> +-3.5 mA, floor above i_th,
                                 // peaks ride the athermal L-I past rollover
    // Optional level-dependent rise/fall skew time constant (s); off by default.
    std::optional<double> skew_tau;

    /// f_r at a given bias: f_r7 * sqrt((bias - i_th) / (7 mA - i_th)).
    double f_r(double bias_amps) const;
    double gamma_d(double bias_amps) const;

    /// Defaults with f_r7 calibrated so the small-signal 3 dB bandwidth
    /// at 7 mA bias is 20 GHz.
    static VcselParams calibrated_default();
};

/// Static L-I-V. Power is a parabola in (i - i_rollover) above
/// threshold, zero below; voltage from a monotone piecewise table.
struct LivPoint {
    double power_w;
    double voltage_v;
};
LivPoint static_liv(const VcselParams& params, double current_a);

/// Two-pole small-signal modulation response with a parasitic pole,
/// normalized to unity at DC.
sigkit::FrequencyResponse small_signal_s21(const VcselParams& params, double bias_a,
                                           double f_max = 46e9, size_t n_points = 2048);

struct ModulationResult {
    sigkit::OpticalField field;
    double clip_fraction = 0.0;  // fraction of samples clipped at p = 0
};

/// Drive waveform (volts) to optical field: dynamic intensity via the
/// S21 response and the local L-I slope at bias, chirp phase from
/// dphi/dt = (alpha/2) * (dp/dt / p + kappa * p), mean frequency removed.
ModulationResult modulate(const VcselParams& params, const sigkit::Waveform& drive,
                          double bias_a);

/// Small-signal end-to-end magnitude response (modulate -> dispersion ->
/// square-law detect), measured with a low-amplitude multitone probe on
/// a uniform grid. Returned gains are normalized to the lowest tone.
sigkit::FrequencyResponse end_to_end_response(const VcselParams& params,
                                              double d_total_ps_nm,
                                              double f_lo, double f_hi, double f_step,
                                              double sim_rate = 368e9);

/// First local minimum of |response| at least min_depth_db below the
/// surrounding level, with parabolic interpolation. Returns 0 if none;
/// depth_db (if given) receives the notch depth re the local level.
double first_null_hz(const sigkit::FrequencyResponse& h, double min_depth_db = 6.0,
                     double* depth_db = nullptr);

/// Bisect kappa so that the simulated end-to-end first null lands on
/// target_notch (within 2%). Throws with the bracket endpoints when no
/// kappa in the bracket achieves the target, and reports insensitivity
/// when alpha_h == 0.
double calibrate_kappa(const VcselParams& params, double target_notch_hz,
                       double d_total_ps_nm, double wavelength_m);

}  // namespace linksim::vcsel
