#include "linksim/fiberlink.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linksim/fft.hpp"
#include "linksim/rng.hpp"

namespace linksim::fiberlink {

namespace {

constexpr double kPsNmToSm = 1e-12 / 1e-9;  // ps/nm -> s/m

double dispersion_theta(double d_total_ps_nm, double wavelength_m, double f)
{
    const double d_si = d_total_ps_nm * kPsNmToSm;
    return std::numbers::pi * wavelength_m * wavelength_m * d_si * f * f /
           sigkit::kSpeedOfLight;
}

double db_to_field(double db) { return std::pow(10.0, -db / 20.0); }

}  // namespace

void McfParams::validate() const
{
    if (n_cores < 1)
        throw std::invalid_argument("McfParams: n_cores must be >= 1");
    if (dispersion_ps_nm_km <= 0.0)
        throw std::invalid_argument("McfParams: dispersion must be > 0");
    if (length_m < 0.0)
        throw std::invalid_argument("McfParams: length must be >= 0");
    if (attenuation_db_km < 0.0)
        throw std::invalid_argument("McfParams: attenuation must be >= 0");
    if (ripple_max_db < 0.0)
        throw std::invalid_argument("McfParams: ripple must be >= 0");
    if (xt_per_100km_db >= 0.0 || fanio_xt_db >= 0.0)
        throw std::invalid_argument("McfParams: crosstalk values must be < 0 dB");
}

sigkit::FrequencyResponse dispersion_response(double d_total_ps_nm, double wavelength_m,
                                              const std::vector<double>& freqs)
{
    std::vector<std::complex<double>> gains(freqs.size());
    for (size_t i = 0; i < freqs.size(); ++i) {
        const double th = dispersion_theta(d_total_ps_nm, wavelength_m, freqs[i]);
        gains[i] = std::polar(1.0, th);
    }
    return sigkit::FrequencyResponse(freqs, std::move(gains));
}

sigkit::OpticalField apply_dispersion(const sigkit::OpticalField& field,
                                      double d_total_ps_nm)
{
    // Applied directly on the FFT grid; exact all-pass, no interpolation.
    auto spec = fft::fft(field.samples);
    const size_t n = field.size();
    for (size_t k = 0; k < n; ++k) {
        const double f = fft::bin_freq(k, n, field.sample_rate);
        const double th = dispersion_theta(d_total_ps_nm, field.wavelength, f);
        spec[k] *= std::polar(1.0, th);
    }
    return sigkit::OpticalField(fft::ifft(spec), field.sample_rate, field.wavelength);
}

double predict_notch(double alpha_h, double d_total_ps_nm, double wavelength_m)
{
    if (d_total_ps_nm <= 0.0)
        throw std::invalid_argument("predict_notch: non-positive dispersion");
    const double theta_star = alpha_h == 0.0 ? std::numbers::pi / 2.0
                                             : std::atan(1.0 / alpha_h);
    const double d_si = d_total_ps_nm * kPsNmToSm;
    return std::sqrt(theta_star * sigkit::kSpeedOfLight /
                     (std::numbers::pi * wavelength_m * wavelength_m * d_si));
}

sigkit::FrequencyResponse core_ripple(const McfParams& params, int core_idx,
                                      double f_max, size_t n_points)
{
    auto eng = rng::engine(rng::derive(params.variation_seed, 0x5e11, core_idx));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // Two cosine terms over [0, 35 GHz]; amplitudes sum to ripple_max_db
    // on the electrical-equivalent (power) response.
    const double a1 = params.ripple_max_db * (0.4 + 0.3 * uni(eng));
    const double a2 = params.ripple_max_db - a1;
    const double span = 35e9;
    const double k1 = (1.0 + uni(eng)) * std::numbers::pi / span;   // 0.5..1 period over span
    const double k2 = (2.0 + 2.0 * uni(eng)) * std::numbers::pi / span;
    const double p1 = 2.0 * std::numbers::pi * uni(eng);
    const double p2 = 2.0 * std::numbers::pi * uni(eng);

    std::vector<double> freqs(n_points);
    std::vector<std::complex<double>> gains(n_points);
    for (size_t i = 0; i < n_points; ++i) {
        const double f = -f_max + 2.0 * f_max * static_cast<double>(i) /
                                      static_cast<double>(n_points - 1);
        freqs[i] = f;
        const double af = std::abs(f);
        const double el_db = a1 * std::cos(k1 * af + p1) + a2 * std::cos(k2 * af + p2);
        // Electrical dB halves on the optical field.
        gains[i] = std::pow(10.0, el_db / 40.0);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

sigkit::OpticalField propagate_core(const sigkit::OpticalField& field,
                                    const McfParams& params, int core_idx)
{
    params.validate();
    if (core_idx < 0 || core_idx >= params.n_cores)
        throw std::invalid_argument("propagate_core: invalid core index");

    sigkit::OpticalField out = field;
    const double fan = params.fan_modules ? db_to_field(params.fanio_loss_db) : 1.0;

    auto scale = [](sigkit::OpticalField& x, double g) {
        for (auto& v : x.samples)
            v *= g;
    };

    scale(out, fan);  // fan-in
    // Core-to-core ripple is attributed to the fan-in/fan-out devices.
    if (params.fan_modules && params.ripple_max_db > 0.0) {
        auto rip = core_ripple(params, core_idx, field.sample_rate / 2.0);
        out = sigkit::apply_frequency_response(out, rip);
    }
    if (params.total_dispersion_ps_nm() != 0.0)
        out = apply_dispersion(out, params.total_dispersion_ps_nm());
    scale(out, db_to_field(params.attenuation_db_km * params.length_m / 1000.0));
    scale(out, fan);  // fan-out
    return out;
}

std::vector<sigkit::OpticalField> add_crosstalk(const std::vector<sigkit::OpticalField>& fields,
                                                const McfParams& params, uint64_t seed)
{
    params.validate();
    if (fields.empty())
        return {};
    const size_t n = fields.front().size();
    for (const auto& f : fields)
        if (f.size() != n || f.sample_rate != fields.front().sample_rate)
            throw std::invalid_argument("add_crosstalk: grid mismatch across cores");

    if (!params.crosstalk_enabled)
        return fields;

    // Distance-scaled fiber coupling only. The fan modules' isolation figure
    // (fanio_xt_db) is leakage into terminated ports, not core-to-core
    // coupling, so it does not enter this sum.
    const double len_100km = params.length_m / 100e3;
    double xt_lin = std::pow(10.0, params.xt_per_100km_db / 10.0) * len_100km;
    if (xt_lin <= 0.0)
        return fields;
    const double kappa_mag = std::sqrt(xt_lin);

    // Hex adjacency: core 0 center; outer cores 1..6 in a ring.
    const int nc = static_cast<int>(fields.size());
    auto adjacent = [nc](int a, int b) {
        if (a == b)
            return false;
        if (a == 0 || b == 0)
            return true;
        const int d = std::abs(a - b);
        return d == 1 || d == nc - 2;  // ring neighbors among 1..6
    };

    std::vector<sigkit::OpticalField> out = fields;
    for (int k = 0; k < nc; ++k) {
        for (int j = 0; j < nc; ++j) {
            if (!adjacent(k, j))
                continue;
            const int lo = std::min(k, j), hi = std::max(k, j);
            auto eng = rng::engine(rng::derive(seed, 0xc057, lo, hi));
            std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
            const auto kappa = std::polar(kappa_mag, uni(eng));
            for (size_t i = 0; i < n; ++i)
                out[k].samples[i] += kappa * fields[j].samples[i];
        }
    }
    return out;
}

}  // namespace linksim::fiberlink
