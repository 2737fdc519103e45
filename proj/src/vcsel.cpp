#include "linksim/vcsel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "linksim/fft.hpp"
#include "linksim/fiberlink.hpp"
#include "linksim/rng.hpp"

namespace linksim::vcsel {

namespace {

std::complex<double> s21_gain(double f, double f_r, double gamma_d, double f_p)
{
    const std::complex<double> den(f_r * f_r - f * f, f * gamma_d / (2.0 * std::numbers::pi));
    const std::complex<double> parasitic(1.0, f / f_p);
    return (f_r * f_r / den) / parasitic;
}

}  // namespace

double VcselParams::f_r(double bias_amps) const
{
    if (bias_amps <= i_th)
        throw std::invalid_argument("VcselParams::f_r: bias at/below threshold");
    return f_r7 * std::sqrt((bias_amps - i_th) / (7e-3 - i_th));
}

double VcselParams::gamma_d(double bias_amps) const
{
    const double fr = f_r(bias_amps);
    return k_damping * fr * fr + gamma0;
}

VcselParams VcselParams::calibrated_default()
{
    VcselParams p;
    // Fit f_r7 so |H(20 GHz)| = -3 dB at 7 mA bias.
    const double target = 1.0 / std::sqrt(2.0);
    double lo = 5e9, hi = 80e9;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gd = p.k_damping * mid * mid + p.gamma0;
        const double mag = std::abs(s21_gain(20e9, mid, gd, p.f_p));
        (mag < target ? lo : hi) = mid;
    }
    p.f_r7 = 0.5 * (lo + hi);
    return p;
}

LivPoint static_liv(const VcselParams& params, double current_a)
{
    if (current_a < 0.0)
        throw std::invalid_argument("static_liv: negative current");
    double power = 0.0;
    if (current_a > params.i_th) {
        const double u = (current_a - params.i_rollover) / (params.i_rollover - params.i_th);
        power = params.p_max * (1.0 - u * u);
        power = std::max(power, 0.0);
    }
    // Diode-like V(I): series resistance plus a log turn-on.
    const double v = 0.85 + 60.0 * current_a + 0.045 * std::log1p(current_a / 1e-4);
    return {power, v};
}

sigkit::FrequencyResponse small_signal_s21(const VcselParams& params, double bias_a,
                                           double f_max, size_t n_points)
{
    if (bias_a <= params.i_th || bias_a > params.i_rollover)
        throw std::invalid_argument("small_signal_s21: bias outside (i_th, i_rollover]");
    const double fr = params.f_r(bias_a);
    const double gd = params.gamma_d(bias_a);
    std::vector<double> freqs(n_points);
    std::vector<std::complex<double>> gains(n_points);
    for (size_t i = 0; i < n_points; ++i) {
        freqs[i] = f_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        gains[i] = s21_gain(freqs[i], fr, gd, params.f_p);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

ModulationResult modulate(const VcselParams& params, const sigkit::Waveform& drive,
                          double bias_a)
{
    if (bias_a <= params.i_th || bias_a > params.i_rollover)
        throw std::invalid_argument("modulate: bias outside (i_th, i_rollover]");

    const size_t n = drive.size();
    const double fs = drive.sample_rate;
    const double fr = params.f_r(bias_a);
    const double gd = params.gamma_d(bias_a);

    // Current deviation through the exact dynamic response, bin by bin.
    std::vector<double> di(n);
    for (size_t i = 0; i < n; ++i)
        di[i] = drive.samples[i] / params.r_drive;
    auto spec = fft::rfft(di);
    for (size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        spec[k] *= s21_gain(f, fr, gd, params.f_p);
    }
    auto di_f = fft::irfft(spec, n);

    // Dynamic intensity: thermal rollover only droops the slow (CW)
    // operating point; fast modulation rides the athermal L-I slope,
    // the chord from threshold to the rollover peak.
    const double p_bias = static_liv(params, bias_a).power_w;
    const double slope = params.p_max / (params.i_rollover - params.i_th);
    std::vector<double> p(n);
    size_t clipped = 0;
    for (size_t i = 0; i < n; ++i) {
        p[i] = p_bias + slope * di_f[i];
        if (p[i] < 0.0) {
            p[i] = 0.0;
            ++clipped;
        }
    }

    // Optional level-dependent rise/fall skew (first-order, tau scaled
    // by the instantaneous level).
    if (params.skew_tau) {
        const double tau0 = *params.skew_tau;
        double y = p[0];
        std::vector<double> sk(n);
        for (size_t pass = 0; pass < 2; ++pass) {  // two passes settle the circular seam
            for (size_t i = 0; i < n; ++i) {
                const double level = p[i] / std::max(p_bias, 1e-15);
                const double tau = tau0 * (0.5 + level);
                const double a = 1.0 - std::exp(-1.0 / (fs * tau));
                y += a * (p[i] - y);
                sk[i] = y;
            }
        }
        p = std::move(sk);
    }

    // Chirp: dphi/dt = (alpha/2) (p'/p + kappa p), mean rate removed.
    const double dt = 1.0 / fs;
    const double p_floor = 1e-9 * std::max(p_bias, params.p_max);
    std::vector<double> rate(n);
    for (size_t i = 0; i < n; ++i) {
        const double pm = p[(i + n - 1) % n];
        const double pp = p[(i + 1) % n];
        const double dpdt = (pp - pm) * fs / 2.0;
        rate[i] = 0.5 * params.alpha_h *
                  (dpdt / std::max(p[i], p_floor) + params.kappa * p[i]);
    }
    double mean_rate = 0.0;
    for (double r : rate)
        mean_rate += r;
    mean_rate /= static_cast<double>(n);

    std::vector<std::complex<double>> field(n);
    double phi = 0.0;
    for (size_t i = 0; i < n; ++i) {
        field[i] = std::polar(std::sqrt(p[i]), phi);
        phi += (rate[i] - mean_rate) * dt;
    }

    ModulationResult result{
        sigkit::OpticalField(std::move(field), fs, params.wavelength),
        static_cast<double>(clipped) / static_cast<double>(n)};
    return result;
}

sigkit::FrequencyResponse end_to_end_response(const VcselParams& params,
                                              double d_total_ps_nm,
                                              double f_lo, double f_hi, double f_step,
                                              double sim_rate)
{
    const double duration = 1.0 / f_step;
    const auto n = static_cast<size_t>(std::llround(sim_rate * duration));

    // Tone bins on the probe grid.
    std::vector<size_t> bins;
    for (double f = f_lo; f <= f_hi + 1e-3; f += f_step) {
        const auto k = static_cast<size_t>(std::llround(f * duration));
        if (k >= 1 && k < n / 2)
            bins.push_back(k);
    }
    if (bins.size() < 8)
        throw std::invalid_argument("end_to_end_response: probe grid too small");

    // Probe amplitude: ~1e-4 relative intensity modulation per tone.
    const double p_bias = static_liv(params, params.bias).power_w;
    const double slope = params.p_max / (params.i_rollover - params.i_th);
    const double amp = 1e-4 * p_bias * params.r_drive / slope;

    auto eng = rng::engine(0x9e0be5u);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(bins.size());
    for (auto& ph : phases)
        ph = uni(eng);

    std::vector<double> drive(n, 0.0);
    for (size_t j = 0; j < bins.size(); ++j) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(bins[j]) / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i)
            drive[i] += amp * std::cos(w * static_cast<double>(i) + phases[j]);
    }

    auto mod = modulate(params, sigkit::Waveform(std::move(drive), sim_rate), params.bias);
    auto field = d_total_ps_nm != 0.0
                     ? fiberlink::apply_dispersion(mod.field, d_total_ps_nm)
                     : mod.field;

    std::vector<double> photocurrent(n);
    for (size_t i = 0; i < n; ++i)
        photocurrent[i] = std::norm(field.samples[i]);
    auto spec = fft::rfft(photocurrent);

    std::vector<double> freqs(bins.size());
    std::vector<std::complex<double>> gains(bins.size());
    const double norm = std::abs(spec[bins[0]]);
    for (size_t j = 0; j < bins.size(); ++j) {
        freqs[j] = static_cast<double>(bins[j]) / duration;
        gains[j] = spec[bins[j]] / norm * std::polar(1.0, -phases[j]);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

double first_null_hz(const sigkit::FrequencyResponse& h, double min_depth_db,
                     double* depth_out)
{
    const size_t n = h.size();
    std::vector<double> mag(n);
    for (size_t i = 0; i < n; ++i)
        mag[i] = std::abs(h.gains[i]);

    const size_t window = std::max<size_t>(8, n / 32);
    for (size_t i = 1; i + 1 < n; ++i) {
        if (!(mag[i] <= mag[i - 1] && mag[i] < mag[i + 1]))
            continue;
        double ref = 0.0;
        const size_t lo = i > window ? i - window : 0;
        const size_t hi = std::min(n - 1, i + window);
        for (size_t k = lo; k <= hi; ++k)
            ref = std::max(ref, mag[k]);
        if (ref <= 0.0)
            continue;
        const double depth_db = -20.0 * std::log10(std::max(mag[i] / ref, 1e-30));
        if (depth_db < min_depth_db)
            continue;
        // Parabolic vertex on |H|^2 (quadratic near a true null).
        const double y0 = mag[i - 1] * mag[i - 1];
        const double y1 = mag[i] * mag[i];
        const double y2 = mag[i + 1] * mag[i + 1];
        const double den = y0 - 2.0 * y1 + y2;
        double delta = 0.0;
        if (den > 0.0)
            delta = 0.5 * (y0 - y2) / den;
        delta = std::clamp(delta, -0.5, 0.5);
        const double df = (h.freqs[i + 1] - h.freqs[i - 1]) / 2.0;
        if (depth_out)
            *depth_out = depth_db;
        return h.freqs[i] + delta * df;
    }
    return 0.0;
}

double calibrate_kappa(const VcselParams& params, double target_notch_hz,
                       double d_total_ps_nm, double wavelength_m)
{
    VcselParams p = params;
    p.wavelength = wavelength_m;

    const double transient_null = fiberlink::predict_notch(p.alpha_h, d_total_ps_nm,
                                                           wavelength_m);
    if (target_notch_hz <= transient_null)
        throw std::invalid_argument(
            "calibrate_kappa: target must lie above the transient-only prediction");

    auto null_at = [&](double kappa) {
        p.kappa = kappa;
        auto h = end_to_end_response(p, d_total_ps_nm, 1e9,
                                     std::min(2.5 * target_notch_hz, 150e9), 100e6);
        const double f0 = first_null_hz(h);
        return f0 > 0.0 ? f0 : std::numeric_limits<double>::infinity();
    };

    const double kappa_hi_limit = 1e16;
    if (p.alpha_h == 0.0) {
        const double f_a = null_at(0.0);
        const double f_b = null_at(kappa_hi_limit / 1e3);
        if (std::abs(f_a - f_b) < 1e-3 * std::max(f_a, f_b))
            throw std::runtime_error(
                "calibrate_kappa: insensitive - alpha_h = 0 scales the whole chirp term to zero");
    }

    double lo = 0.0, hi = kappa_hi_limit;
    const double f_lo = null_at(lo);
    const double f_hi = null_at(hi);
    const bool lo_below = f_lo < target_notch_hz;
    const bool hi_below = f_hi < target_notch_hz;
    if (lo_below == hi_below) {
        std::ostringstream msg;
        msg << "calibrate_kappa: no kappa in [" << lo << ", " << hi
            << "] rad*Hz/W reaches " << target_notch_hz / 1e9
            << " GHz (nulls at bracket: " << f_lo / 1e9 << " GHz, "
            << f_hi / 1e9 << " GHz)";
        throw std::runtime_error(msg.str());
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool mid_below = null_at(mid) < target_notch_hz;
        (mid_below == lo_below ? lo : hi) = mid;
    }
    const double kappa = 0.5 * (lo + hi);
    const double achieved = null_at(kappa);
    if (std::abs(achieved - target_notch_hz) > 0.02 * target_notch_hz) {
        std::ostringstream msg;
        msg << "calibrate_kappa: bisection bracket [" << lo << ", " << hi
            << "] converged to a discontinuity; achieved first null "
            << achieved / 1e9 << " GHz vs target " << target_notch_hz / 1e9 << " GHz";
        throw std::runtime_error(msg.str());
    }
    return kappa;
}

}  // namespace linksim::vcsel
