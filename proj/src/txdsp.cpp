#include "linksim/txdsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linksim/fft.hpp"
#include "linksim/filters.hpp"

namespace linksim::txdsp {

void TxConfig::validate() const
{
    if (rolloff < 0.0 || rolloff > 1.0)
        throw std::invalid_argument("TxConfig: rolloff outside [0,1]");
    if (baud * (1.0 + rolloff) / 2.0 >= dac_rate / 2.0)
        throw std::invalid_argument("TxConfig: signal band exceeds DAC Nyquist");
    if (dac_bits < 1)
        throw std::invalid_argument("TxConfig: dac_bits must be >= 1");
    if (drive_vpp <= 0.0)
        throw std::invalid_argument("TxConfig: drive_vpp must be > 0");
    if (clip_quantile <= 0.0 || clip_quantile > 1.0)
        throw std::invalid_argument("TxConfig: clip_quantile outside (0,1]");
    if (sps < 2)
        throw std::invalid_argument("TxConfig: sps must be >= 2");
}

std::vector<uint8_t> prbs15(uint16_t seed, size_t n)
{
    uint16_t state = seed & 0x7fff;
    if (state == 0)
        throw std::invalid_argument("prbs15: zero seed has a degenerate all-zero orbit");
    std::vector<uint8_t> out(n);
    for (size_t i = 0; i < n; ++i) {
        // Feedback from taps 15 and 14 (1-indexed).
        const uint16_t fb = ((state >> 14) ^ (state >> 13)) & 1;
        out[i] = static_cast<uint8_t>((state >> 14) & 1);
        state = static_cast<uint16_t>(((state << 1) | fb) & 0x7fff);
    }
    return out;
}

std::vector<double> map_pam4(const std::vector<uint8_t>& bits)
{
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("map_pam4: odd bit count");
    std::vector<double> out(bits.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        const int msb = bits[2 * i] & 1;
        const int lsb = bits[2 * i + 1] & 1;
        // Gray: 00 01 11 10 -> -3 -1 +1 +3
        static const double lut[4] = {-3.0, -1.0, +3.0, +1.0};  // index = msb<<1|lsb
        out[i] = lut[(msb << 1) | lsb];
    }
    return out;
}

std::vector<uint8_t> demap_pam4(const std::vector<double>& symbols)
{
    std::vector<uint8_t> out(symbols.size() * 2);
    for (size_t i = 0; i < symbols.size(); ++i) {
        const double s = symbols[i];
        uint8_t msb, lsb;
        if (s < -2.0) {
            msb = 0; lsb = 0;      // -3
        } else if (s < 0.0) {
            msb = 0; lsb = 1;      // -1
        } else if (s < 2.0) {
            msb = 1; lsb = 1;      // +1
        } else {
            msb = 1; lsb = 0;      // +3
        }
        out[2 * i] = msb;
        out[2 * i + 1] = lsb;
    }
    return out;
}

namespace {

// Raised-cosine spectrum (unity at DC), zero beyond (1+beta)/2 * baud.
double raised_cosine_gain(double f, double baud, double beta)
{
    const double f1 = (1.0 - beta) / 2.0 * baud;
    const double f2 = (1.0 + beta) / 2.0 * baud;
    const double af = std::abs(f);
    if (af <= f1)
        return 1.0;
    if (af >= f2)
        return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi / (beta * baud) * (af - f1)));
}

}  // namespace

sigkit::Waveform pulse_shape(const std::vector<double>& symbols, const TxConfig& cfg)
{
    cfg.validate();
    if (symbols.empty())
        throw std::invalid_argument("pulse_shape: no symbols");
    const size_t n = symbols.size() * static_cast<size_t>(cfg.sps);
    const double rate = cfg.baud * cfg.sps;
    std::vector<double> x(n, 0.0);
    for (size_t i = 0; i < symbols.size(); ++i)
        x[i * cfg.sps] = symbols[i] * cfg.sps;  // impulse train, unit symbol gain
    auto spec = fft::rfft(x);
    for (size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * rate / static_cast<double>(n);
        spec[k] *= raised_cosine_gain(f, cfg.baud, cfg.rolloff);
    }
    return sigkit::Waveform(fft::irfft(spec, n), rate);
}

sigkit::FrequencyResponse design_preequalizer(const sigkit::FrequencyResponse& h_e2e,
                                              double cutoff)
{
    // Magnitude floor relative to the strongest in-band gain.
    double max_mag = 0.0;
    for (size_t i = 0; i < h_e2e.size(); ++i)
        if (h_e2e.freqs[i] <= cutoff)
            max_mag = std::max(max_mag, std::abs(h_e2e.gains[i]));
    if (max_mag <= 0.0)
        throw std::invalid_argument("design_preequalizer: channel identically zero in-band");
    const double floor_mag = max_mag * std::pow(10.0, -35.0 / 10.0);

    std::vector<std::complex<double>> g(h_e2e.size());
    size_t last_inband = 0;
    for (size_t i = 0; i < h_e2e.size(); ++i) {
        if (h_e2e.freqs[i] > cutoff)
            break;
        const auto h = h_e2e.gains[i];
        const double mag = std::max(std::abs(h), floor_mag);
        const double ph = std::abs(h) > 0.0 ? std::arg(h) : 0.0;
        g[i] = 1.0 / std::polar(mag, ph);
        last_inband = i;
    }

    // Above cutoff: hold the cutoff magnitude, continue the phase
    // linearly with the group-delay slope fitted near the cutoff.
    const double hold_mag = std::abs(g[last_inband]);
    double slope = 0.0;
    {
        std::vector<double> fs, phs;
        double prev = std::arg(g[0]);
        double unwrapped = prev;
        for (size_t i = 0; i <= last_inband; ++i) {
            double ph = std::arg(g[i]);
            while (ph - prev > std::numbers::pi) ph -= 2.0 * std::numbers::pi;
            while (ph - prev < -std::numbers::pi) ph += 2.0 * std::numbers::pi;
            unwrapped += ph - prev;
            prev = ph;
            if (h_e2e.freqs[i] >= 0.8 * cutoff) {
                fs.push_back(h_e2e.freqs[i]);
                phs.push_back(unwrapped);
            }
        }
        if (fs.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t i = 0; i < fs.size(); ++i) {
                sx += fs[i]; sy += phs[i]; sxx += fs[i] * fs[i]; sxy += fs[i] * phs[i];
            }
            const double nn = static_cast<double>(fs.size());
            const double den = nn * sxx - sx * sx;
            if (den != 0.0)
                slope = (nn * sxy - sx * sy) / den;
        }
    }
    const double f_c = h_e2e.freqs[last_inband];
    const double ph_c = std::arg(g[last_inband]);
    for (size_t i = last_inband + 1; i < h_e2e.size(); ++i)
        g[i] = std::polar(hold_mag, ph_c + slope * (h_e2e.freqs[i] - f_c));

    return sigkit::FrequencyResponse(h_e2e.freqs, std::move(g));
}

double quantize_uniform(double x, double fullscale, int bits)
{
    const double step = fullscale / static_cast<double>(1 << (bits - 1));
    const double mag = std::min(std::abs(x), fullscale - step / 2.0);
    const double q = (std::floor(mag / step) + 0.5) * step;
    return std::copysign(q, x);
}

sigkit::Waveform apply_preeq_and_dac(const sigkit::Waveform& x,
                                     const sigkit::FrequencyResponse& preeq,
                                     const TxConfig& cfg)
{
    cfg.validate();
    auto y = sigkit::apply_frequency_response(x, preeq);

    // Full-scale normalization with bounded clipping: map the 99.8th
    // percentile of |x| to full scale instead of the absolute peak, so
    // rare pre-emphasis overshoots clip rather than shrinking the whole
    // swing (the quantizer saturates them).
    std::vector<double> mags(y.size());
    for (size_t i = 0; i < y.size(); ++i)
        mags[i] = std::abs(y.samples[i]);
    const size_t qidx =
        static_cast<size_t>(cfg.clip_quantile * static_cast<double>(y.size() - 1));
    std::nth_element(mags.begin(), mags.begin() + static_cast<ptrdiff_t>(qidx), mags.end());
    const double peak = mags[qidx];
    const double fullscale = cfg.drive_vpp / 2.0;
    std::vector<double> q(y.size());
    if (peak > 0.0) {
        const double g = fullscale / peak;
        for (size_t i = 0; i < y.size(); ++i)
            q[i] = quantize_uniform(y.samples[i] * g, fullscale, cfg.dac_bits);
    }
    sigkit::Waveform quantized(std::move(q), y.sample_rate);
    auto lp = filters::bessel4_response(cfg.dac_bandwidth, y.sample_rate / 2.0);
    return sigkit::apply_frequency_response(quantized, lp);
}

}  // namespace linksim::txdsp
