#pragma once

#include <cstdint>
#include <vector>

#include "linksim/sigkit.hpp"

namespace linksim::txdsp {

/// Transmitter-side configuration (DAC grid, shaping, pre-EQ limits).
struct TxConfig {
    double baud = 50e9;            // symbols/s
    double rolloff = 0.15;
    int sps = 4;                   // samples/symbol on the shaping grid
    double preeq_cutoff = 26e9;    // Hz
    int dac_bits = 8;
    double dac_rate = 92e9;        // Sa/s
    double dac_bandwidth = 32e9;   // Hz
    double drive_vpp = 0.700;      // V
    // |x| quantile mapped to DAC full scale; overshoots beyond it clip.
    double clip_quantile = 0.998;

    void validate() const;
};

/// Maximal-length PRBS-15, x^15 + x^14 + 1. Period 32767.
std::vector<uint8_t> prbs15(uint16_t seed, size_t n);

/// Gray mapping, MSB first: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
std::vector<double> map_pam4(const std::vector<uint8_t>& bits);

/// Inverse of map_pam4 for exact grid levels.
std::vector<uint8_t> demap_pam4(const std::vector<double>& symbols);

/// Raised-cosine shaping to sps samples/symbol (circular frame). Output
/// rate is sps * baud; symbol-center samples reproduce the symbols.
sigkit::Waveform pulse_shape(const std::vector<double>& symbols, const TxConfig& cfg);

/// Zero-forcing pre-equalizer: inverts h_e2e up to cutoff (channel
/// magnitude clamped at max|h| * 10^-3.5 before inversion); above
/// cutoff the gain magnitude is held and the phase continued linearly.
sigkit::FrequencyResponse design_preequalizer(const sigkit::FrequencyResponse& h_e2e,
                                              double cutoff);

/// Pre-EQ filter + full-scale normalization to drive_vpp/2 + uniform
/// mid-rise quantization + DAC analog band limit (Bessel-4).
sigkit::Waveform apply_preeq_and_dac(const sigkit::Waveform& x,
                                     const sigkit::FrequencyResponse& preeq,
                                     const TxConfig& cfg);

/// Symmetric mid-rise uniform quantizer, full scale +-fullscale.
double quantize_uniform(double x, double fullscale, int bits);

}  // namespace linksim::txdsp
