#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/sigkit.hpp"

namespace linksim::rxdsp {

enum class TapSpacing { Symbol, HalfSymbol };
enum class EqMode { TrainThenFreeze, DecisionDirected };

/// Adaptive equalizer configuration (LMS FFE + DFE).
struct EqConfig {
    int ff_taps = 7;
    int fb_taps = 7;
    TapSpacing ff_spacing = TapSpacing::Symbol;
    double step_mu = 1e-3;
    int train_len = 4000;
    EqMode mode = EqMode::TrainThenFreeze;

    bool bypassed() const { return ff_taps == 0 && fb_taps == 0; }
    void validate() const;
};

/// One (core, RoP, eq-config) -> BER result row.
struct BerRecord {
    int core_idx = 0;
    double rop_dbm = 0.0;
    double baud = 0.0;
    int ff_taps = 0;
    int fb_taps = 0;
    TapSpacing spacing = TapSpacing::Symbol;
    size_t bits_compared = 0;
    size_t bit_errors = 0;
    double ber = 0.0;
    bool fec_7pct_pass = false;
    bool fec_kp4_pass = false;
    bool sync_failed = false;
};

struct SyncResult {
    std::vector<double> symbol_rate;  // one sample per symbol, aligned to reference
    std::vector<double> half_rate;    // two samples per symbol, same alignment
    size_t offset_symbols = 0;        // recovered cyclic offset
    double peak_correlation = 0.0;    // normalized, 1 for a clean loopback
};

/// Cyclic timing recovery: resample to an integer samples-per-symbol
/// grid, pick the single sampling phase and cyclic offset maximizing the
/// cross-correlation against the reference symbols. Throws on a peak
/// below the significance threshold.
SyncResult synchronize(const sigkit::Waveform& capture,
                       const std::vector<double>& reference, double baud,
                       double aa_cutoff_hz = 0.0);

struct EqualizeResult {
    std::vector<double> estimates;   // one soft estimate per symbol
    std::vector<double> train_mse;   // per-epoch mean squared error
};

/// LMS FFE (centre tap initialized) cascaded with a decision-feedback
/// stage on decided symbols. Input is the symbol-rate stream, or the
/// half-rate stream for half-symbol FFE spacing. Inputs are first
/// normalized by an affine fit against the training symbols.
EqualizeResult equalize(const std::vector<double>& x, const std::vector<double>& reference,
                        const EqConfig& cfg);

/// Nearest-level PAM-4 decision (thresholds -2/0/+2) + Gray demap.
std::vector<uint8_t> decide_and_demap(const std::vector<double>& estimates);

struct BerCount {
    size_t bits_compared = 0;
    size_t bit_errors = 0;
    double ber = 0.0;
    size_t alignment_shift = 0;
};

/// Hamming count after searching all cyclic bit alignments (covers the
/// 2-bit PAM ambiguity). Throws when the best alignment still disagrees
/// on >= 40% of bits.
BerCount count_ber(const std::vector<uint8_t>& bits, const std::vector<uint8_t>& reference);

/// Pass flags for the 7% OH-HDFEC (3.8e-3) and KP4 (2.4e-4) thresholds.
struct FecVerdict {
    bool fec_7pct_pass;
    bool fec_kp4_pass;
};
FecVerdict fec_verdict(double ber);

/// 2-D folded histogram of a waveform over span symbol periods.
struct EyeDiagram {
    size_t bins = 0;
    int span_symbols = 0;
    double amp_min = 0.0, amp_max = 0.0;
    std::vector<uint64_t> counts;  // bins x bins, row-major, row = amplitude

    uint64_t total() const;
    void save_csv(const std::string& path) const;
};
EyeDiagram eye_diagram(const sigkit::Waveform& x, double baud, int span_symbols = 2,
                       size_t bins = 64);

}  // namespace linksim::rxdsp
