#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/fiberlink.hpp"
#include "linksim/rxdsp.hpp"
#include "linksim/rxfe.hpp"
#include "linksim/sigkit.hpp"
#include "linksim/txdsp.hpp"
#include "linksim/vcsel.hpp"

namespace linksim::bench {

/// Internal optical simulation grid (2x the DAC rate).
inline constexpr double kOpticalRate = 184e9;

/// Declarative experiment description; serialized as JSON.
struct Scenario {
    std::string name = "unnamed";
    double baud = 50e9;
    txdsp::TxConfig tx;
    vcsel::VcselParams laser = vcsel::VcselParams::calibrated_default();
    fiberlink::McfParams mcf;
    rxfe::RxParams rx;
    rxdsp::EqConfig eq;
    std::vector<double> rop_sweep = {7.0};
    std::vector<int> cores = {0, 1, 2, 3, 4, 5, 6};
    size_t n_symbols = 65536;
    uint64_t master_seed = 1;
    double characterize_duration = 16e-9;  // probe frame length, s

    void validate() const;
    /// n_symbols rounded up so every processing grid in the chain has an
    /// integer number of samples per frame.
    size_t frame_symbols() const;

    std::string to_json() const;
    static Scenario from_json(const std::string& text);
    static Scenario load(const std::string& path);
    void save(const std::string& path) const;
    /// FNV-1a hash of the serialized scenario, for the run manifest.
    uint64_t hash() const;
};

/// End-to-end electrical channel characterization, one response per
/// requested core, measured with a full-scale multitone probe on a
/// 250 MHz grid up to 40 GHz (grid extended to DAC Nyquist for pre-EQ).
std::vector<sigkit::FrequencyResponse> characterize_link(const Scenario& scenario,
                                                         bool parallel = true);

/// One captured receiver leg, ready for offline DSP.
struct LinkCapture {
    int core_idx = 0;
    double rop_dbm = 0.0;
    sigkit::Waveform capture;           // ADC output
    std::vector<double> ref_symbols;
    std::vector<uint8_t> ref_bits;
};

/// Transmit/propagate/receive for every (core, RoP) grid point, using
/// per-core pre-equalizers built from characterize_link of the same
/// scenario.
std::vector<LinkCapture> simulate_captures(const Scenario& scenario, bool parallel = true);

/// Offline DSP on one capture: synchronize, equalize, decide, count.
rxdsp::BerRecord process_capture(const LinkCapture& cap, const rxdsp::EqConfig& eq,
                                 double baud, double aa_cutoff_hz = 0.0);

struct ScenarioResult {
    std::vector<rxdsp::BerRecord> records;
    std::vector<rxdsp::EyeDiagram> eyes;      // per core, at max RoP
    std::vector<int> eye_cores;
    double aggregate_gbps = 0.0;
};

ScenarioResult run_scenario(const Scenario& scenario, bool parallel = true);

struct TapSweepRow {
    std::string combo;
    int total_taps = 0;
    int ff_taps = 0;
    int fb_taps = 0;
    double ber = 0.0;
};

/// BER vs total tap count for FF-only, FF+FB and half-symbol FF+FB
/// combinations at a fixed (core, RoP) point.
std::vector<TapSweepRow> sweep_taps(const Scenario& scenario, int max_total_taps = 21,
                                    bool parallel = true);

struct FecCrossing {
    int core_idx = 0;
    double rop_7pct_dbm = 0.0;   // NaN when the curve never crosses
    double rop_kp4_dbm = 0.0;
};

struct RopSweepResult {
    std::vector<rxdsp::BerRecord> records;
    std::vector<FecCrossing> crossings;
};

/// BER waterfall per core with FEC-threshold crossings interpolated
/// linearly in log10(BER) vs dBm.
RopSweepResult sweep_rop(const Scenario& scenario, bool parallel = true);

struct NotchRow {
    double alpha_h = 0.0;
    double d_total_ps_nm = 0.0;
    double predicted_hz = 0.0;   // closed form
    double simulated_hz = 0.0;   // 0 when no null below the probe band edge
    double simulated_depth_db = 0.0;
};

/// Closed-form predictions next to simulated end-to-end nulls.
std::vector<NotchRow> notch_report(double alpha_h, const std::vector<double>& d_totals,
                                   double wavelength, double kappa = 0.0);

void save_records_csv(const std::vector<rxdsp::BerRecord>& records, const std::string& path);
void save_tap_sweep_csv(const std::vector<TapSweepRow>& rows, const std::string& path);
void save_notch_csv(const std::vector<NotchRow>& rows, const std::string& path);
void write_manifest(const Scenario& scenario, const std::string& path);

}  // namespace linksim::bench
