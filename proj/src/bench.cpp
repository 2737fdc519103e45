#include "linksim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "linksim/fft.hpp"
#include "linksim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace linksim::bench {

using nlohmann::json;

namespace {

// Run fn(i) for i in [0, n), optionally across OpenMP threads. Every
// iteration seeds its own RNGs, so the schedule cannot change results.
// The first exception thrown by any iteration is rethrown.
template <typename Fn>
void for_each_index(size_t n, bool parallel, Fn&& fn)
{
    std::exception_ptr err;
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!err)
                    err = std::current_exception();
            }
        }
        if (err)
            std::rethrow_exception(err);
        return;
    }
#else
    (void)parallel;
#endif
    for (size_t i = 0; i < n; ++i)
        fn(i);
}

const char* spacing_name(rxdsp::TapSpacing s)
{
    return s == rxdsp::TapSpacing::HalfSymbol ? "half_symbol" : "symbol";
}

rxdsp::TapSpacing spacing_from_name(const std::string& s)
{
    if (s == "symbol")
        return rxdsp::TapSpacing::Symbol;
    if (s == "half_symbol")
        return rxdsp::TapSpacing::HalfSymbol;
    throw std::invalid_argument("unknown tap spacing: " + s);
}

const char* mode_name(rxdsp::EqMode m)
{
    return m == rxdsp::EqMode::DecisionDirected ? "decision_directed" : "train_then_freeze";
}

rxdsp::EqMode mode_from_name(const std::string& s)
{
    if (s == "train_then_freeze")
        return rxdsp::EqMode::TrainThenFreeze;
    if (s == "decision_directed")
        return rxdsp::EqMode::DecisionDirected;
    throw std::invalid_argument("unknown equalizer mode: " + s);
}

// Probe tone plan shared by characterization (250 MHz grid up to 40 GHz).
constexpr double kProbeStep = 250e6;
constexpr double kProbeTop = 40e9;

void require_integer_cycles(double value, const char* what)
{
    if (std::abs(value - std::round(value)) > 1e-6)
        throw std::invalid_argument(std::string("characterize: ") + what +
                                    " does not fit an integer number of samples in the probe frame");
}

}  // namespace

void Scenario::validate() const
{
    if (baud <= 0.0)
        throw std::invalid_argument("Scenario: baud must be > 0");
    if (std::abs(tx.baud - baud) > 1e-3)
        throw std::invalid_argument("Scenario: tx.baud disagrees with scenario baud");
    tx.validate();
    mcf.validate();
    rx.validate();
    eq.validate();
    if (rop_sweep.empty())
        throw std::invalid_argument("Scenario: empty RoP sweep");
    if (cores.empty())
        throw std::invalid_argument("Scenario: no cores selected");
    for (int c : cores)
        if (c < 0 || c >= mcf.n_cores)
            throw std::invalid_argument("Scenario: core index out of range");
    if (n_symbols < 1024)
        throw std::invalid_argument("Scenario: n_symbols too small for training + counting");
    if (characterize_duration <= 0.0)
        throw std::invalid_argument("Scenario: characterize_duration must be > 0");
}

size_t Scenario::frame_symbols() const
{
    // Every grid the frame visits must hold an integer sample count:
    // n_sym * rate / baud integer for each rate in the chain.
    const auto baud_u = static_cast<uint64_t>(std::llround(baud));
    uint64_t need = 1;
    const double rates[] = {tx.dac_rate, kOpticalRate, rx.adc_rate,
                            static_cast<double>(tx.sps) * baud, 8.0 * baud};
    for (double r : rates) {
        const auto ru = static_cast<uint64_t>(std::llround(r));
        const uint64_t m = baud_u / std::gcd(ru, baud_u);
        need = std::lcm(need, m);
    }
    const uint64_t blocks = (n_symbols + need - 1) / need;
    return static_cast<size_t>(blocks * need);
}

std::string Scenario::to_json() const
{
    json j;
    j["name"] = name;
    j["baud"] = baud;
    j["n_symbols"] = n_symbols;
    j["master_seed"] = master_seed;
    j["characterize_duration"] = characterize_duration;
    j["rop_sweep"] = rop_sweep;
    j["cores"] = cores;
    j["tx"] = {{"rolloff", tx.rolloff},
               {"sps", tx.sps},
               {"preeq_cutoff", tx.preeq_cutoff},
               {"dac_bits", tx.dac_bits},
               {"dac_rate", tx.dac_rate},
               {"dac_bandwidth", tx.dac_bandwidth},
               {"drive_vpp", tx.drive_vpp},
               {"clip_quantile", tx.clip_quantile}};
    j["laser"] = {{"i_th", laser.i_th},
                  {"i_rollover", laser.i_rollover},
                  {"p_max", laser.p_max},
                  {"alpha_h", laser.alpha_h},
                  {"kappa", laser.kappa},
                  {"f_r7", laser.f_r7},
                  {"k_damping", laser.k_damping},
                  {"gamma0", laser.gamma0},
                  {"f_p", laser.f_p},
                  {"bias", laser.bias},
                  {"wavelength", laser.wavelength},
                  {"r_drive", laser.r_drive}};
    if (laser.skew_tau)
        j["laser"]["skew_tau"] = *laser.skew_tau;
    j["mcf"] = {{"n_cores", mcf.n_cores},
                {"dispersion_ps_nm_km", mcf.dispersion_ps_nm_km},
                {"length_m", mcf.length_m},
                {"attenuation_db_km", mcf.attenuation_db_km},
                {"xt_per_100km_db", mcf.xt_per_100km_db},
                {"fanio_loss_db", mcf.fanio_loss_db},
                {"fanio_xt_db", mcf.fanio_xt_db},
                {"ripple_max_db", mcf.ripple_max_db},
                {"variation_seed", mcf.variation_seed},
                {"dcm_ps_nm", mcf.dcm_ps_nm},
                {"fan_modules", mcf.fan_modules},
                {"crosstalk_enabled", mcf.crosstalk_enabled}};
    j["rx"] = {{"edfa_pout_dbm", rx.edfa_pout_dbm},
               {"edfa_nf_db", rx.edfa_nf_db},
               {"obpf_bw", rx.obpf_bw},
               {"pd_responsivity", rx.pd_responsivity},
               {"pd_bandwidth", rx.pd_bandwidth},
               {"thermal_noise_psd", rx.thermal_noise_psd},
               {"adc_rate", rx.adc_rate},
               {"adc_bandwidth", rx.adc_bandwidth},
               {"adc_bits", rx.adc_bits},
               {"noise_enabled", rx.noise_enabled}};
    j["eq"] = {{"ff_taps", eq.ff_taps},
               {"fb_taps", eq.fb_taps},
               {"ff_spacing", spacing_name(eq.ff_spacing)},
               {"step_mu", eq.step_mu},
               {"train_len", eq.train_len},
               {"mode", mode_name(eq.mode)}};
    return j.dump(2) + "\n";
}

Scenario Scenario::from_json(const std::string& text)
{
    const json j = json::parse(text);
    Scenario s;
    auto get = [](const json& o, const char* key, auto& dst) {
        if (o.contains(key))
            dst = o.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get(j, "name", s.name);
    get(j, "baud", s.baud);
    get(j, "n_symbols", s.n_symbols);
    get(j, "master_seed", s.master_seed);
    get(j, "characterize_duration", s.characterize_duration);
    get(j, "rop_sweep", s.rop_sweep);
    get(j, "cores", s.cores);
    if (j.contains("tx")) {
        const json& t = j.at("tx");
        get(t, "rolloff", s.tx.rolloff);
        get(t, "sps", s.tx.sps);
        get(t, "preeq_cutoff", s.tx.preeq_cutoff);
        get(t, "dac_bits", s.tx.dac_bits);
        get(t, "dac_rate", s.tx.dac_rate);
        get(t, "dac_bandwidth", s.tx.dac_bandwidth);
        get(t, "drive_vpp", s.tx.drive_vpp);
        get(t, "clip_quantile", s.tx.clip_quantile);
    }
    s.tx.baud = s.baud;
    if (j.contains("laser")) {
        const json& l = j.at("laser");
        get(l, "i_th", s.laser.i_th);
        get(l, "i_rollover", s.laser.i_rollover);
        get(l, "p_max", s.laser.p_max);
        get(l, "alpha_h", s.laser.alpha_h);
        get(l, "kappa", s.laser.kappa);
        get(l, "f_r7", s.laser.f_r7);
        get(l, "k_damping", s.laser.k_damping);
        get(l, "gamma0", s.laser.gamma0);
        get(l, "f_p", s.laser.f_p);
        get(l, "bias", s.laser.bias);
        get(l, "wavelength", s.laser.wavelength);
        get(l, "r_drive", s.laser.r_drive);
        if (l.contains("skew_tau"))
            s.laser.skew_tau = l.at("skew_tau").get<double>();
    }
    if (j.contains("mcf")) {
        const json& m = j.at("mcf");
        get(m, "n_cores", s.mcf.n_cores);
        get(m, "dispersion_ps_nm_km", s.mcf.dispersion_ps_nm_km);
        get(m, "length_m", s.mcf.length_m);
        get(m, "attenuation_db_km", s.mcf.attenuation_db_km);
        get(m, "xt_per_100km_db", s.mcf.xt_per_100km_db);
        get(m, "fanio_loss_db", s.mcf.fanio_loss_db);
        get(m, "fanio_xt_db", s.mcf.fanio_xt_db);
        get(m, "ripple_max_db", s.mcf.ripple_max_db);
        get(m, "variation_seed", s.mcf.variation_seed);
        get(m, "dcm_ps_nm", s.mcf.dcm_ps_nm);
        get(m, "fan_modules", s.mcf.fan_modules);
        get(m, "crosstalk_enabled", s.mcf.crosstalk_enabled);
    }
    if (j.contains("rx")) {
        const json& r = j.at("rx");
        get(r, "edfa_pout_dbm", s.rx.edfa_pout_dbm);
        get(r, "edfa_nf_db", s.rx.edfa_nf_db);
        get(r, "obpf_bw", s.rx.obpf_bw);
        get(r, "pd_responsivity", s.rx.pd_responsivity);
        get(r, "pd_bandwidth", s.rx.pd_bandwidth);
        get(r, "thermal_noise_psd", s.rx.thermal_noise_psd);
        get(r, "adc_rate", s.rx.adc_rate);
        get(r, "adc_bandwidth", s.rx.adc_bandwidth);
        get(r, "adc_bits", s.rx.adc_bits);
        get(r, "noise_enabled", s.rx.noise_enabled);
    }
    if (j.contains("eq")) {
        const json& e = j.at("eq");
        get(e, "ff_taps", s.eq.ff_taps);
        get(e, "fb_taps", s.eq.fb_taps);
        get(e, "step_mu", s.eq.step_mu);
        get(e, "train_len", s.eq.train_len);
        if (e.contains("ff_spacing"))
            s.eq.ff_spacing = spacing_from_name(e.at("ff_spacing").get<std::string>());
        if (e.contains("mode"))
            s.eq.mode = mode_from_name(e.at("mode").get<std::string>());
    }
    s.validate();
    return s;
}

Scenario Scenario::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void Scenario::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << to_json();
}

uint64_t Scenario::hash() const
{
    const std::string text = to_json();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<sigkit::FrequencyResponse> characterize_link(const Scenario& scenario, bool parallel)
{
    scenario.validate();
    const Scenario& s = scenario;
    const double T = s.characterize_duration;
    require_integer_cycles(T * s.tx.dac_rate, "DAC rate");
    require_integer_cycles(T * kOpticalRate, "optical rate");
    require_integer_cycles(T * s.rx.adc_rate, "ADC rate");
    require_integer_cycles(T * kProbeStep, "tone spacing");

    const size_t n_dac = static_cast<size_t>(std::llround(T * s.tx.dac_rate));
    const size_t n_tones = static_cast<size_t>(std::floor(kProbeTop / kProbeStep + 0.5));

    // Multitone probe on the DAC grid with per-tone random phases (same
    // probe for every core, so responses are directly comparable).
    auto eng = rng::engine(rng::derive(s.master_seed, 0x9b0be5));
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(n_tones);
    for (auto& p : phases)
        p = uphase(eng);

    std::vector<double> probe(n_dac, 0.0);
    for (size_t j = 0; j < n_tones; ++j) {
        const double k = std::round((j + 1) * kProbeStep * T);
        const double ph = phases[j];
        for (size_t i = 0; i < n_dac; ++i)
            probe[i] += std::cos(2.0 * std::numbers::pi * k * static_cast<double>(i) /
                                     static_cast<double>(n_dac) +
                                 ph);
    }
    const sigkit::Waveform probe_wf(probe, s.tx.dac_rate);
    const auto probe_spec = fft::rfft(probe);

    const auto ident = sigkit::FrequencyResponse::identity(0.0, s.tx.dac_rate / 2.0);
    const auto drive = txdsp::apply_preeq_and_dac(probe_wf, ident, s.tx);
    const auto drive_opt = sigkit::resample(drive, kOpticalRate);
    const double rop_char = *std::max_element(s.rop_sweep.begin(), s.rop_sweep.end());

    std::vector<sigkit::FrequencyResponse> out(s.cores.size());
    for_each_index(s.cores.size(), parallel, [&](size_t pos) {
        const int core = s.cores[pos];
        auto mod = vcsel::modulate(s.laser, drive_opt, s.laser.bias);
        if (mod.clip_fraction > 0.05)
            throw std::runtime_error("characterize: probe clips the laser below threshold");
        auto field = fiberlink::propagate_core(mod.field, s.mcf, core);
        field = rxfe::edfa_agc(field, s.rx, rng::derive(s.master_seed, 0xED7A, core));
        const double target = std::min(rop_char, sigkit::power_dbm(field));
        field = rxfe::voa_set_rop(field, target);
        auto current = rxfe::photodetect(field, s.rx, rng::derive(s.master_seed, 0xBD01, core));
        auto cap = rxfe::adc_capture(current, s.rx);
        const auto cap_spec = fft::rfft(cap.samples);

        std::vector<double> freqs;
        std::vector<std::complex<double>> gains;
        freqs.reserve(n_tones + 2);
        gains.reserve(n_tones + 2);
        freqs.push_back(0.0);
        gains.push_back(1.0);  // placeholder, replaced below
        for (size_t j = 0; j < n_tones; ++j) {
            const auto k = static_cast<size_t>(std::llround((j + 1) * kProbeStep * T));
            freqs.push_back((j + 1) * kProbeStep);
            gains.push_back(cap_spec[k] / probe_spec[k]);
        }
        // DC extrapolation (real, from the lowest tone) and a held tail
        // out to the DAC Nyquist so downstream filters can interpolate.
        gains[0] = std::abs(gains[1]);
        freqs.push_back(s.tx.dac_rate / 2.0);
        gains.push_back(gains.back());
        out[pos] = sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
    });
    return out;
}

std::vector<LinkCapture> simulate_captures(const Scenario& scenario, bool parallel)
{
    scenario.validate();
    const Scenario& s = scenario;
    const size_t n_sym = s.frame_symbols();
    const size_t n_cores = s.cores.size();

    const auto responses = characterize_link(s, parallel);
    std::vector<sigkit::FrequencyResponse> preeqs(n_cores);
    for (size_t pos = 0; pos < n_cores; ++pos)
        preeqs[pos] = txdsp::design_preequalizer(responses[pos], s.tx.preeq_cutoff);

    // One PRBS-15 stream, cyclically rotated per core so neighbouring
    // cores do not carry correlated payloads into the crosstalk sum.
    const auto base_bits = txdsp::prbs15(0x7fff, 2 * n_sym);
    std::vector<std::vector<uint8_t>> core_bits(n_cores);
    std::vector<std::vector<double>> core_syms(n_cores);
    for (size_t pos = 0; pos < n_cores; ++pos) {
        const size_t shift =
            2 * ((static_cast<size_t>(s.cores[pos]) * n_sym) / static_cast<size_t>(s.mcf.n_cores));
        auto bits = base_bits;
        std::rotate(bits.begin(), bits.begin() + static_cast<ptrdiff_t>(shift), bits.end());
        core_syms[pos] = txdsp::map_pam4(bits);
        core_bits[pos] = std::move(bits);
    }

    // TX + laser + fiber per core, then the crosstalk exchange, which
    // needs all propagated fields at once.
    std::vector<sigkit::OpticalField> propagated(n_cores);
    for_each_index(n_cores, parallel, [&](size_t pos) {
        auto shaped = txdsp::pulse_shape(core_syms[pos], s.tx);
        auto at_dac = sigkit::resample(shaped, s.tx.dac_rate);
        auto drive = txdsp::apply_preeq_and_dac(at_dac, preeqs[pos], s.tx);
        auto drive_opt = sigkit::resample(drive, kOpticalRate);
        auto mod = vcsel::modulate(s.laser, drive_opt, s.laser.bias);
        propagated[pos] = fiberlink::propagate_core(mod.field, s.mcf, s.cores[pos]);
    });

    std::vector<sigkit::OpticalField> all(static_cast<size_t>(s.mcf.n_cores));
    const size_t n_opt = propagated[0].size();
    for (auto& f : all)
        f = sigkit::OpticalField(std::vector<std::complex<double>>(n_opt, 0.0), kOpticalRate,
                                 s.laser.wavelength);
    for (size_t pos = 0; pos < n_cores; ++pos)
        all[static_cast<size_t>(s.cores[pos])] = propagated[pos];
    all = fiberlink::add_crosstalk(all, s.mcf, rng::derive(s.master_seed, 0xC057));

    std::vector<sigkit::OpticalField> amplified(n_cores);
    for_each_index(n_cores, parallel, [&](size_t pos) {
        amplified[pos] = rxfe::edfa_agc(all[static_cast<size_t>(s.cores[pos])], s.rx,
                                        rng::derive(s.master_seed, 0xED7B, s.cores[pos]));
    });

    const size_t n_rop = s.rop_sweep.size();
    std::vector<LinkCapture> caps(n_cores * n_rop);
    for_each_index(n_cores * n_rop, parallel, [&](size_t idx) {
        const size_t pos = idx / n_rop;
        const size_t ri = idx % n_rop;
        const int core = s.cores[pos];
        // The OBPF trims a sliver of power after the AGC sets its target,
        // so a nominal RoP equal to the EDFA output needs a tiny clamp.
        const double avail = sigkit::power_dbm(amplified[pos]);
        double target = s.rop_sweep[ri];
        if (target > avail && target < avail + 0.1)
            target = avail;
        auto field = rxfe::voa_set_rop(amplified[pos], target);
        auto current = rxfe::photodetect(
            field, s.rx, rng::derive(s.master_seed, 0xBD02, core, static_cast<int>(ri)));
        LinkCapture cap;
        cap.core_idx = core;
        cap.rop_dbm = s.rop_sweep[ri];
        cap.capture = rxfe::adc_capture(current, s.rx);
        cap.ref_symbols = core_syms[pos];
        cap.ref_bits = core_bits[pos];
        caps[idx] = std::move(cap);
    });
    return caps;
}

rxdsp::BerRecord process_capture(const LinkCapture& cap, const rxdsp::EqConfig& eq, double baud,
                                 double aa_cutoff_hz)
{
    rxdsp::BerRecord rec;
    rec.core_idx = cap.core_idx;
    rec.rop_dbm = cap.rop_dbm;
    rec.baud = baud;
    rec.ff_taps = eq.ff_taps;
    rec.fb_taps = eq.fb_taps;
    rec.spacing = eq.ff_spacing;
    try {
        const auto sync = rxdsp::synchronize(cap.capture, cap.ref_symbols, baud, aa_cutoff_hz);
        const auto& x = eq.ff_spacing == rxdsp::TapSpacing::HalfSymbol ? sync.half_rate
                                                                       : sync.symbol_rate;
        const auto eqr = rxdsp::equalize(x, cap.ref_symbols, eq);
        const size_t skip = eq.bypassed() ? 0 : static_cast<size_t>(eq.train_len);
        std::vector<double> payload(eqr.estimates.begin() + static_cast<ptrdiff_t>(skip),
                                    eqr.estimates.end());
        const auto bits = rxdsp::decide_and_demap(payload);
        std::vector<uint8_t> ref(cap.ref_bits.begin() + static_cast<ptrdiff_t>(2 * skip),
                                 cap.ref_bits.end());
        const auto count = rxdsp::count_ber(bits, ref);
        rec.bits_compared = count.bits_compared;
        rec.bit_errors = count.bit_errors;
        rec.ber = count.ber;
        const auto fec = rxdsp::fec_verdict(rec.ber);
        rec.fec_7pct_pass = fec.fec_7pct_pass;
        rec.fec_kp4_pass = fec.fec_kp4_pass;
    } catch (const std::runtime_error&) {
        // Sync below threshold, equalizer divergence or an unalignable
        // count: record the leg as failed instead of aborting the sweep.
        rec.sync_failed = true;
        rec.ber = 0.5;
    }
    return rec;
}

ScenarioResult run_scenario(const Scenario& scenario, bool parallel)
{
    auto caps = simulate_captures(scenario, parallel);
    ScenarioResult res;
    res.records.resize(caps.size());
    for_each_index(caps.size(), parallel, [&](size_t i) {
        res.records[i] = process_capture(caps[i], scenario.eq, scenario.baud);
    });

    const double max_rop =
        *std::max_element(scenario.rop_sweep.begin(), scenario.rop_sweep.end());
    for (const auto& cap : caps) {
        if (cap.rop_dbm != max_rop)
            continue;
        auto dense = sigkit::resample(cap.capture, 8.0 * scenario.baud);
        res.eyes.push_back(rxdsp::eye_diagram(dense, scenario.baud, 2, 64));
        res.eye_cores.push_back(cap.core_idx);
    }
    res.aggregate_gbps =
        static_cast<double>(scenario.cores.size()) * 2.0 * scenario.baud / 1e9;
    return res;
}

std::vector<TapSweepRow> sweep_taps(const Scenario& scenario, int max_total_taps, bool parallel)
{
    Scenario s = scenario;
    s.cores = {scenario.cores.front()};
    s.rop_sweep = {*std::max_element(scenario.rop_sweep.begin(), scenario.rop_sweep.end())};
    auto caps = simulate_captures(s, parallel);
    const LinkCapture& cap = caps.front();

    struct Job {
        std::string combo;
        int total, ff, fb;
        rxdsp::TapSpacing spacing;
    };
    std::vector<Job> jobs;
    for (int total = 0; total <= max_total_taps; ++total) {
        const int half = (total + 1) / 2;
        jobs.push_back({"ffe", total, total, 0, rxdsp::TapSpacing::Symbol});
        jobs.push_back({"ffe+dfe", total, half, total - half, rxdsp::TapSpacing::Symbol});
        jobs.push_back({"t2-ffe+dfe", total, half, total - half, rxdsp::TapSpacing::HalfSymbol});
    }

    std::vector<TapSweepRow> rows(jobs.size());
    for_each_index(jobs.size(), parallel, [&](size_t i) {
        rxdsp::EqConfig eq = s.eq;
        eq.ff_taps = jobs[i].ff;
        eq.fb_taps = jobs[i].fb;
        eq.ff_spacing = jobs[i].spacing;
        const auto rec = process_capture(cap, eq, s.baud);
        rows[i] = {jobs[i].combo, jobs[i].total, jobs[i].ff, jobs[i].fb,
                   rec.sync_failed ? 0.5 : rec.ber};
    });
    return rows;
}

namespace {

double crossing_dbm(const std::vector<std::pair<double, double>>& curve, double threshold)
{
    // curve: (rop_dbm, ber) ascending in rop. Interpolate in log10(BER).
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (curve.empty())
        return nan;
    auto logber = [](double b) { return std::log10(std::max(b, 1e-8)); };
    const double lt = std::log10(threshold);
    if (curve.front().second <= threshold)
        return curve.front().first;  // compliant across the whole sweep
    for (size_t i = 0; i + 1 < curve.size(); ++i) {
        const double b0 = curve[i].second, b1 = curve[i + 1].second;
        if (b0 > threshold && b1 <= threshold) {
            const double l0 = logber(b0), l1 = logber(b1);
            if (l0 == l1)
                return curve[i + 1].first;
            const double t = (lt - l0) / (l1 - l0);
            return curve[i].first + t * (curve[i + 1].first - curve[i].first);
        }
    }
    return nan;
}

}  // namespace

RopSweepResult sweep_rop(const Scenario& scenario, bool parallel)
{
    auto res = run_scenario(scenario, parallel);
    RopSweepResult out;
    out.records = std::move(res.records);
    for (int core : scenario.cores) {
        std::vector<std::pair<double, double>> curve;
        for (const auto& r : out.records)
            if (r.core_idx == core)
                curve.emplace_back(r.rop_dbm, r.sync_failed ? 0.5 : r.ber);
        std::sort(curve.begin(), curve.end());
        FecCrossing c;
        c.core_idx = core;
        c.rop_7pct_dbm = crossing_dbm(curve, 3.8e-3);
        c.rop_kp4_dbm = crossing_dbm(curve, 2.4e-4);
        out.crossings.push_back(c);
    }
    return out;
}

std::vector<NotchRow> notch_report(double alpha_h, const std::vector<double>& d_totals,
                                   double wavelength, double kappa)
{
    vcsel::VcselParams params = vcsel::VcselParams::calibrated_default();
    params.alpha_h = alpha_h;
    params.kappa = kappa;
    params.wavelength = wavelength;

    std::vector<NotchRow> rows(d_totals.size());
    for (size_t i = 0; i < d_totals.size(); ++i) {
        NotchRow row;
        row.alpha_h = alpha_h;
        row.d_total_ps_nm = d_totals[i];
        row.predicted_hz = std::abs(d_totals[i]) > 1e-12
                               ? fiberlink::predict_notch(alpha_h, d_totals[i], wavelength)
                               : 0.0;
        const auto h = vcsel::end_to_end_response(params, d_totals[i], 0.5e9, 90e9, 0.25e9);
        double depth = 0.0;
        row.simulated_hz = vcsel::first_null_hz(h, 6.0, &depth);
        row.simulated_depth_db = depth;
        rows[i] = row;
    }
    return rows;
}

void save_records_csv(const std::vector<rxdsp::BerRecord>& records, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "core,rop_dbm,baud,ff_taps,fb_taps,spacing,bits_compared,bit_errors,ber,"
           "fec_7pct_pass,fec_kp4_pass,sync_failed\n";
    for (const auto& r : records) {
        out << r.core_idx << ',' << r.rop_dbm << ',' << r.baud << ',' << r.ff_taps << ','
            << r.fb_taps << ',' << spacing_name(r.spacing) << ',' << r.bits_compared << ','
            << r.bit_errors << ',' << r.ber << ',' << (r.fec_7pct_pass ? 1 : 0) << ','
            << (r.fec_kp4_pass ? 1 : 0) << ',' << (r.sync_failed ? 1 : 0) << '\n';
    }
}

void save_tap_sweep_csv(const std::vector<TapSweepRow>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "combo,total_taps,ff_taps,fb_taps,ber\n";
    for (const auto& r : rows)
        out << r.combo << ',' << r.total_taps << ',' << r.ff_taps << ',' << r.fb_taps << ','
            << r.ber << '\n';
}

void save_notch_csv(const std::vector<NotchRow>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "alpha_h,d_total_ps_nm,predicted_hz,simulated_hz,simulated_depth_db\n";
    for (const auto& r : rows)
        out << r.alpha_h << ',' << r.d_total_ps_nm << ',' << r.predicted_hz << ','
            << r.simulated_hz << ',' << r.simulated_depth_db << '\n';
}

void write_manifest(const Scenario& scenario, const std::string& path)
{
    json j;
    j["scenario"] = json::parse(scenario.to_json());
    {
        std::ostringstream hex;
        hex << std::hex << scenario.hash();
        j["scenario_hash"] = hex.str();
    }
    j["frame_symbols"] = scenario.frame_symbols();
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace linksim::bench
