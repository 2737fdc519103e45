#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "linksim/bench.hpp"

using namespace linksim;

#ifndef PRESETS_DIR
#define PRESETS_DIR "presets"
#endif

namespace {

// small fast scenario for exercising the full pipeline
bench::Scenario quick_scenario()
{
    bench::Scenario s;
    s.name = "quick";
    s.baud = 50e9;
    s.laser.kappa = 1e13;
    s.mcf.length_m = 1000.0;
    s.mcf.ripple_max_db = 0.25;
    s.rx.thermal_noise_psd = 6e-21;
    s.rx.obpf_bw = 300e9;
    s.tx.clip_quantile = 0.999;
    s.rop_sweep = {7.0};
    s.cores = {0, 1};
    s.n_symbols = 4096;
    s.characterize_duration = 64e-9;
    return s;
}

}  // namespace

TEST_CASE("scenario json round trip preserves every field")
{
    auto s = quick_scenario();
    s.eq.ff_taps = 15;
    s.eq.fb_taps = 7;
    s.eq.ff_spacing = rxdsp::TapSpacing::HalfSymbol;
    s.master_seed = 777;
    s.mcf.dcm_ps_nm = -159.0;

    auto t = bench::Scenario::from_json(s.to_json());
    CHECK(t.name == s.name);
    CHECK(t.baud == s.baud);
    CHECK(t.laser.kappa == s.laser.kappa);
    CHECK(t.laser.alpha_h == s.laser.alpha_h);
    CHECK(t.mcf.length_m == s.mcf.length_m);
    CHECK(t.mcf.dcm_ps_nm == s.mcf.dcm_ps_nm);
    CHECK(t.mcf.ripple_max_db == s.mcf.ripple_max_db);
    CHECK(t.rx.thermal_noise_psd == s.rx.thermal_noise_psd);
    CHECK(t.tx.clip_quantile == s.tx.clip_quantile);
    CHECK(t.eq.ff_taps == 15);
    CHECK(t.eq.ff_spacing == rxdsp::TapSpacing::HalfSymbol);
    CHECK(t.master_seed == 777);
    CHECK(t.cores == s.cores);
    CHECK(t.hash() == s.hash());

    s.master_seed = 778;
    CHECK(t.hash() != s.hash());
}

TEST_CASE("scenario validation and frame rounding")
{
    auto s = quick_scenario();
    CHECK_NOTHROW(s.validate());

    // every grid in the chain divides the frame evenly
    const size_t fs = s.frame_symbols();
    CHECK(fs >= s.n_symbols);
    const double t_frame = static_cast<double>(fs) / s.baud;
    for (double rate : {s.tx.dac_rate, bench::kOpticalRate, s.rx.adc_rate,
                        s.baud * s.tx.sps}) {
        const double samples = t_frame * rate;
        CHECK(samples == doctest::Approx(std::round(samples)).epsilon(1e-12));
    }

    auto bad = s;
    bad.cores = {0, 9};
    CHECK_THROWS(bad.validate());
    bad = s;
    bad.rop_sweep = {};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("all committed presets load, validate, and carry the expected shapes")
{
    const char* names[] = {"b2b_50g", "b2b_56g", "b2b_64g", "b2b_70g",
                           "mcf1km_50g", "mcf1km_56g", "mcf10km_dcm_50g"};
    for (const char* n : names) {
        auto s = bench::Scenario::load(std::string(PRESETS_DIR) + "/" + n + ".json");
        CHECK_NOTHROW(s.validate());
        CHECK(s.n_symbols >= 65536);
        if (std::string(n).rfind("b2b", 0) == 0) {
            CHECK(s.mcf.length_m == 0.0);
            CHECK(s.cores == std::vector<int>{0});
        } else {
            CHECK(s.cores.size() == 7);
            CHECK(s.mcf.crosstalk_enabled);
        }
    }
    auto dcm = bench::Scenario::load(std::string(PRESETS_DIR) + "/mcf10km_dcm_50g.json");
    CHECK(dcm.mcf.length_m == 10000.0);
    CHECK(dcm.mcf.dcm_ps_nm == -159.0);
    CHECK(dcm.mcf.total_dispersion_ps_nm() == doctest::Approx(12.0));
}

TEST_CASE("characterization: back-to-back has no null, 1 km chirp-free null is predicted")
{
    auto s = quick_scenario();
    s.cores = {0};
    s.mcf.length_m = 0.0;
    s.mcf.fan_modules = false;
    s.mcf.crosstalk_enabled = false;
    s.mcf.ripple_max_db = 0.0;
    s.laser.kappa = 0.0;

    // B2B rolls off monotonically (no dispersion to carve a fading null)
    auto h_b2b = bench::characterize_link(s)[0];
    CHECK(vcsel::first_null_hz(h_b2b) == 0.0);

    // full-chain characterization finds the chirp-dispersion null close to
    // the closed form; TX/RX filtering skews the minimum slightly, so the
    // tolerance is looser than for the bare small-signal probe
    s.mcf.length_m = 1000.0;
    auto h_1km = bench::characterize_link(s)[0];
    const double null_hz = vcsel::first_null_hz(h_1km);
    const double predicted =
        fiberlink::predict_notch(s.laser.alpha_h, 17.1, s.laser.wavelength);
    CHECK(null_hz == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("notch report rows carry closed-form predictions")
{
    auto rows = bench::notch_report(0.0, {0.0, 17.1}, 1550e-9);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].predicted_hz == 0.0);
    CHECK(rows[0].simulated_hz == 0.0);  // no dispersion, no null
    CHECK(rows[1].predicted_hz == doctest::Approx(60.4e9).epsilon(0.1 / 60.4));

    auto rows12 = bench::notch_report(12.0, {17.1}, 1550e-9);
    CHECK(rows12[0].predicted_hz == doctest::Approx(13.9e9).epsilon(0.1 / 13.9));
    CHECK(rows12[0].simulated_hz ==
          doctest::Approx(rows12[0].predicted_hz).epsilon(0.02));
}

TEST_CASE("serial and parallel paths produce identical records")
{
    auto s = quick_scenario();
    auto a = bench::run_scenario(s, false);
    auto b = bench::run_scenario(s, true);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].core_idx == b.records[i].core_idx);
        CHECK(a.records[i].ber == b.records[i].ber);
        CHECK(a.records[i].bit_errors == b.records[i].bit_errors);
    }
    CHECK(a.aggregate_gbps == b.aggregate_gbps);
    // 2 cores x 100 Gb/s PAM-4
    CHECK(a.aggregate_gbps == doctest::Approx(200.0));
}

TEST_CASE("run_scenario is deterministic in the master seed")
{
    auto s = quick_scenario();
    s.cores = {0};
    auto a = bench::run_scenario(s);
    auto b = bench::run_scenario(s);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].ber == b.records[i].ber);

    s.master_seed += 1;
    auto c = bench::run_scenario(s);
    bool any_diff = false;
    for (size_t i = 0; i < a.records.size(); ++i)
        if (a.records[i].bit_errors != c.records[i].bit_errors)
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("amplifier noise dominates receiver noise at high received power")
{
    auto s = quick_scenario();
    s.cores = {0};
    s.rop_sweep = {7.0};
    auto noisy = bench::run_scenario(s).records[0];

    auto quiet_scn = s;
    quiet_scn.rx.noise_enabled = false;  // thermal + shot off; ASE stays
    auto quiet = bench::run_scenario(quiet_scn).records[0];
    REQUIRE(noisy.ber > 0.0);
    CHECK(quiet.ber > noisy.ber / 2.0);
    CHECK(quiet.ber < noisy.ber * 2.0);
}

TEST_CASE("tap sweep: zero taps means raw decisions, more taps help on fiber")
{
    auto s = quick_scenario();
    s.cores = {0};
    s.n_symbols = 8192;
    auto rows = bench::sweep_taps(s, 21);
    REQUIRE(!rows.empty());

    double ber_0 = -1.0;
    double best = 1.0;
    for (const auto& r : rows) {
        if (r.total_taps == 0)
            ber_0 = r.ber;
        best = std::min(best, r.ber);
        CHECK(r.total_taps == r.ff_taps + r.fb_taps);
    }
    REQUIRE(ber_0 >= 0.0);
    CHECK(best < ber_0);
}

TEST_CASE("rop sweep reports crossings inside the swept range")
{
    auto s = quick_scenario();
    s.cores = {0};
    s.n_symbols = 8192;
    s.rop_sweep = {-2.0, 0.0, 2.0, 4.0, 7.0};
    auto res = bench::sweep_rop(s);
    CHECK(res.records.size() == s.rop_sweep.size());
    REQUIRE(res.crossings.size() == 1);
    const auto& c = res.crossings[0];
    if (!std::isnan(c.rop_7pct_dbm)) {
        CHECK(c.rop_7pct_dbm >= -2.0);
        CHECK(c.rop_7pct_dbm <= 7.0);
    }
    // KP4 needs a lower BER, so its crossing sits at higher power
    if (!std::isnan(c.rop_7pct_dbm) && !std::isnan(c.rop_kp4_dbm))
        CHECK(c.rop_kp4_dbm >= c.rop_7pct_dbm);
}

TEST_CASE("csv and manifest outputs are written and non-trivial")
{
    auto s = quick_scenario();
    s.cores = {0};
    s.n_symbols = 4096;
    auto res = bench::run_scenario(s);

    const std::string rec_path = "/tmp/linksim_records_test.csv";
    bench::save_records_csv(res.records, rec_path);
    std::ifstream in(rec_path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.find("ber") != std::string::npos);
    size_t lines = 0;
    for (std::string l; std::getline(in, l);)
        if (!l.empty())
            ++lines;
    CHECK(lines == res.records.size());

    const std::string man_path = "/tmp/linksim_manifest_test.json";
    bench::write_manifest(s, man_path);
    std::ifstream man(man_path);
    REQUIRE(man.good());
    std::string text((std::istreambuf_iterator<char>(man)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("hash") != std::string::npos);
    CHECK(text.find(s.name) != std::string::npos);
    std::remove(rec_path.c_str());
    std::remove(man_path.c_str());
}
