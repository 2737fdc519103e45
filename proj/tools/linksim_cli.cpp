// Command-line front end: scenario files in, CSV artifacts out.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linksim/bench.hpp"

namespace fs = std::filesystem;
using namespace linksim;

namespace {

struct CommonOpts {
    std::string out_dir = "out";
    int64_t seed = -1;
    int64_t symbols = -1;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the scenario master seed");
    cmd->add_option("--symbols", opts.symbols, "override the scenario symbol count");
    cmd->add_flag("--serial", opts.serial, "disable the parallel executor");
}

bench::Scenario load_scenario(const std::string& path, const CommonOpts& opts)
{
    auto s = bench::Scenario::load(path);
    if (opts.seed >= 0)
        s.master_seed = static_cast<uint64_t>(opts.seed);
    if (opts.symbols > 0)
        s.n_symbols = static_cast<size_t>(opts.symbols);
    s.validate();
    fs::create_directories(opts.out_dir);
    return s;
}

std::string join(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

void write_eyes(const bench::ScenarioResult& res, const std::string& dir)
{
    for (size_t i = 0; i < res.eyes.size(); ++i)
        res.eyes[i].save_csv(join(dir, "eye_core" + std::to_string(res.eye_cores[i]) + ".csv"));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PAM-4 optical link simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    CommonOpts opts;

    auto* c_char = app.add_subcommand("characterize", "measure per-core end-to-end responses");
    c_char->add_option("scenario", scenario_path, "scenario JSON")->required();
    add_common(c_char, opts);

    auto* c_run = app.add_subcommand("run", "full BER run over the scenario grid");
    c_run->add_option("scenario", scenario_path, "scenario JSON")->required();
    add_common(c_run, opts);

    auto* c_rop = app.add_subcommand("sweep-rop", "BER waterfall with FEC crossings");
    c_rop->add_option("scenario", scenario_path, "scenario JSON")->required();
    add_common(c_rop, opts);

    auto* c_taps = app.add_subcommand("sweep-taps", "BER vs equalizer tap budget");
    int max_taps = 21;
    c_taps->add_option("scenario", scenario_path, "scenario JSON")->required();
    c_taps->add_option("--max-taps", max_taps, "largest total tap count");
    add_common(c_taps, opts);

    auto* c_notch = app.add_subcommand("notch", "predicted vs simulated fading notches");
    double alpha = 12.0;
    std::vector<double> dispersions;
    double wavelength = 1550e-9;
    c_notch->add_option("--alpha", alpha, "linewidth enhancement factor")->required();
    c_notch->add_option("--dispersion", dispersions, "total dispersion values, ps/nm")
        ->required()
        ->delimiter(',');
    c_notch->add_option("--wavelength", wavelength, "carrier wavelength, m");
    c_notch->add_option("--out", opts.out_dir, "output directory");

    auto* c_eye = app.add_subcommand("eye", "eye diagram for one (core, RoP) leg");
    int eye_core = 0;
    double eye_rop = 7.0;
    c_eye->add_option("scenario", scenario_path, "scenario JSON")->required();
    c_eye->add_option("--core", eye_core, "core index")->required();
    c_eye->add_option("--rop", eye_rop, "received optical power, dBm")->required();
    add_common(c_eye, opts);

    CLI11_PARSE(app, argc, argv);
    const bool parallel = !opts.serial;

    try {
        if (c_char->parsed()) {
            auto s = load_scenario(scenario_path, opts);
            auto responses = bench::characterize_link(s, parallel);
            for (size_t i = 0; i < responses.size(); ++i)
                sigkit::save_response_csv(
                    responses[i], join(opts.out_dir, "s21_core" + std::to_string(s.cores[i]) + ".csv"));
            bench::write_manifest(s, join(opts.out_dir, "manifest.json"));
            std::printf("wrote %zu core responses to %s\n", responses.size(), opts.out_dir.c_str());
        } else if (c_run->parsed()) {
            auto s = load_scenario(scenario_path, opts);
            auto res = bench::run_scenario(s, parallel);
            bench::save_records_csv(res.records, join(opts.out_dir, "records.csv"));
            write_eyes(res, opts.out_dir);
            bench::write_manifest(s, join(opts.out_dir, "manifest.json"));
            size_t pass = 0;
            for (const auto& r : res.records)
                pass += r.fec_7pct_pass ? 1 : 0;
            std::printf("aggregate %.0f Gb/s raw; %zu/%zu legs under the 7%% OH-HDFEC limit\n",
                        res.aggregate_gbps, pass, res.records.size());
        } else if (c_rop->parsed()) {
            auto s = load_scenario(scenario_path, opts);
            auto res = bench::sweep_rop(s, parallel);
            bench::save_records_csv(res.records, join(opts.out_dir, "records.csv"));
            {
                std::FILE* f = std::fopen(join(opts.out_dir, "crossings.csv").c_str(), "w");
                std::fprintf(f, "core,rop_7pct_dbm,rop_kp4_dbm\n");
                for (const auto& c : res.crossings)
                    std::fprintf(f, "%d,%g,%g\n", c.core_idx, c.rop_7pct_dbm, c.rop_kp4_dbm);
                std::fclose(f);
            }
            bench::write_manifest(s, join(opts.out_dir, "manifest.json"));
            for (const auto& c : res.crossings)
                std::printf("core %d: 7%%-OH crossing %.2f dBm, KP4 crossing %.2f dBm\n",
                            c.core_idx, c.rop_7pct_dbm, c.rop_kp4_dbm);
        } else if (c_taps->parsed()) {
            auto s = load_scenario(scenario_path, opts);
            auto rows = bench::sweep_taps(s, max_taps, parallel);
            bench::save_tap_sweep_csv(rows, join(opts.out_dir, "tap_sweep.csv"));
            bench::write_manifest(s, join(opts.out_dir, "manifest.json"));
            std::printf("wrote %zu tap-sweep rows to %s\n", rows.size(), opts.out_dir.c_str());
        } else if (c_notch->parsed()) {
            fs::create_directories(opts.out_dir);
            auto rows = bench::notch_report(alpha, dispersions, wavelength);
            bench::save_notch_csv(rows, join(opts.out_dir, "notch.csv"));
            for (const auto& r : rows)
                std::printf("D=%7.1f ps/nm  predicted %6.2f GHz  simulated %6.2f GHz (%.1f dB)\n",
                            r.d_total_ps_nm, r.predicted_hz / 1e9, r.simulated_hz / 1e9,
                            r.simulated_depth_db);
        } else if (c_eye->parsed()) {
            auto s = load_scenario(scenario_path, opts);
            s.cores = {eye_core};
            s.rop_sweep = {eye_rop};
            auto res = bench::run_scenario(s, parallel);
            write_eyes(res, opts.out_dir);
            std::printf("wrote eye_core%d.csv to %s\n", eye_core, opts.out_dir.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
