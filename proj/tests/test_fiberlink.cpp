#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "linksim/fiberlink.hpp"
#include "linksim/sigkit.hpp"

using namespace linksim;
using std::numbers::pi;

namespace {

sigkit::OpticalField random_field(size_t n, double rate, uint64_t seed)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> s(n);
    for (auto& x : s)
        x = {1e-2 * g(eng), 1e-2 * g(eng)};
    return sigkit::OpticalField(std::move(s), rate, 1550e-9);
}

double energy(const sigkit::OpticalField& f)
{
    double e = 0.0;
    for (const auto& x : f.samples)
        e += std::norm(x);
    return e;
}

}  // namespace

TEST_CASE("dispersion phase at a known point")
{
    // theta(f) = pi lambda^2 D f^2 / c; at 26 GHz, 17.1 ps/nm, 1550 nm:
    // pi * (1550e-9)^2 * 17.1e-6 * (26e9)^2 / c = 0.291 rad
    auto h = fiberlink::dispersion_response(17.1, 1550e-9, {26e9});
    const double theta = std::abs(std::arg(h.gains[0]));
    CHECK(theta == doctest::Approx(0.2910).epsilon(0.001 / 0.291));
    CHECK(std::abs(h.gains[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dispersion operator is unitary and invertible")
{
    auto f0 = random_field(8192, 184e9, 21);
    auto fwd = fiberlink::apply_dispersion(f0, 17.1);
    CHECK(energy(fwd) == doctest::Approx(energy(f0)).epsilon(1e-9));

    auto back = fiberlink::apply_dispersion(fwd, -17.1);
    double worst = 0.0;
    for (size_t i = 0; i < f0.size(); ++i)
        worst = std::max(worst, std::abs(back.samples[i] - f0.samples[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("10 km with -159 ps/nm module matches a 12 ps/nm link")
{
    // 10 km * 17.1 + (-159) = 12 ps/nm total
    std::vector<double> freqs;
    for (double f = -46e9; f <= 46e9; f += 0.5e9)
        freqs.push_back(f);
    auto a = fiberlink::dispersion_response(10.0 * 17.1 - 159.0, 1550e-9, freqs);
    auto b = fiberlink::dispersion_response(12.0, 1550e-9, freqs);
    for (size_t i = 0; i < freqs.size(); ++i)
        CHECK(std::abs(a.gains[i] - b.gains[i]) < 1e-9);

    // virtual length 12 / 17.1 = 0.7018 km
    CHECK(12.0 / 17.1 == doctest::Approx(0.702).epsilon(0.005));
}

TEST_CASE("closed-form notch prediction")
{
    CHECK(fiberlink::predict_notch(0.0, 17.1, 1550e-9) ==
          doctest::Approx(60.4e9).epsilon(0.1 / 60.4));
    CHECK(fiberlink::predict_notch(12.0, 17.1, 1550e-9) ==
          doctest::Approx(13.9e9).epsilon(0.1 / 13.9));

    // dispersion ratio enters as 1/sqrt(D), independent of alpha
    const double want = std::sqrt(17.1 / 12.0);
    for (double a : {0.0, 1.0, 3.0, 12.0, 30.0}) {
        const double r = fiberlink::predict_notch(a, 12.0, 1550e-9) /
                         fiberlink::predict_notch(a, 17.1, 1550e-9);
        CHECK(r == doctest::Approx(want).epsilon(1e-3));
        CHECK(r == doctest::Approx(1.194).epsilon(1e-3));
    }

    // monotone: larger alpha and larger dispersion both lower the null
    CHECK(fiberlink::predict_notch(3.0, 17.1, 1550e-9) <
          fiberlink::predict_notch(0.0, 17.1, 1550e-9));
    CHECK(fiberlink::predict_notch(12.0, 34.2, 1550e-9) <
          fiberlink::predict_notch(12.0, 17.1, 1550e-9));
}

TEST_CASE("attenuation and fan losses: 1 km end-to-end power budget")
{
    fiberlink::McfParams p;
    p.length_m = 1000.0;
    p.ripple_max_db = 0.0;
    p.crosstalk_enabled = false;

    auto f0 = random_field(8192, 184e9, 33);
    auto out = fiberlink::propagate_core(f0, p, 0);
    // 0.2 dB fiber + 2 * 1.5 dB fan modules = 3.2 dB
    const double loss_db = 10.0 * std::log10(energy(f0) / energy(out));
    CHECK(loss_db == doctest::Approx(3.2).epsilon(0.05 / 3.2));

    fiberlink::McfParams bare = p;
    bare.fan_modules = false;
    auto out2 = fiberlink::propagate_core(f0, bare, 0);
    const double loss2_db = 10.0 * std::log10(energy(f0) / energy(out2));
    CHECK(loss2_db == doctest::Approx(0.2).epsilon(0.05 / 0.2));
}

TEST_CASE("zero-length bare link is the identity")
{
    fiberlink::McfParams p;
    p.length_m = 0.0;
    p.ripple_max_db = 0.0;
    p.fan_modules = false;
    p.crosstalk_enabled = false;

    auto f0 = random_field(4096, 184e9, 5);
    auto out = fiberlink::propagate_core(f0, p, 0);
    double worst = 0.0;
    for (size_t i = 0; i < f0.size(); ++i)
        worst = std::max(worst, std::abs(out.samples[i] - f0.samples[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("core ripple: bounded, deterministic, distinct per core")
{
    fiberlink::McfParams p;
    p.ripple_max_db = 0.75;
    p.variation_seed = 7;

    auto r1 = fiberlink::core_ripple(p, 3, 35e9);
    auto r1b = fiberlink::core_ripple(p, 3, 35e9);
    REQUIRE(r1.size() == r1b.size());
    bool differs_from_core0 = false;
    auto r0 = fiberlink::core_ripple(p, 0, 35e9);
    for (size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1.gains[i] == r1b.gains[i]);
        const double db = 20.0 * std::log10(std::abs(r1.gains[i]));
        CHECK(std::abs(db) <= 0.75 + 1e-9);
        if (std::abs(r1.gains[i] - r0.gains[i]) > 1e-6)
            differs_from_core0 = true;
    }
    CHECK(differs_from_core0);

    fiberlink::McfParams flat = p;
    flat.ripple_max_db = 0.0;
    auto rf = fiberlink::core_ripple(flat, 3, 35e9);
    for (size_t i = 0; i < rf.size(); ++i)
        CHECK(std::abs(rf.gains[i]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("crosstalk: off is identity, level scales with length")
{
    fiberlink::McfParams p;
    p.length_m = 10000.0;
    p.ripple_max_db = 0.0;

    std::vector<sigkit::OpticalField> fields;
    // only the center core carries light; neighbors receive leakage
    for (int k = 0; k < 7; ++k) {
        if (k == 0)
            fields.push_back(random_field(8192, 184e9, 101));
        else
            fields.push_back(
                sigkit::OpticalField(std::vector<std::complex<double>>(8192, 0.0), 184e9, 1550e-9));
    }

    fiberlink::McfParams off = p;
    off.crosstalk_enabled = false;
    auto same = fiberlink::add_crosstalk(fields, off, 1);
    for (int k = 0; k < 7; ++k)
        for (size_t i = 0; i < 8192; ++i)
            CHECK(same[k].samples[i] == fields[k].samples[i]);

    auto mixed = fiberlink::add_crosstalk(fields, p, 1);
    // center-to-neighbor leakage: -45 dB per 100 km * 0.1 -> -55 dB at 10 km
    const double e_src = energy(fields[0]);
    for (int k = 1; k < 7; ++k) {
        const double xt_db = 10.0 * std::log10(energy(mixed[k]) / e_src);
        CHECK(xt_db == doctest::Approx(-55.0).epsilon(0.2 / 55.0));
    }

    // leakage is tiny, so total power is conserved to first order
    double e_in = 0.0, e_out = 0.0;
    for (int k = 0; k < 7; ++k) {
        e_in += energy(fields[k]);
        e_out += energy(mixed[k]);
    }
    CHECK(e_out == doctest::Approx(e_in).epsilon(1e-3));
}

TEST_CASE("parameter validation")
{
    fiberlink::McfParams p;
    CHECK_NOTHROW(p.validate());
    fiberlink::McfParams bad = p;
    bad.n_cores = 0;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.length_m = -1.0;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.ripple_max_db = -0.1;
    CHECK_THROWS(bad.validate());
}
