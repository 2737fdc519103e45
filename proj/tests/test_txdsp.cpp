#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "linksim/fft.hpp"
#include "linksim/sigkit.hpp"
#include "linksim/txdsp.hpp"

using namespace linksim;
using std::numbers::pi;

TEST_CASE("prbs15 period, balance and reference sequence")
{
    const size_t period = 32767;
    auto bits = txdsp::prbs15(0x5aa5, 2 * period);
    for (size_t i = 0; i < period; ++i)
        REQUIRE(bits[i] == bits[i + period]);

    size_t ones = 0;
    for (size_t i = 0; i < period; ++i)
        ones += bits[i];
    CHECK(ones == 16384);

    // independent 5-line LFSR oracle, x^15 + x^14 + 1
    uint16_t state = 0x7fff;
    auto ref = txdsp::prbs15(0x7fff, 30);
    for (size_t i = 0; i < 30; ++i) {
        const uint16_t fb = ((state >> 14) ^ (state >> 13)) & 1u;
        const uint16_t out = (state >> 14) & 1u;
        state = static_cast<uint16_t>(((state << 1) | fb) & 0x7fff);
        CHECK(ref[i] == out);
    }

    CHECK_THROWS(txdsp::prbs15(0, 10));
}

TEST_CASE("prbs15 cyclic autocorrelation is two-valued")
{
    const size_t period = 32767;
    auto bits = txdsp::prbs15(0x0001, period);
    std::vector<int> s(period);
    for (size_t i = 0; i < period; ++i)
        s[i] = bits[i] ? 1 : -1;

    auto corr = [&](size_t lag) {
        long long acc = 0;
        for (size_t i = 0; i < period; ++i)
            acc += s[i] * s[(i + lag) % period];
        return acc;
    };
    CHECK(corr(0) == 32767);
    std::mt19937_64 eng(42);
    std::uniform_int_distribution<size_t> lag(1, period - 1);
    for (int i = 0; i < 40; ++i)
        CHECK(corr(lag(eng)) == -1);
    CHECK(corr(1) == -1);
    CHECK(corr(period - 1) == -1);
}

TEST_CASE("gray pam4 map, adjacency and round trip")
{
    auto syms = txdsp::map_pam4({0, 0, 0, 1, 1, 1, 1, 0});
    REQUIRE(syms.size() == 4);
    CHECK(syms[0] == -3.0);
    CHECK(syms[1] == -1.0);
    CHECK(syms[2] == +1.0);
    CHECK(syms[3] == +3.0);

    // adjacent levels differ in exactly one bit, exhaustively
    auto label = [](double level) {
        auto b = txdsp::demap_pam4({level});
        return (b[0] << 1) | b[1];
    };
    const double levels[] = {-3.0, -1.0, 1.0, 3.0};
    for (int i = 0; i + 1 < 4; ++i) {
        const int diff = label(levels[i]) ^ label(levels[i + 1]);
        CHECK((diff == 1 || diff == 2));
        CHECK((diff & (diff - 1)) == 0);  // exactly one bit
    }

    std::mt19937_64 eng(1);
    std::vector<uint8_t> bits(2000);
    for (auto& b : bits)
        b = static_cast<uint8_t>(eng() & 1);
    CHECK(txdsp::demap_pam4(txdsp::map_pam4(bits)) == bits);
    CHECK_THROWS(txdsp::map_pam4({1}));
}

TEST_CASE("raised cosine shaping is ISI-free at symbol centers")
{
    txdsp::TxConfig cfg;
    cfg.baud = 50e9;

    std::vector<double> impulse(256, 0.0);
    impulse[100] = 1.0;
    auto w = txdsp::pulse_shape(impulse, cfg);
    REQUIRE(w.size() == 256 * static_cast<size_t>(cfg.sps));
    CHECK(w.samples[100 * cfg.sps] == doctest::Approx(1.0).epsilon(1e-6));
    for (size_t k = 0; k < 256; ++k) {
        if (k == 100)
            continue;
        CHECK(std::abs(w.samples[k * cfg.sps]) < 1e-6);
    }

    std::mt19937_64 eng(3);
    std::vector<uint8_t> bits(2 * 512);
    for (auto& b : bits)
        b = static_cast<uint8_t>(eng() & 1);
    auto syms = txdsp::map_pam4(bits);
    auto shaped = txdsp::pulse_shape(syms, cfg);
    for (size_t k = 0; k < syms.size(); ++k)
        CHECK(shaped.samples[k * cfg.sps] == doctest::Approx(syms[k]).epsilon(1e-6));
}

TEST_CASE("raised cosine spectrum dies past the band edge")
{
    txdsp::TxConfig cfg;
    cfg.baud = 50e9;
    std::mt19937_64 eng(4);
    std::vector<uint8_t> bits(2 * 4096);
    for (auto& b : bits)
        b = static_cast<uint8_t>(eng() & 1);
    auto w = txdsp::pulse_shape(txdsp::map_pam4(bits), cfg);

    auto spec = fft::rfft(w.samples);
    const double df = w.sample_rate / static_cast<double>(w.size());
    double in_band = 0.0, out_band = 0.0;
    for (size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        const double mag = std::abs(spec[k]);
        if (f < 0.575 * cfg.baud)
            in_band = std::max(in_band, mag);
        else if (f > 0.60 * cfg.baud)  // clear of the edge bin itself
            out_band = std::max(out_band, mag);
    }
    CHECK(20.0 * std::log10(out_band / in_band) < -60.0);
}

namespace {

// synthetic low-pass-free channel with a Gaussian notch
sigkit::FrequencyResponse notch_channel(double notch_db, double f_notch, double f_max)
{
    const size_t n = 1024;
    std::vector<double> f(n);
    std::vector<std::complex<double>> g(n);
    const double floor_lin = std::pow(10.0, notch_db / 20.0);
    for (size_t i = 0; i < n; ++i) {
        f[i] = f_max * static_cast<double>(i) / static_cast<double>(n - 1);
        const double d = (f[i] - f_notch) / 1.5e9;
        const double dip_db = notch_db * std::exp(-d * d);
        g[i] = std::pow(10.0, dip_db / 20.0);
        (void)floor_lin;
    }
    return {std::move(f), std::move(g)};
}

}  // namespace

TEST_CASE("pre-equalizer inverts a notch and stays flat on identity")
{
    auto flat = sigkit::FrequencyResponse::identity(0.0, 46e9);
    auto p0 = txdsp::design_preequalizer(flat, 26e9);
    for (size_t i = 0; i < p0.size(); ++i)
        if (p0.freqs[i] <= 26e9)
            CHECK(std::abs(p0.gains[i]) == doctest::Approx(1.0).epsilon(1e-6));

    auto ch = notch_channel(-30.0, 23e9, 46e9);
    auto pre = txdsp::design_preequalizer(ch, 26e9);
    const double dc_db = 20.0 * std::log10(std::abs(pre.at(0.0)));
    const double peak_db = 20.0 * std::log10(std::abs(pre.at(23e9)));
    CHECK(peak_db - dc_db == doctest::Approx(30.0).epsilon(0.02));
}

TEST_CASE("composite channel x pre-eq is flat below cutoff")
{
    auto ch = notch_channel(-22.0, 18e9, 46e9);
    auto pre = txdsp::design_preequalizer(ch, 26e9);
    double lo = 1e9, hi = -1e9;
    for (double f = 0.0; f <= 26e9; f += 0.5e9) {
        const double mag_db = 20.0 * std::log10(std::abs(ch.at(f) * pre.at(f)));
        lo = std::min(lo, mag_db);
        hi = std::max(hi, mag_db);
    }
    CHECK(hi - lo < 1.0);  // +-0.5 dB about the mean
}

TEST_CASE("deeper notch means lower low-frequency drive after full-scale normalization")
{
    txdsp::TxConfig cfg;
    cfg.baud = 50e9;
    std::mt19937_64 eng(9);
    std::vector<uint8_t> bits(2 * 4096);
    for (auto& b : bits)
        b = static_cast<uint8_t>(eng() & 1);
    auto shaped = txdsp::pulse_shape(txdsp::map_pam4(bits), cfg);
    auto x = sigkit::resample(shaped, cfg.dac_rate);

    auto low_freq_mag = [&](double notch_db) {
        auto pre = txdsp::design_preequalizer(notch_channel(notch_db, 23e9, 46e9), 26e9);
        auto drive = txdsp::apply_preeq_and_dac(x, pre, cfg);
        auto spec = fft::rfft(drive.samples);
        const double df = drive.sample_rate / static_cast<double>(drive.size());
        double acc = 0.0;
        size_t cnt = 0;
        for (size_t k = 1; k < spec.size(); ++k) {
            const double f = static_cast<double>(k) * df;
            if (f > 0.5e9 && f < 5e9) {
                acc += std::abs(spec[k]);
                ++cnt;
            }
        }
        return acc / static_cast<double>(cnt);
    };
    CHECK(low_freq_mag(-30.0) < low_freq_mag(-22.0));
}

TEST_CASE("dac path: zero in, zero out; peak maps to drive_vpp/2")
{
    txdsp::TxConfig cfg;
    cfg.baud = 50e9;
    auto pre = sigkit::FrequencyResponse::identity(0.0, cfg.dac_rate / 2.0);

    sigkit::Waveform zero(std::vector<double>(4600, 0.0), cfg.dac_rate);
    auto z = txdsp::apply_preeq_and_dac(zero, pre, cfg);
    for (double v : z.samples)
        CHECK(v == doctest::Approx(0.0));

    std::mt19937_64 eng(5);
    std::vector<uint8_t> bits(2 * 2048);
    for (auto& b : bits)
        b = static_cast<uint8_t>(eng() & 1);
    auto shaped = txdsp::pulse_shape(txdsp::map_pam4(bits), cfg);
    auto x = sigkit::resample(shaped, cfg.dac_rate);
    cfg.clip_quantile = 1.0;  // exact peak normalization for this check
    auto drive = txdsp::apply_preeq_and_dac(x, pre, cfg);
    double peak = 0.0;
    for (double v : drive.samples)
        peak = std::max(peak, std::abs(v));
    // quantizer + Bessel roll-off keep the analog peak at/just below full scale
    CHECK(peak <= 0.350 * 1.02);
    CHECK(peak > 0.350 * 0.9);
}

TEST_CASE("uniform quantizer: SQNR, symmetry, monotonicity")
{
    const double fs = 1.0;
    const int bits = 8;
    const size_t n = 65536;
    double sig = 0.0, err = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double x = std::sin(2.0 * pi * 517.0 * static_cast<double>(i) /
                                  static_cast<double>(n));
        const double q = txdsp::quantize_uniform(x, fs, bits);
        sig += x * x;
        err += (q - x) * (q - x);
    }
    const double sqnr_db = 10.0 * std::log10(sig / err);
    CHECK(sqnr_db == doctest::Approx(49.9).epsilon(1.0 / 49.9));

    double prev = -2.0;
    for (double x = -1.2; x <= 1.2; x += 1e-3) {
        const double q = txdsp::quantize_uniform(x, fs, bits);
        CHECK(q >= prev);
        prev = q;
        CHECK(txdsp::quantize_uniform(-x, fs, bits) == doctest::Approx(-q));
    }
}

TEST_CASE("tx config validation")
{
    txdsp::TxConfig cfg;
    cfg.baud = 50e9;
    CHECK_NOTHROW(cfg.validate());
    txdsp::TxConfig bad = cfg;
    bad.rolloff = 1.5;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.baud = 200e9;  // violates baud*(1+rolloff)/2 < dac_rate/2
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.clip_quantile = 0.0;
    CHECK_THROWS(bad.validate());
}
