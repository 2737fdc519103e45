#include "linksim/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "linksim/fft.hpp"
#include "linksim/txdsp.hpp"

namespace linksim::rxdsp {

void EqConfig::validate() const
{
    if (ff_taps < 0 || fb_taps < 0)
        throw std::invalid_argument("EqConfig: negative tap count");
    if (!bypassed() && (step_mu <= 0.0 || step_mu >= 1.0))
        throw std::invalid_argument("EqConfig: step_mu outside (0,1)");
    if (!bypassed() && train_len < 10 * (ff_taps + fb_taps))
        throw std::invalid_argument("EqConfig: train_len < 10 * (ff_taps + fb_taps)");
}

namespace {

constexpr double kSyncSps = 8.0;
constexpr double kSyncThreshold = 0.2;

// Cyclic cross-correlation via FFT; returns (best_shift, peak) of
// sum_n a[n+shift] * b[n].
std::pair<size_t, double> best_cyclic_shift(const std::vector<double>& a,
                                            const std::vector<double>& b)
{
    const size_t n = a.size();
    std::vector<std::complex<double>> ca(n), cb(n);
    for (size_t i = 0; i < n; ++i) {
        ca[i] = a[i];
        cb[i] = b[i];
    }
    auto fa = fft::fft(ca);
    auto fb = fft::fft(cb);
    for (size_t i = 0; i < n; ++i)
        fa[i] = fa[i] * std::conj(fb[i]);
    auto corr = fft::ifft(fa);
    size_t best = 0;
    double peak = corr[0].real();
    for (size_t i = 1; i < n; ++i) {
        if (corr[i].real() > peak) {
            peak = corr[i].real();
            best = i;
        }
    }
    return {best, peak};
}

double nearest_level(double v)
{
    if (v < -2.0) return -3.0;
    if (v < 0.0) return -1.0;
    if (v < 2.0) return 1.0;
    return 3.0;
}

}  // namespace

SyncResult synchronize(const sigkit::Waveform& capture,
                       const std::vector<double>& reference, double baud,
                       double aa_cutoff_hz)
{
    if (reference.size() < 2)
        throw std::invalid_argument("synchronize: reference too short");
    auto dense = sigkit::resample(capture, kSyncSps * baud);
    {
        // Anti-alias before symbol-spaced decimation: everything above
        // the shaped band is pure noise that would fold in-band.
        auto spec = fft::rfft(dense.samples);
        const double df = dense.sample_rate / static_cast<double>(dense.size());
        const double cutoff = aa_cutoff_hz > 0.0 ? aa_cutoff_hz : 0.625 * baud;
        for (size_t k = 0; k < spec.size(); ++k)
            if (static_cast<double>(k) * df > cutoff)
                spec[k] = 0.0;
        dense.samples = fft::irfft(spec, dense.size());
    }
    const size_t sps = static_cast<size_t>(kSyncSps);
    if (dense.size() % sps != 0 || dense.size() / sps != reference.size())
        throw std::invalid_argument(
            "synchronize: capture length does not cover the reference frame");
    const size_t n_sym = reference.size();

    double ref_mean = std::accumulate(reference.begin(), reference.end(), 0.0) /
                      static_cast<double>(n_sym);
    std::vector<double> ref0(n_sym);
    double ref_energy = 0.0;
    for (size_t i = 0; i < n_sym; ++i) {
        ref0[i] = reference[i] - ref_mean;
        ref_energy += ref0[i] * ref0[i];
    }

    size_t best_phase = 0, best_shift = 0;
    double best_corr = -1.0;
    for (size_t p = 0; p < sps; ++p) {
        std::vector<double> x(n_sym);
        double mean = 0.0;
        for (size_t i = 0; i < n_sym; ++i)
            mean += dense.samples[i * sps + p];
        mean /= static_cast<double>(n_sym);
        double energy = 0.0;
        for (size_t i = 0; i < n_sym; ++i) {
            x[i] = dense.samples[i * sps + p] - mean;
            energy += x[i] * x[i];
        }
        if (energy <= 0.0)
            continue;
        auto [shift, peak] = best_cyclic_shift(x, ref0);
        const double norm = peak / std::sqrt(energy * ref_energy);
        if (norm > best_corr) {
            best_corr = norm;
            best_phase = p;
            best_shift = shift;
        }
    }
    if (best_corr < kSyncThreshold) {
        std::ostringstream msg;
        msg << "synchronize: correlation peak " << best_corr
            << " below significance threshold " << kSyncThreshold;
        throw std::runtime_error(msg.str());
    }

    SyncResult result;
    result.offset_symbols = best_shift;
    result.peak_correlation = best_corr;
    result.symbol_rate.resize(n_sym);
    result.half_rate.resize(2 * n_sym);
    const size_t total = dense.size();
    for (size_t i = 0; i < n_sym; ++i) {
        const size_t base = ((i + best_shift) % n_sym) * sps + best_phase;
        result.symbol_rate[i] = dense.samples[base % total];
        result.half_rate[2 * i] = dense.samples[base % total];
        result.half_rate[2 * i + 1] = dense.samples[(base + sps / 2) % total];
    }
    return result;
}

EqualizeResult equalize(const std::vector<double>& x, const std::vector<double>& reference,
                        const EqConfig& cfg)
{
    cfg.validate();
    const size_t n_sym = reference.size();
    const size_t sps_in = cfg.ff_spacing == TapSpacing::HalfSymbol ? 2 : 1;
    if (x.size() != n_sym * sps_in)
        throw std::invalid_argument("equalize: input length does not match reference");

    // Affine normalization from training statistics.
    const size_t train = std::min<size_t>(cfg.train_len > 0 ? cfg.train_len : n_sym, n_sym);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < train; ++i) {
        const double xi = x[i * sps_in];
        sx += xi;
        sy += reference[i];
        sxx += xi * xi;
        sxy += xi * reference[i];
    }
    const double nn = static_cast<double>(train);
    const double den = nn * sxx - sx * sx;
    const double a = den != 0.0 ? (nn * sxy - sx * sy) / den : 1.0;
    const double b = (sy - a * sx) / nn;
    std::vector<double> z(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        z[i] = a * x[i] + b;

    EqualizeResult result;
    result.estimates.resize(n_sym);

    if (cfg.bypassed()) {
        for (size_t i = 0; i < n_sym; ++i)
            result.estimates[i] = z[i * sps_in];
        return result;
    }

    const int nf = std::max(cfg.ff_taps, 1);
    std::vector<double> w(nf, 0.0);
    const int center = nf / 2;
    w[center] = 1.0;
    std::vector<double> fb(cfg.fb_taps, 0.0);
    std::vector<double> decisions(n_sym, 0.0);

    const size_t total = z.size();
    double first_block_mse = -1.0;
    double block_err = 0.0;
    size_t block_count = 0;
    const size_t block = 500;

    for (size_t nsym = 0; nsym < n_sym; ++nsym) {
        const bool training = nsym < train;
        const bool adapt = training || cfg.mode == EqMode::DecisionDirected;

        double y = 0.0;
        const long base = static_cast<long>(nsym * sps_in);
        if (cfg.ff_taps > 0) {
            for (int k = 0; k < nf; ++k) {
                const long idx = base + k - center;
                y += w[k] * z[((idx % static_cast<long>(total)) + total) % total];
            }
        } else {
            y = z[nsym * sps_in];
        }
        for (int m = 0; m < cfg.fb_taps; ++m) {
            const size_t j = (nsym + n_sym - 1 - m) % n_sym;
            const double past = (j < nsym) ? decisions[j]
                                           : (training ? reference[j] : 0.0);
            y -= fb[m] * past;
        }

        result.estimates[nsym] = y;
        const double target = training ? reference[nsym] : nearest_level(y);
        decisions[nsym] = target;
        const double e = target - y;

        if (adapt) {
            if (cfg.ff_taps > 0) {
                for (int k = 0; k < nf; ++k) {
                    const long idx = base + k - center;
                    w[k] += cfg.step_mu * e *
                            z[((idx % static_cast<long>(total)) + total) % total];
                }
            }
            for (int m = 0; m < cfg.fb_taps; ++m) {
                const size_t j = (nsym + n_sym - 1 - m) % n_sym;
                const double past = (j < nsym) ? decisions[j]
                                               : (training ? reference[j] : 0.0);
                fb[m] -= cfg.step_mu * e * past;
            }
        }

        if (training) {
            block_err += e * e;
            if (++block_count == block || nsym + 1 == train) {
                const double mse = block_err / static_cast<double>(block_count);
                result.train_mse.push_back(mse);
                if (first_block_mse < 0.0)
                    first_block_mse = mse;
                else if (mse > 10.0 * first_block_mse && mse > 1.0) {
                    std::ostringstream msg;
                    msg << "equalize: divergence detected (training MSE grew from "
                        << first_block_mse << " to " << mse << " at step_mu="
                        << cfg.step_mu << ")";
                    throw std::runtime_error(msg.str());
                }
                block_err = 0.0;
                block_count = 0;
            }
        }
    }
    return result;
}

std::vector<uint8_t> decide_and_demap(const std::vector<double>& estimates)
{
    std::vector<double> decided(estimates.size());
    for (size_t i = 0; i < estimates.size(); ++i)
        decided[i] = nearest_level(estimates[i]);
    return txdsp::demap_pam4(decided);
}

BerCount count_ber(const std::vector<uint8_t>& bits, const std::vector<uint8_t>& reference)
{
    if (bits.size() != reference.size() || bits.empty())
        throw std::invalid_argument("count_ber: length mismatch or empty");
    const size_t n = bits.size();

    // Agreement via FFT correlation of +-1 sequences over all cyclic
    // bit shifts (covers the 2-bit PAM alignment ambiguity).
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = bits[i] ? 1.0 : -1.0;
        b[i] = reference[i] ? 1.0 : -1.0;
    }
    auto [shift, peak] = best_cyclic_shift(a, b);

    size_t errors = 0;
    for (size_t i = 0; i < n; ++i)
        errors += bits[(i + shift) % n] != reference[i] ? 1u : 0u;
    if (static_cast<double>(errors) >= 0.4 * static_cast<double>(n))
        throw std::runtime_error("count_ber: unalignable (best alignment >= 40% errors)");
    BerCount c;
    c.bits_compared = n;
    c.bit_errors = errors;
    c.ber = static_cast<double>(errors) / static_cast<double>(n);
    c.alignment_shift = shift;
    return c;
}

FecVerdict fec_verdict(double ber)
{
    if (ber < 0.0 || ber > 1.0)
        throw std::invalid_argument("fec_verdict: ber outside [0,1]");
    return {ber <= 3.8e-3, ber <= 2.4e-4};
}

uint64_t EyeDiagram::total() const
{
    uint64_t t = 0;
    for (auto c : counts)
        t += c;
    return t;
}

void EyeDiagram::save_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "# span_symbols=" << span_symbols << " amp_min=" << amp_min
        << " amp_max=" << amp_max << " bins=" << bins << '\n';
    for (size_t r = 0; r < bins; ++r) {
        for (size_t c = 0; c < bins; ++c)
            out << counts[r * bins + c] << (c + 1 == bins ? '\n' : ',');
    }
}

EyeDiagram eye_diagram(const sigkit::Waveform& x, double baud, int span_symbols,
                       size_t bins)
{
    if (x.sample_rate < 4.0 * baud)
        throw std::invalid_argument("eye_diagram: fewer than 4 samples/symbol");
    EyeDiagram eye;
    eye.bins = bins;
    eye.span_symbols = span_symbols;
    auto [mn, mx] = std::minmax_element(x.samples.begin(), x.samples.end());
    eye.amp_min = *mn;
    eye.amp_max = *mx;
    eye.counts.assign(bins * bins, 0);
    const double span_t = static_cast<double>(span_symbols) / baud;
    const double amp_span = eye.amp_max > eye.amp_min ? eye.amp_max - eye.amp_min : 1.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double t = std::fmod(static_cast<double>(i) / x.sample_rate, span_t);
        auto col = static_cast<size_t>(t / span_t * static_cast<double>(bins));
        auto row = static_cast<size_t>((x.samples[i] - eye.amp_min) / amp_span *
                                       static_cast<double>(bins));
        col = std::min(col, bins - 1);
        row = std::min(row, bins - 1);
        ++eye.counts[row * bins + col];
    }
    return eye;
}

}  // namespace linksim::rxdsp
