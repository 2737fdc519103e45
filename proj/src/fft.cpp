#include "linksim/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace linksim::fft {

namespace {

// fftw_execute_dft is thread-safe, planning is not.  Plans are created
// with FFTW_UNALIGNED so they can run on arbitrary caller buffers.
std::mutex g_plan_mutex;

fftw_plan plan_c2c(size_t n, int sign)
{
    static std::unordered_map<size_t, fftw_plan> fwd, bwd;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = (sign == FFTW_FORWARD) ? fwd : bwd;
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::vector<std::complex<double>> tmp(n);
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, plan);
    return plan;
}

}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x)
{
    if (x.empty())
        throw std::invalid_argument("fft: empty input");
    std::vector<std::complex<double>> out(x);
    auto* p = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan_c2c(x.size(), FFTW_FORWARD), p, p);
    return out;
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x)
{
    if (x.empty())
        throw std::invalid_argument("ifft: empty input");
    std::vector<std::complex<double>> out(x);
    auto* p = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan_c2c(x.size(), FFTW_BACKWARD), p, p);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out)
        v *= scale;
    return out;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x)
{
    std::vector<std::complex<double>> cx(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        cx[i] = x[i];
    auto spec = fft(cx);
    spec.resize(x.size() / 2 + 1);
    return spec;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, size_t n)
{
    if (spec.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum/length mismatch");
    std::vector<std::complex<double>> full(n);
    for (size_t k = 0; k < spec.size(); ++k)
        full[k] = spec[k];
    for (size_t k = spec.size(); k < n; ++k)
        full[k] = std::conj(full[n - k]);
    // Real output demands conjugate-symmetric edges.
    full[0] = full[0].real();
    if (n % 2 == 0)
        full[n / 2] = full[n / 2].real();
    auto t = ifft(full);
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = t[i].real();
    return out;
}

double bin_freq(size_t k, size_t n, double fs)
{
    const double kk = (k <= n / 2) ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(n);
    return kk * fs / static_cast<double>(n);
}

}  // namespace linksim::fft
