#pragma once

#include <complex>
#include <vector>

namespace linksim::fft {

// Forward/inverse complex DFT. ifft includes the 1/N scaling so
// ifft(fft(x)) == x. Plans are cached internally; safe to call from
// multiple threads.
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);

// Real transforms. rfft returns n/2+1 bins; irfft needs the original
// real length n.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, size_t n);

// Bin k of an n-point transform at sample rate fs, with negative
// frequencies for k > n/2.
double bin_freq(size_t k, size_t n, double fs);

}  // namespace linksim::fft
