#include "linksim/filters.hpp"

#include <cmath>

namespace linksim::filters {

namespace {

// Normalized 4th-order Bessel polynomial: B4(s) = s^4 + 10 s^3 + 45 s^2
// + 105 s + 105, unity DC gain. kBesselScale maps the -3 dB point of
// the normalized prototype onto fc (standard value 2.1139).
constexpr double kBesselScale = 2.113917675;

std::complex<double> bessel4_normalized(std::complex<double> s)
{
    const std::complex<double> den =
        (((s + 10.0) * s + 45.0) * s + 105.0) * s + 105.0;
    return 105.0 / den;
}

}  // namespace

std::complex<double> bessel4(double f, double fc)
{
    const std::complex<double> s(0.0, kBesselScale * f / fc);
    return bessel4_normalized(s);
}

double butterworth_mag(double f, double fc, int order)
{
    return 1.0 / std::sqrt(1.0 + std::pow(std::abs(f) / fc, 2.0 * order));
}

sigkit::FrequencyResponse bessel4_response(double fc, double f_max, size_t n_points)
{
    std::vector<double> freqs(n_points);
    std::vector<std::complex<double>> gains(n_points);
    for (size_t i = 0; i < n_points; ++i) {
        freqs[i] = f_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        gains[i] = bessel4(freqs[i], fc);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

sigkit::FrequencyResponse butterworth_response(double fc, double f_max, int order,
                                               size_t n_points)
{
    std::vector<double> freqs(n_points);
    std::vector<std::complex<double>> gains(n_points);
    for (size_t i = 0; i < n_points; ++i) {
        freqs[i] = f_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        gains[i] = butterworth_mag(freqs[i], fc, order);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

sigkit::FrequencyResponse optical_bandpass(double half_bw, double f_max, size_t n_points)
{
    std::vector<double> freqs(n_points);
    std::vector<std::complex<double>> gains(n_points);
    for (size_t i = 0; i < n_points; ++i) {
        const double f = -f_max + 2.0 * f_max * static_cast<double>(i) /
                                      static_cast<double>(n_points - 1);
        freqs[i] = f;
        gains[i] = butterworth_mag(f, half_bw, 4);
    }
    return sigkit::FrequencyResponse(std::move(freqs), std::move(gains));
}

}  // namespace linksim::filters
