#pragma once

#include <complex>

#include "linksim/sigkit.hpp"

namespace linksim::filters {

/// 4th-order Bessel (maximally flat delay) low-pass gain at frequency f,
/// -3 dB at fc.
std::complex<double> bessel4(double f, double fc);

/// N-th order Butterworth magnitude (zero phase), -3 dB at fc.
double butterworth_mag(double f, double fc, int order);

/// Sampled Bessel-4 response on [0, f_max] suitable for
/// apply_frequency_response on a real waveform.
sigkit::FrequencyResponse bessel4_response(double fc, double f_max, size_t n_points = 2048);

/// Zero-phase Butterworth magnitude response on [0, f_max].
sigkit::FrequencyResponse butterworth_response(double fc, double f_max, int order,
                                               size_t n_points = 2048);

/// Ideal complex band-pass |f| <= half_bw with a Butterworth-4 edge,
/// on [-f_max, f_max], for optical fields.
sigkit::FrequencyResponse optical_bandpass(double half_bw, double f_max,
                                           size_t n_points = 4096);

}  // namespace linksim::filters
