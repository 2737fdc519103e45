#pragma once

#include <complex>
#include <string>
#include <vector>

namespace linksim::sigkit {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J*s
inline constexpr double kElectronCharge = 1.602176634e-19;

/// Real-valued sampled electrical signal (volts or amperes by context).
/// Immutable once constructed; all operations return new values.
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Sa/s

    Waveform() = default;
    Waveform(std::vector<double> s, double rate);

    size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Complex baseband optical envelope in sqrt(W), at a center wavelength.
struct OpticalField {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;   // Sa/s
    double wavelength = 1550e-9;  // m

    OpticalField() = default;
    OpticalField(std::vector<std::complex<double>> s, double rate, double lambda);

    size_t size() const { return samples.size(); }
    /// Mean optical power in watts.
    double mean_power() const;
};

/// Complex gain over a strictly increasing frequency grid.
struct FrequencyResponse {
    std::vector<double> freqs;                 // Hz
    std::vector<std::complex<double>> gains;

    FrequencyResponse() = default;
    FrequencyResponse(std::vector<double> f, std::vector<std::complex<double>> g);

    size_t size() const { return freqs.size(); }
    /// Linear interpolation of the complex gain at f. Throws if f is
    /// outside the grid.
    std::complex<double> at(double f) const;
    double min_freq() const { return freqs.front(); }
    double max_freq() const { return freqs.back(); }

    /// Pointwise product on this response's grid (other is interpolated).
    FrequencyResponse operator*(const FrequencyResponse& other) const;

    static FrequencyResponse identity(double f_lo, double f_hi);
};

// Block (circular) convolution: the transform of x is multiplied by h
// interpolated onto the transform grid. Real input stays real; length
// and sample rate are preserved. h must cover [0, fs/2] for real input
// and [-fs/2, fs/2] for complex input.
Waveform apply_frequency_response(const Waveform& x, const FrequencyResponse& h);
OpticalField apply_frequency_response(const OpticalField& x, const FrequencyResponse& h);

/// Band-limited (FFT) resampling under the circular-frame convention.
/// The output length is round(n * new_rate / old_rate).
Waveform resample(const Waveform& x, double new_rate);
OpticalField resample(const OpticalField& x, double new_rate);

/// Mean optical power in dBm; -inf for an all-zero field.
double power_dbm(const OpticalField& x);

/// Uniform scaling so that mean power equals target_dbm.
OpticalField scale_to_dbm(const OpticalField& x, double target_dbm);

// 3-column CSV (freq_hz, gain_db, phase_rad).
void save_response_csv(const FrequencyResponse& h, const std::string& path);
FrequencyResponse load_response_csv(const std::string& path);

// Single-column CSV with a "# sample_rate_hz=..." header line.
void save_waveform_csv(const Waveform& x, const std::string& path);
Waveform load_waveform_csv(const std::string& path);

}  // namespace linksim::sigkit
