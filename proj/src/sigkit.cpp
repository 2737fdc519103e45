#include "linksim/sigkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "linksim/fft.hpp"

namespace linksim::sigkit {

namespace {

void check_finite(const std::vector<double>& v, const char* what)
{
    for (double s : v)
        if (!std::isfinite(s))
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

}  // namespace

Waveform::Waveform(std::vector<double> s, double rate)
    : samples(std::move(s)), sample_rate(rate)
{
    if (sample_rate <= 0.0)
        throw std::invalid_argument("Waveform: sample_rate must be > 0");
    if (samples.empty())
        throw std::invalid_argument("Waveform: empty");
    check_finite(samples, "Waveform");
}

OpticalField::OpticalField(std::vector<std::complex<double>> s, double rate, double lambda)
    : samples(std::move(s)), sample_rate(rate), wavelength(lambda)
{
    if (sample_rate <= 0.0)
        throw std::invalid_argument("OpticalField: sample_rate must be > 0");
    if (samples.empty())
        throw std::invalid_argument("OpticalField: empty");
    if (wavelength <= 1e-6 || wavelength >= 2e-6)
        throw std::invalid_argument("OpticalField: wavelength outside (1um, 2um)");
    for (const auto& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("OpticalField: non-finite sample");
}

double OpticalField::mean_power() const
{
    double acc = 0.0;
    for (const auto& v : samples)
        acc += std::norm(v);
    return acc / static_cast<double>(samples.size());
}

FrequencyResponse::FrequencyResponse(std::vector<double> f, std::vector<std::complex<double>> g)
    : freqs(std::move(f)), gains(std::move(g))
{
    if (freqs.size() != gains.size())
        throw std::invalid_argument("FrequencyResponse: length mismatch");
    if (freqs.empty())
        throw std::invalid_argument("FrequencyResponse: empty");
    for (size_t i = 1; i < freqs.size(); ++i)
        if (freqs[i] <= freqs[i - 1])
            throw std::invalid_argument("FrequencyResponse: freqs must be strictly increasing");
    for (const auto& v : gains)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("FrequencyResponse: non-finite gain");
}

std::complex<double> FrequencyResponse::at(double f) const
{
    // Small tolerance at the edges so fs/2 bins survive rounding.
    const double span = freqs.back() - freqs.front();
    const double eps = 1e-9 * std::max(span, std::abs(freqs.back()));
    if (f < freqs.front() - eps || f > freqs.back() + eps)
        throw std::out_of_range("FrequencyResponse::at: grid coverage insufficient");
    if (freqs.size() == 1)
        return gains.front();
    f = std::clamp(f, freqs.front(), freqs.back());
    auto it = std::upper_bound(freqs.begin(), freqs.end(), f);
    size_t hi = std::min<size_t>(static_cast<size_t>(it - freqs.begin()), freqs.size() - 1);
    if (hi == 0)
        hi = 1;
    const size_t lo = hi - 1;
    const double t = (f - freqs[lo]) / (freqs[hi] - freqs[lo]);
    return gains[lo] + t * (gains[hi] - gains[lo]);
}

FrequencyResponse FrequencyResponse::operator*(const FrequencyResponse& other) const
{
    std::vector<std::complex<double>> g(gains);
    for (size_t i = 0; i < freqs.size(); ++i)
        g[i] *= other.at(freqs[i]);
    return FrequencyResponse(freqs, std::move(g));
}

FrequencyResponse FrequencyResponse::identity(double f_lo, double f_hi)
{
    return FrequencyResponse({f_lo, f_hi}, {1.0, 1.0});
}

Waveform apply_frequency_response(const Waveform& x, const FrequencyResponse& h)
{
    const size_t n = x.size();
    auto spec = fft::rfft(x.samples);
    for (size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * x.sample_rate / static_cast<double>(n);
        spec[k] *= h.at(f);
    }
    return Waveform(fft::irfft(spec, n), x.sample_rate);
}

OpticalField apply_frequency_response(const OpticalField& x, const FrequencyResponse& h)
{
    auto spec = fft::fft(x.samples);
    const size_t n = x.size();
    for (size_t k = 0; k < n; ++k)
        spec[k] *= h.at(fft::bin_freq(k, n, x.sample_rate));
    return OpticalField(fft::ifft(spec), x.sample_rate, x.wavelength);
}

namespace {

// Spectrum-domain resampling: keep (or zero-pad) bins up to the smaller
// Nyquist. Exact for band-limited periodic frames.
std::vector<std::complex<double>> resample_spectrum(std::vector<std::complex<double>> spec,
                                                    size_t n_old, size_t n_new)
{
    std::vector<std::complex<double>> out(n_new, 0.0);
    const size_t keep = std::min(n_old, n_new);
    const size_t half = keep / 2;
    for (size_t k = 0; k <= half; ++k)
        out[k] = spec[k];
    for (size_t k = 1; k < keep - half; ++k)
        out[n_new - k] = spec[n_old - k];
    // Split a shared Nyquist bin when shrinking to an even length.
    if (n_new < n_old && n_new % 2 == 0) {
        out[n_new / 2] = spec[n_new / 2] + spec[n_old - n_new / 2];
    }
    const double scale = static_cast<double>(n_new) / static_cast<double>(n_old);
    for (auto& v : out)
        v *= scale;
    return out;
}

size_t resampled_length(size_t n, double old_rate, double new_rate)
{
    const double exact = static_cast<double>(n) * new_rate / old_rate;
    const auto n_new = static_cast<size_t>(std::llround(exact));
    if (n_new == 0)
        throw std::invalid_argument("resample: output would be empty");
    return n_new;
}

}  // namespace

Waveform resample(const Waveform& x, double new_rate)
{
    if (new_rate <= 0.0)
        throw std::invalid_argument("resample: new_rate must be > 0");
    if (new_rate == x.sample_rate)
        return x;
    const size_t n_new = resampled_length(x.size(), x.sample_rate, new_rate);
    std::vector<std::complex<double>> cx(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        cx[i] = x.samples[i];
    auto spec = resample_spectrum(fft::fft(cx), x.size(), n_new);
    auto t = fft::ifft(spec);
    std::vector<double> out(n_new);
    for (size_t i = 0; i < n_new; ++i)
        out[i] = t[i].real();
    return Waveform(std::move(out), new_rate);
}

OpticalField resample(const OpticalField& x, double new_rate)
{
    if (new_rate <= 0.0)
        throw std::invalid_argument("resample: new_rate must be > 0");
    if (new_rate == x.sample_rate)
        return x;
    const size_t n_new = resampled_length(x.size(), x.sample_rate, new_rate);
    auto spec = resample_spectrum(fft::fft(x.samples), x.size(), n_new);
    return OpticalField(fft::ifft(spec), new_rate, x.wavelength);
}

double power_dbm(const OpticalField& x)
{
    const double p = x.mean_power();
    if (p <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p / 1e-3);
}

OpticalField scale_to_dbm(const OpticalField& x, double target_dbm)
{
    const double p = x.mean_power();
    if (p <= 0.0)
        throw std::invalid_argument("scale_to_dbm: zero-power field");
    const double g = std::sqrt(1e-3 * std::pow(10.0, target_dbm / 10.0) / p);
    std::vector<std::complex<double>> s(x.samples);
    for (auto& v : s)
        v *= g;
    return OpticalField(std::move(s), x.sample_rate, x.wavelength);
}

void save_response_csv(const FrequencyResponse& h, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out << "freq_hz,gain_db,phase_rad\n";
    out.precision(12);
    for (size_t i = 0; i < h.size(); ++i) {
        const double mag = std::abs(h.gains[i]);
        const double db = mag > 0.0 ? 20.0 * std::log10(mag) : -400.0;
        out << h.freqs[i] << ',' << db << ',' << std::arg(h.gains[i]) << '\n';
    }
}

FrequencyResponse load_response_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> freqs;
    std::vector<std::complex<double>> gains;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        double f, db, ph;
        char c1, c2;
        if (!(ss >> f >> c1 >> db >> c2 >> ph))
            throw std::runtime_error("bad CSV row in " + path);
        gains.push_back(std::polar(std::pow(10.0, db / 20.0), ph));
        freqs.push_back(f);
    }
    return FrequencyResponse(std::move(freqs), std::move(gains));
}

void save_waveform_csv(const Waveform& x, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path);
    out.precision(12);
    out << "# sample_rate_hz=" << x.sample_rate << '\n';
    for (double s : x.samples)
        out << s << '\n';
}

Waveform load_waveform_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    const auto pos = line.find('=');
    if (line.rfind("# sample_rate_hz", 0) != 0 || pos == std::string::npos)
        throw std::runtime_error("missing sample-rate header in " + path);
    const double rate = std::stod(line.substr(pos + 1));
    std::vector<double> samples;
    while (std::getline(in, line))
        if (!line.empty())
            samples.push_back(std::stod(line));
    return Waveform(std::move(samples), rate);
}

}  // namespace linksim::sigkit
