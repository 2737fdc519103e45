#include "linksim/rxfe.hpp"

#include <cmath>
#include <stdexcept>

#include "linksim/filters.hpp"
#include "linksim/rng.hpp"
#include "linksim/txdsp.hpp"

namespace linksim::rxfe {

void RxParams::validate() const
{
    if (obpf_bw <= 0.0 || pd_bandwidth <= 0.0 || adc_bandwidth <= 0.0 ||
        adc_rate <= 0.0)
        throw std::invalid_argument("RxParams: bandwidths and rates must be > 0");
    if (pd_responsivity <= 0.0 || pd_responsivity > 1.2)
        throw std::invalid_argument("RxParams: responsivity outside (0, 1.2]");
    if (adc_bits < 1)
        throw std::invalid_argument("RxParams: adc_bits must be >= 1");
}

sigkit::OpticalField edfa_agc(const sigkit::OpticalField& field, const RxParams& params,
                              uint64_t rng_seed)
{
    params.validate();
    const double p_in = field.mean_power();
    if (p_in < 1e-3 * std::pow(10.0, -40.0 / 10.0))
        throw std::invalid_argument("edfa_agc: input below -40 dBm sensitivity floor");

    const double p_out = 1e-3 * std::pow(10.0, params.edfa_pout_dbm / 10.0);
    const double gain = p_out / p_in;

    std::vector<std::complex<double>> s(field.samples);
    const double g_field = std::sqrt(gain);
    for (auto& v : s)
        v *= g_field;

    if (params.noise_enabled) {
        // Single-polarization ASE: S_ase = (NF*G/2 - 1) h nu per Hz over
        // the simulation band.
        const double nf_lin = std::pow(10.0, params.edfa_nf_db / 10.0);
        const double nu = sigkit::kSpeedOfLight / field.wavelength;
        const double s_ase = std::max(nf_lin * gain / 2.0 - 1.0, 0.0) * sigkit::kPlanck * nu;
        const double var = s_ase * field.sample_rate;  // complex variance per sample
        auto eng = rng::engine(rng_seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(var / 2.0));
        for (auto& v : s)
            v += std::complex<double>(gauss(eng), gauss(eng));
    }

    sigkit::OpticalField amplified(std::move(s), field.sample_rate, field.wavelength);
    auto obpf = filters::optical_bandpass(params.obpf_bw / 2.0, field.sample_rate / 2.0);
    return sigkit::apply_frequency_response(amplified, obpf);
}

sigkit::OpticalField voa_set_rop(const sigkit::OpticalField& field, double target_rop_dbm)
{
    const double current = sigkit::power_dbm(field);
    if (target_rop_dbm > current + 1e-9)
        throw std::invalid_argument("voa_set_rop: target above current power");
    return sigkit::scale_to_dbm(field, target_rop_dbm);
}

sigkit::Waveform photodetect(const sigkit::OpticalField& field, const RxParams& params,
                             uint64_t rng_seed)
{
    params.validate();
    if (field.sample_rate < 2.0 * params.pd_bandwidth)
        throw std::invalid_argument("photodetect: field grid coarser than 2x pd_bandwidth");

    const size_t n = field.size();
    std::vector<double> i(n);
    double i_mean = 0.0;
    for (size_t k = 0; k < n; ++k) {
        i[k] = params.pd_responsivity * std::norm(field.samples[k]);
        i_mean += i[k];
    }
    i_mean /= static_cast<double>(n);

    if (params.noise_enabled) {
        const double bw = field.sample_rate / 2.0;
        const double var_thermal = params.thermal_noise_psd * bw;
        const double var_shot = 2.0 * sigkit::kElectronCharge * std::abs(i_mean) * bw;
        auto eng = rng::engine(rng_seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(var_thermal + var_shot));
        for (auto& v : i)
            v += gauss(eng);
    }

    sigkit::Waveform raw(std::move(i), field.sample_rate);
    auto lp = filters::bessel4_response(params.pd_bandwidth, field.sample_rate / 2.0);
    return sigkit::apply_frequency_response(raw, lp);
}

sigkit::Waveform adc_capture(const sigkit::Waveform& photocurrent, const RxParams& params)
{
    params.validate();
    // 10th-order Butterworth magnitude: >20 dB suppression at 80 GHz
    // for the 63 GHz scope front end.
    auto lp = filters::butterworth_response(params.adc_bandwidth,
                                            photocurrent.sample_rate / 2.0, 10);
    auto filtered = sigkit::apply_frequency_response(photocurrent, lp);
    auto sampled = sigkit::resample(filtered, params.adc_rate);

    double peak = 0.0;
    double mean = 0.0;
    for (double s : sampled.samples)
        mean += s;
    mean /= static_cast<double>(sampled.size());
    for (double s : sampled.samples)
        peak = std::max(peak, std::abs(s - mean));
    if (peak == 0.0)
        return sampled;

    std::vector<double> q(sampled.size());
    for (size_t k = 0; k < sampled.size(); ++k)
        q[k] = mean + txdsp::quantize_uniform(sampled.samples[k] - mean, peak,
                                              params.adc_bits);
    return sigkit::Waveform(std::move(q), params.adc_rate);
}

}  // namespace linksim::rxfe
