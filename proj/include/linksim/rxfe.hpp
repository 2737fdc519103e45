#pragma once

#include <cstdint>

#include "linksim/sigkit.hpp"

namespace linksim::rxfe {

/// Receiver front-end parameters (EDFA + OBPF + VOA + PD + ADC).
struct RxParams {
    double edfa_pout_dbm = 7.0;        // AGC fixed output
    double edfa_nf_db = 5.0;
    double obpf_bw = 100e9;            // optical band-pass, full width
    double pd_responsivity = 0.5;      // A/W
    double pd_bandwidth = 90e9;
    double thermal_noise_psd = 1.6e-22;  // A^2/Hz, calibrated against B2B FEC crossings
    double adc_rate = 160e9;
    double adc_bandwidth = 63e9;
    int adc_bits = 8;
    bool noise_enabled = true;

    void validate() const;
};

/// AGC amplifier: gain set so mean output power hits edfa_pout, ASE
/// added over the simulation band, then the optical band-pass filter.
sigkit::OpticalField edfa_agc(const sigkit::OpticalField& field, const RxParams& params,
                              uint64_t rng_seed);

/// Uniform attenuation to the target received optical power. Throws if
/// the target exceeds the current power (a VOA only attenuates).
sigkit::OpticalField voa_set_rop(const sigkit::OpticalField& field, double target_rop_dbm);

/// Square-law detection with thermal + shot noise, then the PD band
/// limit.
sigkit::Waveform photodetect(const sigkit::OpticalField& field, const RxParams& params,
                             uint64_t rng_seed);

/// 63 GHz scope front end: band limit, resample to adc_rate, quantize
/// with the full scale auto-ranged to the signal peak.
sigkit::Waveform adc_capture(const sigkit::Waveform& photocurrent, const RxParams& params);

}  // namespace linksim::rxfe
