#pragma once

#include <cstdint>
#include <vector>

namespace ecf {

/// Detection-chain constants for the beat-note measurement.
struct HeterodyneConfig {
  double beat_frequency = 25e3;  // Hz, AOM offset between probe and LO
  double lo_power = 1e-3;        // W per photodiode
  double responsivity = 0.5;     // A/W
  double gain = 1e4;             // V/A transimpedance
  double sample_rate = 250e3;    // Hz
  bool dual_end = false;         // collect both fiber ends (doubles signal power)

  void validate() const;

  /// Shot-noise PSD per watt of detected optical power: 2 e R G^2 (V^2/Hz/W).
  double shot_noise_coefficient() const;
};

struct NoiseBudget {
  double electronic_psd = 1e-15;   // V^2/Hz, flat
  double shot_psd_per_watt = 0.0;  // V^2/Hz per W of detected power
  double onef_corner = 4.0;        // Hz
  double onef_amplitude = 0.0;     // V^2/Hz at 1 Hz; PSD(f) = amplitude / f

  /// Budget with the shot coefficient derived from the detector constants.
  static NoiseBudget shot_limited(const HeterodyneConfig& cfg,
                                  double electronic_psd = 1e-15);

  /// Flat part of the PSD at a given detected optical power.
  double white_psd(double detected_power) const {
    return electronic_psd + shot_psd_per_watt * detected_power;
  }

  /// Pick the 1/f amplitude so the power-law crosses the white floor at the
  /// corner frequency.
  void calibrate_onef_crossover(double detected_power);
};

/// Uniformly sampled photodetector voltage.
struct TimeTrace {
  std::vector<double> samples;   // V
  double sample_interval = 0.0;  // s
  double start_time = 0.0;       // s

  double sample_rate() const { return 1.0 / sample_interval; }
  double time_at(std::size_t i) const { return start_time + i * sample_interval; }
};

/// Synthesize the balanced-detector voltage for a collected-power envelope
/// P_sig(t): a beat-note tone of amplitude 2 R G sqrt(P_LO P_sig(t)) plus
/// white shot noise at the total detected power (2 P_LO + mean signal),
/// flat electronic noise, and an optional 1/f term. Deterministic for a
/// fixed seed. The envelope must be sampled at the configured rate.
TimeTrace synthesize_photocurrent(const std::vector<double>& envelope_w,
                                  double envelope_dt,
                                  const HeterodyneConfig& cfg,
                                  const NoiseBudget& noise, std::uint64_t seed,
                                  double start_time = 0.0);

/// Linear-interpolation resampling of an envelope onto a new rate, used to
/// bridge the coarse transit timestep to the trace sample rate.
std::vector<double> resample_envelope(const std::vector<double>& envelope,
                                      double dt_in, double dt_out,
                                      std::size_t n_out);

} // namespace ecf
