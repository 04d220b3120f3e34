#pragma once

#include <vector>

namespace ecf {

/// A transit detection: a merged super-threshold excursion of the demodulated
/// amplitude. Peak amplitude is expressed in quantum-noise sigma units, so
/// the SNR equals the peak.
struct DetectionEvent {
  double start_s = 0.0;
  double end_s = 0.0;
  double peak_sigma = 0.0;
  double snr = 0.0;

  double duration() const { return end_s - start_s; }
};

/// Standard deviation of a quantum-noise reference segment. Errors on fewer
/// than two samples or zero variance.
double noise_sigma(const std::vector<double>& reference);

/// Threshold detector on a demodulated amplitude series. The reference
/// segment (particle-free) fixes the sigma unit; samples at or above
/// threshold_sigma * sigma open an event, contiguous excursions closer than
/// min_separation_s merge, and each event reports its peak in sigma units.
std::vector<DetectionEvent> detect_events(const std::vector<double>& amplitude,
                                          double dt, double start_time,
                                          const std::vector<double>& reference,
                                          double threshold_sigma = 5.0,
                                          double min_separation_s = 0.010);

/// Variant for series already expressed in sigma units.
std::vector<DetectionEvent> detect_events_normalized(
    const std::vector<double>& score, double dt, double start_time,
    double threshold_sigma = 5.0, double min_separation_s = 0.010);

} // namespace ecf
