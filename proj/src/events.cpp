#include "ecf/events.hpp"

#include <cmath>

#include "ecf/errors.hpp"

namespace ecf {

double noise_sigma(const std::vector<double>& reference) {
  if (reference.size() < 2)
    throw Error("noise_sigma: reference segment needs >= 2 samples");
  double mean = 0.0;
  for (double v : reference) mean += v;
  mean /= static_cast<double>(reference.size());
  double var = 0.0;
  for (double v : reference) var += (v - mean) * (v - mean);
  var /= static_cast<double>(reference.size() - 1);
  if (!(var > 0.0)) throw Error("noise_sigma: reference has zero variance");
  return std::sqrt(var);
}

std::vector<DetectionEvent> detect_events_normalized(
    const std::vector<double>& score, double dt, double start_time,
    double threshold_sigma, double min_separation_s) {
  if (score.empty()) throw Error("detect_events: empty series");
  if (!(dt > 0.0)) throw Error("detect_events: sample interval must be positive");

  std::vector<DetectionEvent> events;
  bool open = false;
  DetectionEvent cur;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (score[i] >= threshold_sigma) {
      const double t = start_time + i * dt;
      if (!open) {
        open = true;
        cur = DetectionEvent{t, t + dt, score[i], score[i]};
      } else {
        cur.end_s = t + dt;
        if (score[i] > cur.peak_sigma) cur.peak_sigma = score[i];
      }
    } else if (open) {
      open = false;
      cur.snr = cur.peak_sigma;
      events.push_back(cur);
    }
  }
  if (open) {
    cur.snr = cur.peak_sigma;
    events.push_back(cur);
  }

  // Merge events separated by less than the separation window.
  std::vector<DetectionEvent> merged;
  for (const DetectionEvent& e : events) {
    if (!merged.empty() && e.start_s - merged.back().end_s < min_separation_s) {
      merged.back().end_s = e.end_s;
      if (e.peak_sigma > merged.back().peak_sigma) {
        merged.back().peak_sigma = e.peak_sigma;
        merged.back().snr = e.snr;
      }
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

std::vector<DetectionEvent> detect_events(const std::vector<double>& amplitude,
                                          double dt, double start_time,
                                          const std::vector<double>& reference,
                                          double threshold_sigma,
                                          double min_separation_s) {
  const double sigma = noise_sigma(reference);
  std::vector<double> score(amplitude.size());
  for (std::size_t i = 0; i < amplitude.size(); ++i)
    score[i] = amplitude[i] / sigma;
  return detect_events_normalized(score, dt, start_time, threshold_sigma,
                                  min_separation_s);
}

} // namespace ecf
