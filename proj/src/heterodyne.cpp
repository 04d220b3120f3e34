#include "ecf/heterodyne.hpp"

#include <cmath>
#include <complex>

#include "ecf/constants.hpp"
#include "ecf/dsp.hpp"
#include "ecf/errors.hpp"
#include "ecf/rng.hpp"

namespace ecf {

void HeterodyneConfig::validate() const {
  if (!(lo_power > 0.0) || !(responsivity > 0.0) || !(gain > 0.0))
    throw Error("HeterodyneConfig: powers and gains must be positive");
  if (!(beat_frequency > 0.0))
    throw Error("HeterodyneConfig: beat frequency must be positive");
  if (!(sample_rate > 2.0 * beat_frequency))
    throw Error("HeterodyneConfig: sample rate must exceed twice the beat "
                "frequency");
}

double HeterodyneConfig::shot_noise_coefficient() const {
  return 2.0 * kElementaryCharge * responsivity * gain * gain;
}

NoiseBudget NoiseBudget::shot_limited(const HeterodyneConfig& cfg,
                                      double electronic_psd) {
  NoiseBudget b;
  b.electronic_psd = electronic_psd;
  b.shot_psd_per_watt = cfg.shot_noise_coefficient();
  return b;
}

void NoiseBudget::calibrate_onef_crossover(double detected_power) {
  onef_amplitude = white_psd(detected_power) * onef_corner;
}

TimeTrace synthesize_photocurrent(const std::vector<double>& envelope_w,
                                  double envelope_dt,
                                  const HeterodyneConfig& cfg,
                                  const NoiseBudget& noise, std::uint64_t seed,
                                  double start_time) {
  cfg.validate();
  if (envelope_w.size() < 2)
    throw Error("synthesize_photocurrent: envelope needs >= 2 samples");
  if (std::abs(envelope_dt * cfg.sample_rate - 1.0) > 1e-9)
    throw Error("synthesize_photocurrent: envelope sample rate does not match "
                "the heterodyne sample rate");

  const std::size_t n = envelope_w.size();
  const double dt = 1.0 / cfg.sample_rate;
  const double end_factor = cfg.dual_end ? 2.0 : 1.0;

  double mean_signal = 0.0;
  for (double p : envelope_w) {
    if (p < 0.0)
      throw Error("synthesize_photocurrent: envelope must be non-negative");
    mean_signal += end_factor * p;
  }
  mean_signal /= static_cast<double>(n);

  TimeTrace trace;
  trace.sample_interval = dt;
  trace.start_time = start_time;
  trace.samples.resize(n);

  const double tone_gain = 2.0 * cfg.responsivity * cfg.gain;
  const double omega = 2.0 * kPi * cfg.beat_frequency;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_sig = end_factor * envelope_w[i];
    const double amp = tone_gain * std::sqrt(cfg.lo_power * p_sig);
    trace.samples[i] = amp * std::cos(omega * (start_time + i * dt));
  }

  RandomStream rng(seed);
  const double detected = 2.0 * cfg.lo_power + mean_signal;
  const double white_psd = noise.white_psd(detected);
  if (white_psd > 0.0) {
    const double sigma = std::sqrt(white_psd * 0.5 * cfg.sample_rate);
    for (std::size_t i = 0; i < n; ++i)
      trace.samples[i] += sigma * rng.normal();
  }

  if (noise.onef_amplitude > 0.0) {
    // Frequency-domain synthesis of the power-law term, cropped to n.
    std::size_t nfft = 2;
    while (nfft < n) nfft *= 2;
    const double df = cfg.sample_rate / static_cast<double>(nfft);
    std::vector<std::complex<double>> spec(nfft, {0.0, 0.0});
    for (std::size_t k = 1; k < nfft / 2; ++k) {
      const double psd = noise.onef_amplitude / (k * df);
      const double c = 0.5 * nfft * std::sqrt(psd * df);
      spec[k] = std::complex<double>(c * rng.normal(), c * rng.normal());
      spec[nfft - k] = std::conj(spec[k]);
    }
    {
      const double psd = noise.onef_amplitude / (0.5 * cfg.sample_rate);
      spec[nfft / 2] =
          std::complex<double>(nfft * std::sqrt(psd * df) * rng.normal(), 0.0);
    }
    dsp::fft(spec, true);
    for (std::size_t i = 0; i < n; ++i) trace.samples[i] += spec[i].real();
  }
  return trace;
}

std::vector<double> resample_envelope(const std::vector<double>& envelope,
                                      double dt_in, double dt_out,
                                      std::size_t n_out) {
  if (envelope.empty()) throw Error("resample_envelope: empty envelope");
  if (!(dt_in > 0.0) || !(dt_out > 0.0))
    throw Error("resample_envelope: time steps must be positive");
  std::vector<double> out(n_out);
  const std::size_t last = envelope.size() - 1;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double s = i * dt_out / dt_in;
    if (s >= static_cast<double>(last)) {
      out[i] = envelope[last];
      continue;
    }
    const std::size_t j = static_cast<std::size_t>(s);
    const double t = s - static_cast<double>(j);
    out[i] = (1.0 - t) * envelope[j] + t * envelope[j + 1];
  }
  return out;
}

} // namespace ecf
