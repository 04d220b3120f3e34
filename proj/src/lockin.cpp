#include "ecf/lockin.hpp"

#include <cmath>

#include "ecf/constants.hpp"
#include "ecf/dsp.hpp"
#include "ecf/errors.hpp"

namespace ecf {

LockInOutput lockin_demodulate(const TimeTrace& trace, double f_ref,
                               double cutoff, int decimation) {
  const double fs = trace.sample_rate();
  if (trace.samples.size() < 4) throw Error("lockin_demodulate: trace too short");
  if (!(f_ref > 0.0) || f_ref >= 0.5 * fs)
    throw Error("lockin_demodulate: reference must lie below Nyquist");
  if (!(cutoff > 0.0) || cutoff >= f_ref)
    throw Error("lockin_demodulate: low-pass cutoff must lie below the "
                "reference frequency");
  if (decimation < 1) throw Error("lockin_demodulate: decimation must be >= 1");
  const double out_rate = fs / decimation;
  if (out_rate <= 2.0 * cutoff)
    throw Error("lockin_demodulate: decimated rate must stay above twice the "
                "cutoff");

  const std::size_t n = trace.samples.size();
  std::vector<double> mix_x(n), mix_y(n);
  const double omega = 2.0 * kPi * f_ref;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.time_at(i);
    mix_x[i] = 2.0 * trace.samples[i] * std::cos(omega * t);
    mix_y[i] = 2.0 * trace.samples[i] * std::sin(omega * t);
  }

  mix_x = dsp::lowpass_zero_phase(mix_x, fs, cutoff);
  mix_y = dsp::lowpass_zero_phase(mix_y, fs, cutoff);

  LockInOutput out;
  out.output_rate = out_rate;
  out.reference_frequency = f_ref;
  out.start_time = trace.start_time;
  const std::size_t n_out = (n + decimation - 1) / decimation;
  out.x.reserve(n_out);
  out.y.reserve(n_out);
  out.amplitude.reserve(n_out);
  for (std::size_t i = 0; i < n; i += decimation) {
    out.x.push_back(mix_x[i]);
    out.y.push_back(mix_y[i]);
    out.amplitude.push_back(std::hypot(mix_x[i], mix_y[i]));
  }
  const double tau = 1.0 / (2.0 * kPi * cutoff);
  out.settle_samples = static_cast<std::size_t>(std::ceil(5.0 * tau * out_rate));
  return out;
}

} // namespace ecf
