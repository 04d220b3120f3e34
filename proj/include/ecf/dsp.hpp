#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ecf::dsp {

/// In-place iterative radix-2 FFT; size must be a power of two. The inverse
/// transform includes the 1/N factor.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

/// Zero-phase (forward-backward) 4th-order Butterworth low-pass. Effective
/// attenuation is 8th order, gain is squared magnitude, phase is zero.
std::vector<double> lowpass_zero_phase(const std::vector<double>& x,
                                       double sample_rate, double cutoff);

/// Zero-phase band-pass: 4th-order Butterworth high-pass at f_lo cascaded
/// with 4th-order low-pass at f_hi, both applied forward-backward. Rejects
/// bands that are empty or reach the Nyquist frequency.
std::vector<double> bandpass_zero_phase(const std::vector<double>& x,
                                        double sample_rate, double f_lo = 4.0,
                                        double f_hi = 100.0);

struct PsdEstimate {
  std::vector<double> frequency;  // Hz
  std::vector<double> psd;        // V^2/Hz, one-sided
  double bin_width = 0.0;         // Hz
  int segments = 0;
};

/// Welch averaged periodogram with a periodic Hann window and per-segment
/// mean removal. segment_length is clamped down to a power of two; it must
/// not exceed the trace length. The one-sided integral of the estimate
/// approximates the trace variance.
PsdEstimate welch_psd(const std::vector<double>& x, double sample_rate,
                      std::size_t segment_length, double overlap = 0.5);

/// Mean of the PSD bins with f_lo <= f <= f_hi.
double band_mean(const PsdEstimate& est, double f_lo, double f_hi);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Requires >= 3 points and
/// at least two distinct abscissae.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace ecf::dsp
