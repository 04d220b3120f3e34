#include "ecf/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"

namespace ecf::dsp {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error("fft: size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& c : a) c *= inv_n;
  }
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Bilinear-transform biquad for one analog Butterworth pole pair of quality
// factor q; kind selects low-pass or high-pass.
Biquad butter_biquad(double cutoff, double sample_rate, double q, bool highpass) {
  const double k = std::tan(kPi * cutoff / sample_rate);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + k / q + k2);
  Biquad s{};
  if (!highpass) {
    s.b0 = k2 * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
  } else {
    s.b0 = norm;
    s.b1 = -2.0 * norm;
    s.b2 = norm;
  }
  s.a1 = 2.0 * (k2 - 1.0) * norm;
  s.a2 = (1.0 - k / q + k2) * norm;
  return s;
}

void run_cascade(std::vector<double>& x, const std::vector<Biquad>& sos) {
  for (const Biquad& s : sos) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : x) {
      const double y = s.b0 * v + z1;
      z1 = s.b1 * v - s.a1 * y + z2;
      z2 = s.b2 * v - s.a2 * y;
      v = y;
    }
  }
}

// Forward-backward run with odd-reflection padding long enough to absorb the
// start-up transient of the lowest corner in the cascade.
std::vector<double> filtfilt(const std::vector<double>& x,
                             const std::vector<Biquad>& sos,
                             double sample_rate, double lowest_corner) {
  if (x.size() < 2) throw Error("filtfilt: series too short");
  const std::size_t pad = std::min(
      x.size() - 1,
      static_cast<std::size_t>(std::ceil(3.0 * sample_rate / lowest_corner)));

  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i)
    ext.push_back(2.0 * x.back() - x[x.size() - 1 - i]);

  run_cascade(ext, sos);
  std::reverse(ext.begin(), ext.end());
  run_cascade(ext, sos);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
}

// 4th-order Butterworth pole-pair quality factors.
constexpr double kButterQ1 = 0.54119610014619698;  // 1 / (2 cos(pi/8))
constexpr double kButterQ2 = 1.30656296487637653;  // 1 / (2 cos(3 pi/8))

} // namespace

std::vector<double> lowpass_zero_phase(const std::vector<double>& x,
                                       double sample_rate, double cutoff) {
  if (!(cutoff > 0.0) || cutoff >= 0.5 * sample_rate)
    throw Error("lowpass_zero_phase: cutoff must lie in (0, Nyquist)");
  const std::vector<Biquad> sos{
      butter_biquad(cutoff, sample_rate, kButterQ1, false),
      butter_biquad(cutoff, sample_rate, kButterQ2, false)};
  return filtfilt(x, sos, sample_rate, cutoff);
}

std::vector<double> bandpass_zero_phase(const std::vector<double>& x,
                                        double sample_rate, double f_lo,
                                        double f_hi) {
  if (!(f_lo > 0.0) || !(f_lo < f_hi) || f_hi >= 0.5 * sample_rate)
    throw Error("bandpass_zero_phase: band must satisfy 0 < f_lo < f_hi < Nyquist");
  const std::vector<Biquad> sos{
      butter_biquad(f_lo, sample_rate, kButterQ1, true),
      butter_biquad(f_lo, sample_rate, kButterQ2, true),
      butter_biquad(f_hi, sample_rate, kButterQ1, false),
      butter_biquad(f_hi, sample_rate, kButterQ2, false)};
  return filtfilt(x, sos, sample_rate, f_lo);
}

PsdEstimate welch_psd(const std::vector<double>& x, double sample_rate,
                      std::size_t segment_length, double overlap) {
  if (segment_length > x.size())
    throw Error("welch_psd: trace shorter than the segment length");
  if (segment_length < 8) throw Error("welch_psd: segment length too small");
  if (!(overlap >= 0.0) || overlap >= 1.0)
    throw Error("welch_psd: overlap fraction must lie in [0, 1)");

  std::size_t n = 1;
  while (n * 2 <= segment_length) n *= 2;

  std::vector<double> window(n);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
    wsum2 += window[i] * window[i];
  }

  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(n * (1.0 - overlap)));
  PsdEstimate est;
  est.frequency.resize(n / 2 + 1);
  est.psd.assign(n / 2 + 1, 0.0);
  est.bin_width = sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) est.frequency[k] = k * est.bin_width;

  std::vector<std::complex<double>> buf(n);
  for (std::size_t start = 0; start + n <= x.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[start + i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      buf[i] = std::complex<double>((x[start + i] - mean) * window[i], 0.0);
    fft(buf);
    for (std::size_t k = 0; k <= n / 2; ++k)
      est.psd[k] += std::norm(buf[k]);
    ++est.segments;
  }
  if (est.segments == 0) throw Error("welch_psd: no complete segment");

  const double scale = 1.0 / (sample_rate * wsum2 * est.segments);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const bool interior = k != 0 && k != n / 2;
    est.psd[k] *= scale * (interior ? 2.0 : 1.0);
  }
  return est;
}

double band_mean(const PsdEstimate& est, double f_lo, double f_hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < est.frequency.size(); ++k) {
    if (est.frequency[k] < f_lo || est.frequency[k] > f_hi) continue;
    sum += est.psd[k];
    ++count;
  }
  if (count == 0) throw Error("band_mean: no PSD bins in the requested band");
  return sum / static_cast<double>(count);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw Error("fit_line: need >= 3 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0 || det < 1e-30 * n * sxx)
    throw Error("fit_line: degenerate abscissae (all equal)");

  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

} // namespace ecf::dsp
