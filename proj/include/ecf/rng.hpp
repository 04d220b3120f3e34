#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ecf/constants.hpp"

namespace ecf {

/// Deterministic random stream used everywhere randomness is needed.
///
/// Wraps mt19937_64 but implements the uniform/normal/poisson transforms
/// by hand so the generated sequence depends only on the seed, not on the
/// standard library's distribution internals.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    // 53 random mantissa bits
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; exactly two uniforms per pair of draws.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // avoid log(0)
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Poisson via Knuth's product method. Fine for the means used here
  /// (hundreds at most); switches to a normal approximation when exp(-mean)
  /// would underflow.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 600.0) {
      const double x = mean + std::sqrt(mean) * normal();
      return x < 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(x));
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a, used for config hashes and geometry-derived seeds.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(double v, std::uint64_t h = 1469598103934665603ULL) {
  return fnv1a(&v, sizeof(v), h);
}

} // namespace ecf
