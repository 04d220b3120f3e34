#include "ecf/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"

namespace ecf {

double dipole_cross_section(const Particle& p, const Medium& med,
                            double wavelength, bool wavevector_in_medium) {
  if (!(p.radius >= 0.0)) throw Error("dipole_cross_section: negative radius");
  if (!(p.index >= 1.0) || !(med.index >= 1.0))
    throw Error("dipole_cross_section: refractive index below 1");
  if (!(wavelength > 0.0))
    throw Error("dipole_cross_section: wavelength must be positive");

  const double k = 2.0 * kPi * (wavevector_in_medium ? med.index : 1.0) / wavelength;
  const double m = p.index / med.index;
  const double pol = (m * m - 1.0) / (m * m + 2.0);
  const double a = p.radius;
  // Explicit multiply chain keeps power-of-two radius ratios exact.
  const double a2 = a * a;
  const double a6 = a2 * a2 * a2;
  const double k2 = k * k;
  const double k4 = k2 * k2;
  return (8.0 * kPi / 3.0) * k4 * a6 * pol * pol;
}

double scattered_power(const ProbeBeam& beam, double cross_section) {
  if (!(beam.power > 0.0) || !(beam.waist > 0.0) || !(beam.wavelength > 0.0))
    throw Error("scattered_power: beam parameters must be positive");
  if (cross_section < 0.0)
    throw Error("scattered_power: negative cross-section");
  return cross_section / (4.0 * kPi * beam.waist * beam.waist) * beam.power;
}

double evanescent_weight(double radius, double gamma,
                         EvanescentWeighting weighting) {
  if (!(radius > 0.0)) throw Error("evanescent_weight: radius must be positive");
  if (!(gamma > 0.0)) throw Error("evanescent_weight: gamma must be positive");

  double x = radius / gamma;
  if (weighting == EvanescentWeighting::kIntensity) x *= 2.0;
  if (x == 0.0) return 1.0;
  if (x < 1e-4) {
    // series of the closed form below, stable where the cancellation bites
    return 1.0 - x + 0.6 * x * x;
  }
  // (1/V) integral over a tangent sphere of exp(-z/gamma):
  //   W(x) = 3 [ (x - 1) + (x + 1) e^{-2x} ] / (2 x^3),  x = a / gamma
  return 3.0 * ((x - 1.0) + (x + 1.0) * std::exp(-2.0 * x)) / (2.0 * x * x * x);
}

double collected_power(double scattered_power_w, double eta) {
  if (eta < 0.0 || eta > 1.0)
    throw Error("collected_power: eta must lie in [0, 1]");
  if (scattered_power_w < 0.0)
    throw Error("collected_power: negative scattered power");
  return eta * scattered_power_w;
}

CollectionEfficiency::CollectionEfficiency(double constant)
    : constant_(constant) {
  if (constant < 0.0 || constant > 1.0)
    throw Error("CollectionEfficiency: constant eta must lie in [0, 1]");
}

CollectionEfficiency::CollectionEfficiency(std::vector<double> radii,
                                           std::vector<double> etas)
    : constant_(0.0), radii_(std::move(radii)), etas_(std::move(etas)) {
  if (radii_.size() != etas_.size() || radii_.size() < 2)
    throw Error("CollectionEfficiency: table needs >= 2 matching entries");
  if (!std::is_sorted(radii_.begin(), radii_.end()))
    throw Error("CollectionEfficiency: table radii must be ascending");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0.0) || !(etas_[i] > 0.0) || etas_[i] > 1.0)
      throw Error("CollectionEfficiency: table values out of range");
  }
}

double CollectionEfficiency::at(double radius) const {
  if (radii_.empty()) return constant_;
  if (radius <= radii_.front()) return etas_.front();
  if (radius >= radii_.back()) return etas_.back();
  auto it = std::upper_bound(radii_.begin(), radii_.end(), radius);
  const std::size_t i = static_cast<std::size_t>(it - radii_.begin());
  const double t = (std::log(radius) - std::log(radii_[i - 1])) /
                   (std::log(radii_[i]) - std::log(radii_[i - 1]));
  return std::exp((1.0 - t) * std::log(etas_[i - 1]) + t * std::log(etas_[i]));
}

RadiusScalingCurve radius_scaling_curve(const std::vector<double>& radii,
                                        double particle_index,
                                        const Medium& med,
                                        const ProbeBeam& beam, double gamma,
                                        const CollectionEfficiency& eta,
                                        double normalization_radius,
                                        const ScalingOptions& options) {
  if (radii.empty()) throw Error("radius_scaling_curve: empty radius sweep");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw Error("radius_scaling_curve: radii must be ascending");

  std::ptrdiff_t norm_idx = -1;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (std::abs(radii[i] - normalization_radius) <=
        1e-12 * std::max(radii[i], normalization_radius))
      norm_idx = static_cast<std::ptrdiff_t>(i);
  }
  if (norm_idx < 0)
    throw Error("radius_scaling_curve: normalization radius is not one of the "
                "sweep radii");

  RadiusScalingCurve curve;
  curve.radii = radii;
  curve.normalization_radius = radii[static_cast<std::size_t>(norm_idx)];
  const std::size_t n = radii.size();
  curve.amplitude_dipole.resize(n);
  curve.amplitude_corrected.resize(n);
  curve.scattered_power_w.resize(n);
  curve.collected_power_w.resize(n);

  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    Particle p{radii[i], particle_index, ""};
    const double sigma = dipole_cross_section(p, med, beam.wavelength,
                                              options.wavevector_in_medium);
    curve.scattered_power_w[i] = scattered_power(beam, sigma);
    curve.collected_power_w[i] =
        collected_power(curve.scattered_power_w[i], eta.at(radii[i]));
    weight[i] = std::isinf(gamma)
                    ? 1.0
                    : evanescent_weight(radii[i], gamma, options.weighting);
  }

  const std::size_t k = static_cast<std::size_t>(norm_idx);
  curve.calibration_constant = 1.0 / std::sqrt(curve.collected_power_w[k]);
  const double corr_scale = curve.calibration_constant / weight[k];
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = std::sqrt(curve.collected_power_w[i]);
    curve.amplitude_dipole[i] = curve.calibration_constant * amp;
    curve.amplitude_corrected[i] = corr_scale * amp * weight[i];
  }
  return curve;
}

} // namespace ecf
