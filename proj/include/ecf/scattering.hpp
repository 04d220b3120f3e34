#pragma once

#include <string>
#include <vector>

namespace ecf {

struct Particle {
  double radius;       // m
  double index;        // refractive index
  std::string material;
};

struct Medium {
  double index = 1.333;
  double temperature = 298.0;   // K
  double viscosity = 8.9e-4;    // Pa s
};

struct ProbeBeam {
  double power = 2e-3;        // W at the objective
  double waist = 3e-6;        // m
  double wavelength = 780e-9; // m
};

/// Dipole scattering cross-section sigma = (8 pi k^4 a^6 / 3) *
/// ((m^2-1)/(m^2+2))^2 with m = n_p / n_m. The wavevector is taken in the
/// medium (k = 2 pi n_m / lambda) unless wavevector_in_medium is false, in
/// which case the vacuum value 2 pi / lambda is used.
double dipole_cross_section(const Particle& p, const Medium& med,
                            double wavelength, bool wavevector_in_medium = true);

/// Power scattered out of a focused Gaussian probe: sigma / (4 pi w^2) * P_in.
double scattered_power(const ProbeBeam& beam, double cross_section);

enum class EvanescentWeighting {
  kAmplitude,  // field weight exp(-z / gamma)
  kIntensity,  // intensity weight exp(-2 z / gamma)
};

/// Mean evanescent weight over a sphere of radius a tangent to the surface:
/// (1/V) * integral of exp(-z/gamma) over the sphere. Closed form,
/// monotonically decreasing in a, -> 1 as a/gamma -> 0.
double evanescent_weight(double radius, double gamma,
                         EvanescentWeighting weighting = EvanescentWeighting::kAmplitude);

/// Collected power at one fiber end: eta * P_scatt. eta outside [0, 1] is an
/// error. Dual-end collection is handled downstream by the detection model.
double collected_power(double scattered_power_w, double eta);

/// Collection efficiency, either a constant or a per-radius table
/// interpolated linearly in (log radius, log eta). Outside the table the end
/// values are held.
class CollectionEfficiency {
public:
  explicit CollectionEfficiency(double constant = 0.072);
  CollectionEfficiency(std::vector<double> radii, std::vector<double> etas);
  double at(double radius) const;

private:
  double constant_;
  std::vector<double> radii_;
  std::vector<double> etas_;
};

/// Signal amplitude vs particle radius for the plain dipole model and the
/// sphere-cap-corrected model, both calibrated to agree at one radius.
struct RadiusScalingCurve {
  std::vector<double> radii;              // m
  std::vector<double> amplitude_dipole;   // dimensionless after calibration
  std::vector<double> amplitude_corrected;
  std::vector<double> scattered_power_w;
  std::vector<double> collected_power_w;
  double calibration_constant = 0.0;      // amplitude per sqrt(W)
  double normalization_radius = 0.0;      // m
};

struct ScalingOptions {
  bool wavevector_in_medium = true;
  EvanescentWeighting weighting = EvanescentWeighting::kAmplitude;
};

/// Build the radius-scaling curve: dipole amplitude proportional to
/// sqrt(collected power), corrected amplitude additionally multiplied by the
/// evanescent weight; both equal 1 at the normalization radius, which must be
/// one of the sweep radii.
RadiusScalingCurve radius_scaling_curve(const std::vector<double>& radii,
                                        double particle_index,
                                        const Medium& med,
                                        const ProbeBeam& beam, double gamma,
                                        const CollectionEfficiency& eta,
                                        double normalization_radius,
                                        const ScalingOptions& options = {});

} // namespace ecf
