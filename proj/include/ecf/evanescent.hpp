#pragma once

#include <vector>

#include "ecf/geometry.hpp"
#include "ecf/mode_solver.hpp"

namespace ecf {

/// Evanescent decay length lambda / (2 pi n_medium). Rejects non-positive
/// wavelength and medium index below 1.
double decay_length(double wavelength, double medium_index);

/// Field cut from the mode maximum into the open medium.
struct EvanescentProfile {
  double gamma_nominal = 0.0;   // m, from decay_length
  double gamma_fitted = 0.0;    // m, exponential fit of the sampled tail
  double surface_fraction = 0.0;  // field at the core surface / field maximum
  double surface_distance = 0.0;  // m, from the field maximum to the surface
  /// (distance from the core surface in m, field / field maximum); starts at
  /// the field maximum, so the first distances are negative.
  std::vector<std::pair<double, double>> samples;
};

/// Direction of the cut, radians; defaults to the open-hole direction.
struct CutSpec {
  double angle;          // rad
  double min_reach;      // m, required background depth beyond the surface
  CutSpec() : angle(1.5707963267948966), min_reach(0.0) {}
};

/// Sample the mode field along a ray from its maximum through the core
/// surface into the medium, at grid resolution. The surface is located by
/// bisection on the geometry descriptor, the fraction is the interpolated
/// field there over the global maximum, and the tail is fitted to a single
/// exponential. Errors if the cut leaves the window before min_reach (which
/// defaults to 4 nominal decay lengths) past the surface.
EvanescentProfile evanescent_profile(const GuidedMode& mode,
                                     const CrossSection& cs,
                                     const CutSpec& cut = CutSpec());

} // namespace ecf
