#pragma once

#include <cstdint>
#include <vector>

#include "ecf/geometry.hpp"

namespace ecf {

/// Scalar guided mode on the cross-section grid.
///
/// The field is stored row-major on the full window including the zero
/// boundary ring, normalized to unit discrete power: sum(psi^2) * h^2 = 1.
struct GuidedMode {
  double n_eff = 0.0;
  std::vector<double> field;
  int ordinal = 0;          // 0 = fundamental
  double wavelength = 0.0;  // m
  double residual = 0.0;    // relative eigen-residual at acceptance
};

struct ModeSolveOptions {
  double tolerance = 1e-9;   // relative eigen-residual target
  int max_iterations = 1500;
  int extra_block = 4;       // trailing guard vectors beyond the request
  std::uint64_t seed_mix = 0;
};

/// Solve (laplacian + k0^2 n^2) psi = beta^2 psi on the index map with a
/// homogeneous Dirichlet window boundary, reporting up to n_modes solutions
/// with n_eff above the background medium index in decreasing n_eff order.
///
/// Shift-invert block iteration: the operator is factored once at a shift
/// just above the top of its spectrum (k0^2 n_max^2), and a deterministic
/// geometry-seeded block is iterated with Rayleigh-Ritz extraction until the
/// leading pairs converge. Throws NoGuidedModeError when nothing guides and
/// ConvergenceError (with the iteration count) when the residual target is
/// not met.
std::vector<GuidedMode> solve_modes(const CrossSection& cs, int n_modes,
                                    const ModeSolveOptions& options = {});

/// Axis-aligned rectangle in physical coordinates, half-open in both axes.
struct Region {
  double x_min, x_max;
  double y_min, y_max;
};

/// Discrete power of a field map over a region: sum(psi^2) * cell area for
/// cells whose center lies in [x_min, x_max) x [y_min, y_max). Additive over
/// disjoint regions; errors if the region leaves the window or contains no
/// cell centers.
double mode_power(const CrossSection& cs, const std::vector<double>& field,
                  const Region& region);

/// Full-window region helper.
Region full_window(const CrossSection& cs);

} // namespace ecf
