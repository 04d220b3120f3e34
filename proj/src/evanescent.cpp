#include "ecf/evanescent.hpp"

#include <algorithm>
#include <cmath>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"

namespace ecf {

double decay_length(double wavelength, double medium_index) {
  if (!(wavelength > 0.0))
    throw Error("decay_length: wavelength must be positive");
  if (!(medium_index >= 1.0))
    throw Error("decay_length: medium index must be >= 1");
  return wavelength / (2.0 * kPi * medium_index);
}

namespace {

// Bilinear interpolation of the field at a physical point; zero outside the
// cell-center hull (consistent with the Dirichlet window).
double field_at(const CrossSection& cs, const std::vector<double>& field,
                double x, double y) {
  const double fx = (x - cs.x0) / cs.spacing - 0.5;
  const double fy = (y - cs.y0) / cs.spacing - 0.5;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  if (ix < 0 || iy < 0 || ix + 1 >= cs.nx || iy + 1 >= cs.ny) return 0.0;
  const double tx = fx - ix;
  const double ty = fy - iy;
  auto f = [&](int i, int j) {
    return field[static_cast<std::size_t>(j) * cs.nx + i];
  };
  return (1 - tx) * (1 - ty) * f(ix, iy) + tx * (1 - ty) * f(ix + 1, iy) +
         (1 - tx) * ty * f(ix, iy + 1) + tx * ty * f(ix + 1, iy + 1);
}

bool in_window(const CrossSection& cs, double x, double y) {
  return x >= cs.x0 && x <= cs.x0 + cs.nx * cs.spacing && y >= cs.y0 &&
         y <= cs.y0 + cs.ny * cs.spacing;
}

} // namespace

EvanescentProfile evanescent_profile(const GuidedMode& mode,
                                     const CrossSection& cs,
                                     const CutSpec& cut) {
  if (mode.field.size() != static_cast<std::size_t>(cs.nx) * cs.ny)
    throw Error("evanescent_profile: mode does not match the grid");

  EvanescentProfile prof;
  prof.gamma_nominal = decay_length(cs.wavelength, cs.geometry.medium_index);
  const double reach =
      cut.min_reach > 0.0 ? cut.min_reach : 4.0 * prof.gamma_nominal;

  // Locate the field maximum on the grid.
  double peak = 0.0;
  int px = 0, py = 0;
  for (int iy = 0; iy < cs.ny; ++iy) {
    for (int ix = 0; ix < cs.nx; ++ix) {
      const double v = std::abs(mode.field[static_cast<std::size_t>(iy) * cs.nx + ix]);
      if (v > peak) {
        peak = v;
        px = ix;
        py = iy;
      }
    }
  }
  if (peak <= 0.0) throw Error("evanescent_profile: zero field");
  const double ox = cs.cell_x(px);
  const double oy = cs.cell_y(py);
  const double dx = std::cos(cut.angle);
  const double dy = std::sin(cut.angle);

  // The surface is the last core->medium transition along the ray, located
  // by scan plus bisection on the geometry descriptor.
  const double core_index = cs.geometry.core_index;
  const double step = cs.spacing;
  double s_inside = -1.0;
  const double window_diag =
      std::hypot(cs.nx * cs.spacing, cs.ny * cs.spacing);
  for (double s = 0.0; s <= window_diag; s += step) {
    if (!in_window(cs, ox + s * dx, oy + s * dy)) break;
    if (cs.geometry.index_at(ox + s * dx, oy + s * dy) == core_index)
      s_inside = s;
  }
  if (s_inside < 0.0)
    throw Error("evanescent_profile: cut does not start inside the core");
  double lo = s_inside, hi = s_inside + step;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cs.geometry.index_at(ox + mid * dx, oy + mid * dy) == core_index)
      lo = mid;
    else
      hi = mid;
  }
  const double s_surface = 0.5 * (lo + hi);
  prof.surface_distance = s_surface;

  if (!in_window(cs, ox + (s_surface + reach) * dx, oy + (s_surface + reach) * dy))
    throw Error("evanescent_profile: cut exits the grid window before the "
                "required reach past the surface");

  prof.surface_fraction =
      std::abs(field_at(cs, mode.field, ox + s_surface * dx, oy + s_surface * dy)) /
      peak;

  // Sample at grid resolution until the ray reaches the cell-center hull.
  for (double s = 0.0;; s += step) {
    const double x = ox + s * dx;
    const double y = oy + s * dy;
    if (!in_window(cs, x, y)) break;
    const double v = std::abs(field_at(cs, mode.field, x, y)) / peak;
    prof.samples.emplace_back(s - s_surface, v);
    if (s - s_surface > reach && v < 1e-9) break;
  }

  // Exponential fit of the tail: ln(field) regressed on distance over
  // [0.5, 3.5] nominal decay lengths past the surface.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npts = 0;
  for (const auto& [d, v] : prof.samples) {
    if (d < 0.5 * prof.gamma_nominal || d > 3.5 * prof.gamma_nominal) continue;
    if (v <= 0.0) continue;
    const double ly = std::log(v);
    sx += d;
    sy += ly;
    sxx += d * d;
    sxy += d * ly;
    ++npts;
  }
  if (npts >= 2) {
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    prof.gamma_fitted = slope < 0.0 ? -1.0 / slope : 0.0;
  }
  return prof;
}

} // namespace ecf
