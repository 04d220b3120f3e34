#include "ecf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"
#include "ecf/rng.hpp"

namespace ecf {

namespace {

inline bool inside_circle(double x, double y, double cx, double cy, double r) {
  const double dx = x - cx;
  const double dy = y - cy;
  return dx * dx + dy * dy < r * r;
}

} // namespace

double FiberGeometry::index_at(double x, double y) const {
  // Holes take precedence over the core; outside the core is medium.
  const double a0 = open_hole_angle;
  const double ox = open_hole_distance * std::cos(a0);
  const double oy = open_hole_distance * std::sin(a0);
  if (inside_circle(x, y, ox, oy, open_hole_radius)) return medium_index;

  for (int s : {-1, 1}) {
    const double a = a0 + s * 2.0 * kPi / 3.0;
    const double hx = internal_hole_distance * std::cos(a);
    const double hy = internal_hole_distance * std::sin(a);
    if (inside_circle(x, y, hx, hy, internal_hole_radius))
      return internal_hole_index;
  }

  if (inside_circle(x, y, 0.0, 0.0, 0.5 * core_diameter)) return core_index;
  return medium_index;
}

FiberGeometry FiberGeometry::circular_rod(double diameter, double core_index,
                                          double medium_index) {
  FiberGeometry g;
  g.core_diameter = diameter;
  g.core_index = core_index;
  g.medium_index = medium_index;
  // Push the holes far outside the window so they never carve anything.
  g.open_hole_distance = 1.0;
  g.internal_hole_distance = 1.0;
  g.internal_hole_index = medium_index;
  return g;
}

FiberGeometry FiberGeometry::exposed_core(double diameter, double core_index,
                                          double medium_index,
                                          double internal_index) {
  FiberGeometry g;
  g.core_diameter = diameter;
  g.core_index = core_index;
  g.medium_index = medium_index;
  g.internal_hole_index = internal_index;
  g.open_hole_radius = 0.70 * diameter;
  g.open_hole_distance = 1.05 * diameter;
  g.internal_hole_radius = 0.60 * diameter;
  g.internal_hole_distance = 1.00 * diameter;
  return g;
}

std::uint64_t FiberGeometry::hash() const {
  std::uint64_t h = fnv1a(core_diameter);
  h = fnv1a(core_index, h);
  h = fnv1a(medium_index, h);
  h = fnv1a(open_hole_radius, h);
  h = fnv1a(open_hole_distance, h);
  h = fnv1a(internal_hole_radius, h);
  h = fnv1a(internal_hole_distance, h);
  h = fnv1a(internal_hole_index, h);
  h = fnv1a(open_hole_angle, h);
  return h;
}

double CrossSection::max_index() const {
  return *std::max_element(index.begin(), index.end());
}

CrossSection build_cross_section(const FiberGeometry& geometry,
                                 const GridSpec& grid, double wavelength) {
  if (!(grid.spacing > 0.0))
    throw Error("build_cross_section: grid spacing must be positive");
  if (!(geometry.core_diameter > 0.0))
    throw Error("build_cross_section: core diameter must be positive");
  if (!(wavelength > 0.0))
    throw Error("build_cross_section: wavelength must be positive");
  if (geometry.core_diameter / grid.spacing < 20.0)
    throw Error("build_cross_section: fewer than 20 cells across the core");
  if (grid.extent_x < geometry.core_diameter || grid.extent_y < geometry.core_diameter)
    throw Error("build_cross_section: window truncates the core");
  for (double idx : {geometry.core_index, geometry.medium_index,
                     geometry.internal_hole_index}) {
    if (idx < 1.0)
      throw Error("build_cross_section: refractive index below 1: " +
                  std::to_string(idx));
  }

  CrossSection cs;
  cs.spacing = grid.spacing;
  cs.nx = static_cast<int>(std::llround(grid.extent_x / grid.spacing));
  cs.ny = static_cast<int>(std::llround(grid.extent_y / grid.spacing));
  cs.x0 = -0.5 * cs.nx * grid.spacing;
  cs.y0 = -0.5 * cs.ny * grid.spacing;
  cs.wavelength = wavelength;
  cs.geometry = geometry;
  cs.index.resize(static_cast<std::size_t>(cs.nx) * cs.ny);

  for (int iy = 0; iy < cs.ny; ++iy) {
    const double y = cs.cell_y(iy);
    for (int ix = 0; ix < cs.nx; ++ix) {
      cs.index[static_cast<std::size_t>(iy) * cs.nx + ix] =
          geometry.index_at(cs.cell_x(ix), y);
    }
  }
  return cs;
}

} // namespace ecf
