#pragma once

#include <cstdint>
#include <vector>

namespace ecf {

/// Parametric description of the simulated fiber cross-section: a circular
/// silica core carved by three circular holes, one of which is open to the
/// surrounding medium. The open hole is always filled with the background
/// medium; the two internal holes carry their own fill index (air or water).
/// Everything outside the core is background medium — the thick outer
/// cladding is not part of the model.
struct FiberGeometry {
  double core_diameter = 2.0e-6;   // m
  double core_index = 1.454;       // silica at the working wavelength
  double medium_index = 1.333;     // background (water)

  // Open hole: carved into the core toward +y, filled with the medium.
  double open_hole_radius = 1.2e-6;    // m
  double open_hole_distance = 2.0e-6;  // center offset from fiber axis, m
  // Internal holes: mirrored pair at +-120 degrees from the open hole.
  double internal_hole_radius = 1.2e-6;
  double internal_hole_distance = 2.0e-6;
  double internal_hole_index = 1.333;  // 1.0 for air-filled

  double open_hole_angle = 1.5707963267948966;  // rad, +y

  /// Material index at a physical point (x, y) in meters.
  double index_at(double x, double y) const;

  /// Uniform rod helper: no holes, plain circular core.
  static FiberGeometry circular_rod(double diameter, double core_index,
                                    double medium_index);

  /// Canonical exposed-core shape: hole radii and offsets scale with the
  /// core diameter so drawn-down variants keep their proportions. The open
  /// hole is slightly larger than the internal pair, which splits the
  /// higher-order mode degeneracies of a perfectly threefold geometry.
  static FiberGeometry exposed_core(double diameter, double core_index = 1.454,
                                    double medium_index = 1.333,
                                    double internal_index = 1.333);

  std::uint64_t hash() const;
};

/// Uniform-grid resolution request for rasterization.
struct GridSpec {
  double spacing = 20e-9;   // m, cell pitch
  double extent_x = 4e-6;   // m, full window width  (centered on the axis)
  double extent_y = 4e-6;   // m, full window height
};

/// Discretized refractive-index map of the cross-section at one wavelength.
/// Cell (ix, iy) is centered at (x0 + (ix+0.5)h, y0 + (iy+0.5)h); the map is
/// reproducible bit-for-bit from (geometry, grid).
struct CrossSection {
  double spacing = 0.0;     // m
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;          // m, lower-left window corner
  double y0 = 0.0;
  double wavelength = 780e-9;
  FiberGeometry geometry;
  std::vector<double> index;  // row-major, ny rows of nx

  double at(int ix, int iy) const { return index[static_cast<std::size_t>(iy) * nx + ix]; }
  double cell_x(int ix) const { return x0 + (ix + 0.5) * spacing; }
  double cell_y(int iy) const { return y0 + (iy + 0.5) * spacing; }
  double max_index() const;
  double cell_area() const { return spacing * spacing; }
};

/// Rasterize the geometry onto a centered uniform grid. Cells take the index
/// of the material at their center. Rejects non-positive spacing, fewer than
/// 20 cells across the core, and windows that truncate the core.
CrossSection build_cross_section(const FiberGeometry& geometry,
                                 const GridSpec& grid,
                                 double wavelength = 780e-9);

} // namespace ecf
