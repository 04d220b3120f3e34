#include "ecf/mode_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"
#include "ecf/rng.hpp"

namespace ecf {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;

// Assemble A = sigma*I - H over interior cells, H = discrete transverse
// Laplacian + k0^2 n^2. With sigma above the whole spectrum of H, A is
// symmetric positive definite and a single Cholesky factorization serves
// every iteration.
SparseMat assemble_shifted(const CrossSection& cs, double k0, double sigma) {
  const int mx = cs.nx - 2;  // interior cells
  const int my = cs.ny - 2;
  const double inv_h2 = 1.0 / (cs.spacing * cs.spacing);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mx) * my * 5);
  auto id = [mx](int ix, int iy) { return iy * mx + ix; };

  for (int iy = 0; iy < my; ++iy) {
    for (int ix = 0; ix < mx; ++ix) {
      const double n = cs.at(ix + 1, iy + 1);
      const int row = id(ix, iy);
      trip.emplace_back(row, row, sigma + 4.0 * inv_h2 - k0 * k0 * n * n);
      if (ix > 0) trip.emplace_back(row, id(ix - 1, iy), -inv_h2);
      if (ix < mx - 1) trip.emplace_back(row, id(ix + 1, iy), -inv_h2);
      if (iy > 0) trip.emplace_back(row, id(ix, iy - 1), -inv_h2);
      if (iy < my - 1) trip.emplace_back(row, id(ix, iy + 1), -inv_h2);
    }
  }

  SparseMat a(mx * my, mx * my);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

} // namespace

std::vector<GuidedMode> solve_modes(const CrossSection& cs, int n_modes,
                                    const ModeSolveOptions& options) {
  if (n_modes < 1) throw Error("solve_modes: n_modes must be >= 1");
  if (cs.nx < 5 || cs.ny < 5) throw Error("solve_modes: grid too small");

  const double k0 = 2.0 * kPi / cs.wavelength;
  const double n_max = cs.max_index();
  const double n_bg = cs.geometry.medium_index;
  if (n_max <= n_bg)
    throw NoGuidedModeError(
        "solve_modes: no index contrast above the background medium");

  const double lambda_guided = k0 * k0 * n_bg * n_bg;  // light line in beta^2
  const double sigma = k0 * k0 * n_max * n_max * (1.0 + 1e-12);

  const int n = (cs.nx - 2) * (cs.ny - 2);
  const int block = std::min(n, n_modes + std::max(1, options.extra_block));

  SparseMat a = assemble_shifted(cs, k0, sigma);
  Eigen::SimplicialLLT<SparseMat> chol(a);
  if (chol.info() != Eigen::Success)
    throw Error("solve_modes: factorization of the shifted operator failed");

  // Deterministic start block derived from the geometry and grid.
  std::uint64_t seed = cs.geometry.hash();
  seed = fnv1a(cs.spacing, seed);
  seed = fnv1a(static_cast<double>(cs.nx), seed);
  seed = fnv1a(static_cast<double>(cs.ny), seed);
  seed = fnv1a(cs.wavelength, seed);
  seed ^= options.seed_mix;
  RandomStream rng(seed);

  Eigen::MatrixXd x(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = rng.normal();

  Eigen::VectorXd theta(block);
  Eigen::VectorXd resid(block);
  Eigen::MatrixXd hx;
  int iter = 0;
  bool done = false;
  int guided_converged = 0;
  bool exhausted = false;  // a converged pair fell below the light line

  for (iter = 1; iter <= options.max_iterations; ++iter) {
    x = chol.solve(x);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);

    hx = sigma * x - a * x;  // H X
    Eigen::MatrixXd s = x.transpose() * hx;
    s = 0.5 * (s + s.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    // Rayleigh-Ritz values ascending; we want beta^2 descending.
    Eigen::VectorXi order(block);
    for (int j = 0; j < block; ++j) order(j) = block - 1 - j;
    Eigen::MatrixXd u(block, block);
    for (int j = 0; j < block; ++j) {
      theta(j) = es.eigenvalues()(order(j));
      u.col(j) = es.eigenvectors().col(order(j));
    }
    x = (x * u).eval();
    hx = (hx * u).eval();

    for (int j = 0; j < block; ++j) {
      const double denom = std::abs(theta(j));
      resid(j) = denom > 0.0 ? (hx.col(j) - theta(j) * x.col(j)).norm() / denom
                             : 1.0;
    }

    // Leading converged prefix decides what we can trust.
    int prefix = 0;
    while (prefix < block && resid(prefix) < options.tolerance) ++prefix;

    guided_converged = 0;
    exhausted = false;
    for (int j = 0; j < prefix; ++j) {
      if (theta(j) > lambda_guided) {
        ++guided_converged;
      } else {
        exhausted = true;
        break;
      }
    }
    if (guided_converged >= n_modes || exhausted) {
      done = true;
      break;
    }
    // The guard vectors at the tail are allowed to stay unconverged, but if
    // the whole block is already below the light line there is nothing to
    // wait for.
    if (prefix == block) {
      done = true;
      exhausted = true;
      break;
    }
  }

  if (!done)
    throw ConvergenceError("solve_modes: eigensolver did not reach tolerance " +
                               std::to_string(options.tolerance),
                           iter - 1);
  if (guided_converged == 0)
    throw NoGuidedModeError(
        "solve_modes: no eigenvalue above the background light line");

  const int count = std::min(n_modes, guided_converged);
  std::vector<GuidedMode> modes(count);
  const double cell = cs.cell_area();
  for (int j = 0; j < count; ++j) {
    GuidedMode& m = modes[j];
    m.n_eff = std::sqrt(theta(j)) / k0;
    m.ordinal = j;
    m.wavelength = cs.wavelength;
    m.residual = resid(j);
    m.field.assign(static_cast<std::size_t>(cs.nx) * cs.ny, 0.0);

    // Scatter interior unknowns into the full window, unit discrete power,
    // sign fixed so the peak is positive.
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += x(i, j) * x(i, j);
    double scale = 1.0 / std::sqrt(norm2 * cell);
    int peak = 0;
    double peak_abs = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = std::abs(x(i, j));
      if (v > peak_abs) {
        peak_abs = v;
        peak = i;
      }
    }
    if (x(peak, j) < 0.0) scale = -scale;
    const int mx = cs.nx - 2;
    for (int iy = 0; iy < cs.ny - 2; ++iy)
      for (int ix = 0; ix < mx; ++ix)
        m.field[static_cast<std::size_t>(iy + 1) * cs.nx + (ix + 1)] =
            x(iy * mx + ix, j) * scale;
  }

  // Ritz ordering is already descending; keep it stable and explicit.
  std::stable_sort(modes.begin(), modes.end(),
                   [](const GuidedMode& a, const GuidedMode& b) {
                     return a.n_eff > b.n_eff;
                   });
  for (int j = 0; j < count; ++j) modes[j].ordinal = j;
  return modes;
}

Region full_window(const CrossSection& cs) {
  return Region{cs.x0, cs.x0 + cs.nx * cs.spacing, cs.y0,
                cs.y0 + cs.ny * cs.spacing};
}

double mode_power(const CrossSection& cs, const std::vector<double>& field,
                  const Region& region) {
  if (field.size() != static_cast<std::size_t>(cs.nx) * cs.ny)
    throw Error("mode_power: field size does not match the grid");
  const double eps = 1e-12;
  if (region.x_min < cs.x0 - eps || region.y_min < cs.y0 - eps ||
      region.x_max > cs.x0 + cs.nx * cs.spacing + eps ||
      region.y_max > cs.y0 + cs.ny * cs.spacing + eps)
    throw Error("mode_power: region extends outside the grid window");

  double power = 0.0;
  std::size_t cells = 0;
  for (int iy = 0; iy < cs.ny; ++iy) {
    const double y = cs.cell_y(iy);
    if (y < region.y_min || y >= region.y_max) continue;
    for (int ix = 0; ix < cs.nx; ++ix) {
      const double x = cs.cell_x(ix);
      if (x < region.x_min || x >= region.x_max) continue;
      const double v = field[static_cast<std::size_t>(iy) * cs.nx + ix];
      power += v * v;
      ++cells;
    }
  }
  if (cells == 0) throw Error("mode_power: region contains no cell centers");
  return power * cs.cell_area();
}

} // namespace ecf
