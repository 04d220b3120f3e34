#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecf/events.hpp"
#include "ecf/scattering.hpp"

namespace ecf {

/// Nanoparticle suspension above the exposed face.
struct Suspension {
  Particle particle;
  double concentration = 0.0;  // particles per m^3
  Medium medium;
};

/// Brownian-dynamics run configuration. The interaction region is a box
/// sitting on the fiber surface: x along the fiber axis, y across it, z the
/// height above the surface. Walls are reflective.
struct TransitConfig {
  double duration = 10.0;       // s
  double timestep = 1e-4;       // s
  double region_length = 10e-6; // m, along the fiber axis
  double region_width = 6e-6;   // m
  double region_height = 0.0;   // m; 0 means 4 * gamma
  std::uint64_t seed = 1;
  /// When non-empty, bypasses the Poisson draw and places particles at these
  /// (x, y, z) positions.
  std::vector<std::array<double, 3>> initial_positions;
};

/// Stokes-Einstein diffusion coefficient k_B T / (6 pi mu a).
double diffusion_coefficient(const Particle& p, const Medium& med);

/// Convert a per-mL bench concentration to per-m^3.
double per_ml_to_per_m3(double per_ml);

/// Concentration after adding `added_ul` of stock to a `droplet_ml` droplet.
double diluted_concentration(double stock_per_ml, double added_ul,
                             double droplet_ml);

struct TransitResult {
  std::vector<double> envelope_w;  // collected power P_sig(t), W
  double timestep = 0.0;           // s
  /// Contiguous intervals where the envelope exceeds 10% of the
  /// single-particle contact maximum. Peak/SNR fields hold the envelope peak
  /// relative to that maximum.
  std::vector<DetectionEvent> truth_events;
  double contact_power_w = 0.0;    // eta * P_scatt * W^2, the per-particle cap
  std::uint64_t particle_count = 0;
};

/// Simulate Brownian transits through the evanescent region and assemble the
/// collected-power envelope
///   P_sig(t) = sum_p  eta P_scatt W(a,gamma)^2 exp(-2 z_p/gamma) g(x_p),
/// with g the transverse beam intensity profile exp(-2 x^2 / w^2). The
/// particle count is Poisson in (concentration x region volume); everything
/// is deterministic per seed. Errors when a step sqrt(2 D dt) would exceed
/// gamma.
TransitResult simulate_transits(const Suspension& s, double gamma,
                                const ProbeBeam& beam, double eta,
                                const TransitConfig& cfg);

} // namespace ecf
