#include "ecf/transit.hpp"

#include <cmath>

#include "ecf/constants.hpp"
#include "ecf/errors.hpp"
#include "ecf/rng.hpp"

namespace ecf {

double diffusion_coefficient(const Particle& p, const Medium& med) {
  if (!(p.radius > 0.0)) throw Error("diffusion_coefficient: radius must be positive");
  if (!(med.temperature >= 0.0) || !(med.viscosity > 0.0))
    throw Error("diffusion_coefficient: temperature must be non-negative and "
                "viscosity positive");
  return kBoltzmann * med.temperature /
         (6.0 * kPi * med.viscosity * p.radius);
}

double per_ml_to_per_m3(double per_ml) { return per_ml * 1e6; }

double diluted_concentration(double stock_per_ml, double added_ul,
                             double droplet_ml) {
  if (!(added_ul > 0.0) || !(droplet_ml > 0.0))
    throw Error("diluted_concentration: volumes must be positive");
  const double added_ml = added_ul * 1e-3;
  return stock_per_ml * added_ml / (droplet_ml + added_ml);
}

namespace {

// Fold a coordinate back into [lo, hi] by reflection.
double reflect(double v, double lo, double hi) {
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return v;
}

} // namespace

TransitResult simulate_transits(const Suspension& s, double gamma,
                                const ProbeBeam& beam, double eta,
                                const TransitConfig& cfg) {
  if (!(gamma > 0.0)) throw Error("simulate_transits: gamma must be positive");
  if (!(cfg.timestep > 0.0) || !(cfg.duration > 0.0))
    throw Error("simulate_transits: duration and timestep must be positive");
  if (!(cfg.region_length > 0.0) || !(cfg.region_width > 0.0))
    throw Error("simulate_transits: region dimensions must be positive");
  if (s.concentration < 0.0)
    throw Error("simulate_transits: negative concentration");
  if (eta < 0.0 || eta > 1.0)
    throw Error("simulate_transits: eta must lie in [0, 1]");

  const double height =
      cfg.region_height > 0.0 ? cfg.region_height : 4.0 * gamma;
  if (height < 4.0 * gamma)
    throw Error("simulate_transits: region height must be >= 4 gamma");

  const double d_coeff = diffusion_coefficient(s.particle, s.medium);
  const double step_sigma = std::sqrt(2.0 * d_coeff * cfg.timestep);
  if (step_sigma > gamma)
    throw Error("simulate_transits: timestep too coarse, rms step exceeds the "
                "decay length");

  const double sigma_scatt =
      dipole_cross_section(s.particle, s.medium, beam.wavelength);
  const double p_scatt = scattered_power(beam, sigma_scatt);
  const double weight = evanescent_weight(s.particle.radius, gamma);
  const double contact = collected_power(p_scatt, eta) * weight * weight;

  TransitResult result;
  result.timestep = cfg.timestep;
  result.contact_power_w = contact;

  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(cfg.duration / cfg.timestep)) + 1;
  result.envelope_w.assign(n_steps, 0.0);

  RandomStream rng(cfg.seed);
  const double half_l = 0.5 * cfg.region_length;
  const double half_w = 0.5 * cfg.region_width;
  struct Pos {
    double x, y, z;
  };
  std::vector<Pos> pos;
  if (!cfg.initial_positions.empty()) {
    for (const auto& q : cfg.initial_positions)
      pos.push_back(Pos{q[0], q[1], q[2]});
  } else {
    const double volume = cfg.region_length * cfg.region_width * height;
    const std::uint64_t n_particles = rng.poisson(s.concentration * volume);
    pos.resize(n_particles);
    for (auto& p : pos) {
      p.x = rng.uniform(-half_l, half_l);
      p.y = rng.uniform(-half_w, half_w);
      p.z = rng.uniform(0.0, height);
    }
  }
  result.particle_count = pos.size();
  if (pos.empty()) return result;

  const double inv_gamma2 = 2.0 / gamma;
  const double inv_w2 = 2.0 / (beam.waist * beam.waist);
  for (std::size_t t = 0; t < n_steps; ++t) {
    double total = 0.0;
    for (auto& p : pos) {
      total += contact * std::exp(-p.z * inv_gamma2 - p.x * p.x * inv_w2);
      p.x = reflect(p.x + step_sigma * rng.normal(), -half_l, half_l);
      p.y = reflect(p.y + step_sigma * rng.normal(), -half_w, half_w);
      p.z = reflect(p.z + step_sigma * rng.normal(), 0.0, height);
    }
    result.envelope_w[t] = total;
  }

  // Ground truth: contiguous excursions above 10% of the single-particle
  // contact maximum, peaks recorded relative to that maximum.
  const double floor = 0.1 * contact;
  bool open = false;
  DetectionEvent cur;
  for (std::size_t t = 0; t < n_steps; ++t) {
    const double v = result.envelope_w[t];
    const double time = t * cfg.timestep;
    if (v > floor) {
      if (!open) {
        open = true;
        cur = DetectionEvent{time, time + cfg.timestep, v / contact, v / contact};
      } else {
        cur.end_s = time + cfg.timestep;
        if (v / contact > cur.peak_sigma) cur.peak_sigma = v / contact;
      }
    } else if (open) {
      open = false;
      cur.snr = cur.peak_sigma;
      result.truth_events.push_back(cur);
    }
  }
  if (open) {
    cur.snr = cur.peak_sigma;
    result.truth_events.push_back(cur);
  }
  return result;
}

} // namespace ecf
