#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecf/geometry.hpp"
#include "ecf/heterodyne.hpp"
#include "ecf/scattering.hpp"
#include "ecf/transit.hpp"

namespace ecf {

/// Fully resolved run configuration. Parsing is strict: unknown keys and
/// out-of-range values are rejected with their key path; defaults are filled
/// in and recorded in `resolved`, which re-parses to the same configuration.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int workers = 0;  // 0 = hardware concurrency

  // geometry
  FiberGeometry geometry;
  GridSpec grid;
  double wavelength = 780e-9;
  int n_modes = 5;

  // materials
  double silica_index = 1.45;
  double polystyrene_index = 1.59;
  Medium medium;
  double eta = 0.072;
  std::vector<double> eta_table_radii;   // m; empty = constant eta
  std::vector<double> eta_table_values;
  bool wavevector_in_medium = true;
  EvanescentWeighting weighting = EvanescentWeighting::kAmplitude;

  ProbeBeam beam;

  HeterodyneConfig heterodyne;
  double lockin_cutoff = 1e3;  // Hz
  int decimation = 50;

  NoiseBudget noise;
  bool shot_auto = true;   // derive the shot coefficient from the detector
  bool onef_auto = false;  // calibrate the 1/f crossover to the corner

  // transit
  std::string transit_material = "silica";
  double particle_radius = 50e-9;     // m
  double concentration_per_ml = 3.7e9;
  bool apply_dilution = true;
  double added_ul = 40.0;
  double droplet_ml = 0.6;
  TransitConfig transit;
  double region_height_gamma = 4.0;

  // detection
  double threshold_sigma = 5.0;
  double min_separation_s = 0.010;
  double bandpass_lo = 4.0;   // Hz
  double bandpass_hi = 100.0; // Hz

  // sweep
  std::vector<double> sweep_radii;        // m
  double normalization_radius = 50e-9;    // m
  std::vector<double> lo_powers;          // W
  double noise_duration = 5.0;            // s per LO point
  std::size_t psd_segment = 4096;
  double fit_band_lo = 1e3;   // Hz
  double fit_band_hi = 11e3;  // Hz

  nlohmann::ordered_json resolved;
  std::string config_hash;

  /// Effective collection efficiency (constant or table).
  CollectionEfficiency collection_efficiency() const;
  /// Particle built from the transit section and the material table.
  Particle transit_particle() const;
  /// Concentration in particles per m^3 after the optional droplet dilution.
  double concentration_per_m3() const;
  /// Noise budget with auto-derived terms resolved.
  NoiseBudget resolved_noise(double lo_power_w) const;
};

/// Parse a config file. Missing file, unknown keys, malformed values, and
/// out-of-range values raise ConfigError with the key path.
RunConfig parse_config(const std::filesystem::path& path);

/// Parse from an in-memory document (same validation).
RunConfig config_from_json(const nlohmann::ordered_json& doc);

} // namespace ecf
