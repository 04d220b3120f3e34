#include "ecf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ecf/errors.hpp"
#include "ecf/evanescent.hpp"
#include "ecf/rng.hpp"

namespace ecf {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key: " + (path.empty() ? key : path + "." + key));
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw ConfigError("expected a number at " + path + "." + key);
  return v->get<double>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean())
    throw ConfigError("expected a boolean at " + path + "." + key);
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string())
    throw ConfigError("expected a string at " + path + "." + key);
  return v->get<std::string>();
}

std::vector<double> get_array(const json& obj, const std::string& path,
                              const std::string& key,
                              const std::vector<double>& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_array())
    throw ConfigError("expected an array at " + path + "." + key);
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number())
      throw ConfigError("expected numbers in " + path + "." + key);
    out.push_back(e.get<double>());
  }
  return out;
}

void require_positive(double v, const std::string& where) {
  if (!(v > 0.0)) throw ConfigError("value must be positive at " + where);
}

void require_range(double v, double lo, double hi, const std::string& where) {
  if (!(v >= lo && v <= hi))
    throw ConfigError("value out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] at " + where);
}

} // namespace

CollectionEfficiency RunConfig::collection_efficiency() const {
  if (eta_table_radii.empty()) return CollectionEfficiency(eta);
  return CollectionEfficiency(eta_table_radii, eta_table_values);
}

Particle RunConfig::transit_particle() const {
  const double index =
      transit_material == "polystyrene" ? polystyrene_index : silica_index;
  return Particle{particle_radius, index, transit_material};
}

double RunConfig::concentration_per_m3() const {
  const double per_ml =
      apply_dilution ? diluted_concentration(concentration_per_ml, added_ul, droplet_ml)
                     : concentration_per_ml;
  return per_ml_to_per_m3(per_ml);
}

NoiseBudget RunConfig::resolved_noise(double lo_power_w) const {
  NoiseBudget b = noise;
  if (shot_auto) {
    HeterodyneConfig h = heterodyne;
    h.lo_power = lo_power_w;
    b.shot_psd_per_watt = h.shot_noise_coefficient();
  }
  if (onef_auto) b.calibrate_onef_crossover(2.0 * lo_power_w);
  return b;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(doc, "", {"seed", "output_dir", "workers", "geometry",
                           "materials", "beam", "heterodyne", "noise",
                           "transit", "detection", "sweep"});

  RunConfig cfg;

  if (const json* v = find(doc, "seed")) {
    if (!v->is_number_unsigned())
      throw ConfigError("expected a non-negative integer at seed");
    cfg.seed = v->get<std::uint64_t>();
  }
  cfg.output_dir = get_string(doc, "", "output_dir", cfg.output_dir);
  cfg.workers = static_cast<int>(get_number(doc, "", "workers", cfg.workers));
  if (cfg.workers < 0) throw ConfigError("value must be >= 0 at workers");

  if (const json* g = find(doc, "geometry")) {
    reject_unknown(*g, "geometry",
                   {"core_diameter_um", "core_index", "medium_index",
                    "wavelength_nm", "grid_spacing_nm", "window_um", "n_modes",
                    "open_hole", "internal_holes"});
    cfg.geometry.core_diameter =
        get_number(*g, "geometry", "core_diameter_um", 2.0) * 1e-6;
    cfg.geometry.core_index = get_number(*g, "geometry", "core_index", 1.454);
    cfg.geometry.medium_index = get_number(*g, "geometry", "medium_index", 1.333);
    cfg.wavelength = get_number(*g, "geometry", "wavelength_nm", 780.0) * 1e-9;
    cfg.grid.spacing = get_number(*g, "geometry", "grid_spacing_nm", 20.0) * 1e-9;
    const double window = get_number(*g, "geometry", "window_um", 4.0) * 1e-6;
    cfg.grid.extent_x = window;
    cfg.grid.extent_y = window;
    cfg.n_modes = static_cast<int>(get_number(*g, "geometry", "n_modes", 5));
    if (cfg.n_modes < 1) throw ConfigError("value must be >= 1 at geometry.n_modes");
    require_positive(cfg.geometry.core_diameter, "geometry.core_diameter_um");
    require_positive(cfg.wavelength, "geometry.wavelength_nm");
    require_positive(cfg.grid.spacing, "geometry.grid_spacing_nm");
    require_positive(window, "geometry.window_um");

    if (const json* oh = find(*g, "open_hole")) {
      reject_unknown(*oh, "geometry.open_hole", {"radius_um", "distance_um"});
      cfg.geometry.open_hole_radius =
          get_number(*oh, "geometry.open_hole", "radius_um",
                     cfg.geometry.open_hole_radius * 1e6) * 1e-6;
      cfg.geometry.open_hole_distance =
          get_number(*oh, "geometry.open_hole", "distance_um",
                     cfg.geometry.open_hole_distance * 1e6) * 1e-6;
      require_positive(cfg.geometry.open_hole_radius, "geometry.open_hole.radius_um");
    }
    if (const json* ih = find(*g, "internal_holes")) {
      reject_unknown(*ih, "geometry.internal_holes",
                     {"radius_um", "distance_um", "fill"});
      cfg.geometry.internal_hole_radius =
          get_number(*ih, "geometry.internal_holes", "radius_um",
                     cfg.geometry.internal_hole_radius * 1e6) * 1e-6;
      cfg.geometry.internal_hole_distance =
          get_number(*ih, "geometry.internal_holes", "distance_um",
                     cfg.geometry.internal_hole_distance * 1e6) * 1e-6;
      const std::string fill =
          get_string(*ih, "geometry.internal_holes", "fill", "water");
      if (fill == "water")
        cfg.geometry.internal_hole_index = cfg.geometry.medium_index;
      else if (fill == "air")
        cfg.geometry.internal_hole_index = 1.0;
      else
        throw ConfigError(
            "expected \"water\" or \"air\" at geometry.internal_holes.fill");
      require_positive(cfg.geometry.internal_hole_radius,
                       "geometry.internal_holes.radius_um");
    } else {
      cfg.geometry.internal_hole_index = cfg.geometry.medium_index;
    }
  } else {
    cfg.geometry.internal_hole_index = cfg.geometry.medium_index;
  }

  if (const json* m = find(doc, "materials")) {
    reject_unknown(*m, "materials",
                   {"silica_index", "polystyrene_index", "water_index",
                    "temperature_k", "viscosity_pa_s", "eta", "eta_table",
                    "wavevector_in_medium", "cap_weighting"});
    cfg.silica_index = get_number(*m, "materials", "silica_index", 1.45);
    cfg.polystyrene_index = get_number(*m, "materials", "polystyrene_index", 1.59);
    cfg.medium.index = get_number(*m, "materials", "water_index", 1.333);
    cfg.medium.temperature = get_number(*m, "materials", "temperature_k", 298.0);
    cfg.medium.viscosity = get_number(*m, "materials", "viscosity_pa_s", 8.9e-4);
    cfg.eta = get_number(*m, "materials", "eta", 0.072);
    require_range(cfg.eta, 0.0, 1.0, "materials.eta");
    require_positive(cfg.medium.temperature, "materials.temperature_k");
    require_positive(cfg.medium.viscosity, "materials.viscosity_pa_s");
    if (const json* t = find(*m, "eta_table")) {
      reject_unknown(*t, "materials.eta_table", {"radii_nm", "values"});
      const auto radii = get_array(*t, "materials.eta_table", "radii_nm", {});
      cfg.eta_table_values = get_array(*t, "materials.eta_table", "values", {});
      for (double r : radii) cfg.eta_table_radii.push_back(r * 1e-9);
      if (cfg.eta_table_radii.size() != cfg.eta_table_values.size() ||
          cfg.eta_table_radii.size() < 2)
        throw ConfigError("materials.eta_table needs matching radii_nm/values "
                          "arrays with >= 2 entries");
    }
    cfg.wavevector_in_medium =
        get_bool(*m, "materials", "wavevector_in_medium", true);
    const std::string w = get_string(*m, "materials", "cap_weighting", "amplitude");
    if (w == "amplitude")
      cfg.weighting = EvanescentWeighting::kAmplitude;
    else if (w == "intensity")
      cfg.weighting = EvanescentWeighting::kIntensity;
    else
      throw ConfigError(
          "expected \"amplitude\" or \"intensity\" at materials.cap_weighting");
  }

  if (const json* b = find(doc, "beam")) {
    reject_unknown(*b, "beam", {"power_mw", "waist_um", "wavelength_nm"});
    cfg.beam.power = get_number(*b, "beam", "power_mw", 2.0) * 1e-3;
    cfg.beam.waist = get_number(*b, "beam", "waist_um", 3.0) * 1e-6;
    cfg.beam.wavelength = get_number(*b, "beam", "wavelength_nm", 780.0) * 1e-9;
    require_positive(cfg.beam.power, "beam.power_mw");
    require_positive(cfg.beam.waist, "beam.waist_um");
    require_positive(cfg.beam.wavelength, "beam.wavelength_nm");
  }

  if (const json* h = find(doc, "heterodyne")) {
    reject_unknown(*h, "heterodyne",
                   {"beat_khz", "lo_power_mw", "responsivity_a_per_w",
                    "gain_v_per_a", "sample_rate_khz", "dual_end",
                    "lockin_cutoff_hz", "decimation"});
    cfg.heterodyne.beat_frequency = get_number(*h, "heterodyne", "beat_khz", 25.0) * 1e3;
    cfg.heterodyne.lo_power = get_number(*h, "heterodyne", "lo_power_mw", 1.0) * 1e-3;
    cfg.heterodyne.responsivity =
        get_number(*h, "heterodyne", "responsivity_a_per_w", 0.5);
    cfg.heterodyne.gain = get_number(*h, "heterodyne", "gain_v_per_a", 1e4);
    cfg.heterodyne.sample_rate =
        get_number(*h, "heterodyne", "sample_rate_khz", 250.0) * 1e3;
    cfg.heterodyne.dual_end = get_bool(*h, "heterodyne", "dual_end", false);
    cfg.lockin_cutoff = get_number(*h, "heterodyne", "lockin_cutoff_hz", 1000.0);
    cfg.decimation = static_cast<int>(get_number(*h, "heterodyne", "decimation", 50));
    try {
      cfg.heterodyne.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("heterodyne: ") + e.what());
    }
    require_positive(cfg.lockin_cutoff, "heterodyne.lockin_cutoff_hz");
    if (cfg.decimation < 1)
      throw ConfigError("value must be >= 1 at heterodyne.decimation");
  }

  if (const json* n = find(doc, "noise")) {
    reject_unknown(*n, "noise",
                   {"electronic_psd_v2_hz", "shot_coefficient",
                    "onef_corner_hz", "onef_amplitude", "psd_segment",
                    "fit_band_khz"});
    cfg.noise.electronic_psd =
        get_number(*n, "noise", "electronic_psd_v2_hz", 1e-15);
    if (cfg.noise.electronic_psd < 0.0)
      throw ConfigError("value must be >= 0 at noise.electronic_psd_v2_hz");
    if (const json* v = find(*n, "shot_coefficient")) {
      if (v->is_string() && v->get<std::string>() == "auto") {
        cfg.shot_auto = true;
      } else if (v->is_number()) {
        cfg.shot_auto = false;
        cfg.noise.shot_psd_per_watt = v->get<double>();
        if (cfg.noise.shot_psd_per_watt < 0.0)
          throw ConfigError("value must be >= 0 at noise.shot_coefficient");
      } else {
        throw ConfigError("expected \"auto\" or a number at noise.shot_coefficient");
      }
    }
    cfg.noise.onef_corner = get_number(*n, "noise", "onef_corner_hz", 4.0);
    require_positive(cfg.noise.onef_corner, "noise.onef_corner_hz");
    if (const json* v = find(*n, "onef_amplitude")) {
      if (v->is_string() && v->get<std::string>() == "auto") {
        cfg.onef_auto = true;
      } else if (v->is_number()) {
        cfg.onef_auto = false;
        cfg.noise.onef_amplitude = v->get<double>();
        if (cfg.noise.onef_amplitude < 0.0)
          throw ConfigError("value must be >= 0 at noise.onef_amplitude");
      } else {
        throw ConfigError("expected \"auto\" or a number at noise.onef_amplitude");
      }
    }
    cfg.psd_segment = static_cast<std::size_t>(
        get_number(*n, "noise", "psd_segment", 4096.0));
    const auto band = get_array(*n, "noise", "fit_band_khz", {1.0, 11.0});
    if (band.size() != 2 || !(band[0] > 0.0) || !(band[0] < band[1]))
      throw ConfigError("expected [lo, hi] kHz with 0 < lo < hi at "
                        "noise.fit_band_khz");
    cfg.fit_band_lo = band[0] * 1e3;
    cfg.fit_band_hi = band[1] * 1e3;
  }

  if (const json* t = find(doc, "transit")) {
    reject_unknown(*t, "transit",
                   {"material", "radius_nm", "concentration_per_ml",
                    "apply_dilution", "added_ul", "droplet_ml", "duration_s",
                    "timestep_ms", "region_length_um", "region_width_um",
                    "region_height_gamma"});
    cfg.transit_material = get_string(*t, "transit", "material", "silica");
    if (cfg.transit_material != "silica" && cfg.transit_material != "polystyrene")
      throw ConfigError(
          "expected \"silica\" or \"polystyrene\" at transit.material");
    cfg.particle_radius = get_number(*t, "transit", "radius_nm", 50.0) * 1e-9;
    cfg.concentration_per_ml =
        get_number(*t, "transit", "concentration_per_ml", 3.7e9);
    cfg.apply_dilution = get_bool(*t, "transit", "apply_dilution", true);
    cfg.added_ul = get_number(*t, "transit", "added_ul", 40.0);
    cfg.droplet_ml = get_number(*t, "transit", "droplet_ml", 0.6);
    cfg.transit.duration = get_number(*t, "transit", "duration_s", 10.0);
    cfg.transit.timestep = get_number(*t, "transit", "timestep_ms", 0.1) * 1e-3;
    cfg.transit.region_length =
        get_number(*t, "transit", "region_length_um", 10.0) * 1e-6;
    cfg.transit.region_width =
        get_number(*t, "transit", "region_width_um", 6.0) * 1e-6;
    cfg.region_height_gamma =
        get_number(*t, "transit", "region_height_gamma", 4.0);
    require_positive(cfg.particle_radius, "transit.radius_nm");
    if (cfg.concentration_per_ml < 0.0)
      throw ConfigError("value must be >= 0 at transit.concentration_per_ml");
    require_positive(cfg.transit.duration, "transit.duration_s");
    require_positive(cfg.transit.timestep, "transit.timestep_ms");
    require_positive(cfg.transit.region_length, "transit.region_length_um");
    require_positive(cfg.transit.region_width, "transit.region_width_um");
    if (cfg.region_height_gamma < 4.0)
      throw ConfigError("value must be >= 4 at transit.region_height_gamma");
  }

  if (const json* d = find(doc, "detection")) {
    reject_unknown(*d, "detection",
                   {"threshold_sigma", "min_separation_ms", "bandpass_lo_hz",
                    "bandpass_hi_hz"});
    cfg.threshold_sigma = get_number(*d, "detection", "threshold_sigma", 5.0);
    cfg.min_separation_s =
        get_number(*d, "detection", "min_separation_ms", 10.0) * 1e-3;
    cfg.bandpass_lo = get_number(*d, "detection", "bandpass_lo_hz", 4.0);
    cfg.bandpass_hi = get_number(*d, "detection", "bandpass_hi_hz", 100.0);
    if (cfg.threshold_sigma < 0.0)
      throw ConfigError("value must be >= 0 at detection.threshold_sigma");
    if (cfg.min_separation_s < 0.0)
      throw ConfigError("value must be >= 0 at detection.min_separation_ms");
    if (!(cfg.bandpass_lo > 0.0) || !(cfg.bandpass_lo < cfg.bandpass_hi))
      throw ConfigError("detection band must satisfy 0 < lo < hi");
  }

  if (const json* s = find(doc, "sweep")) {
    reject_unknown(*s, "sweep",
                   {"radii_nm", "normalization_radius_nm", "lo_powers_mw",
                    "noise_duration_s"});
    std::vector<double> radii_nm;
    for (int r = 10; r <= 200; r += 5) radii_nm.push_back(r);
    radii_nm = get_array(*s, "sweep", "radii_nm", radii_nm);
    cfg.sweep_radii.clear();
    for (double r : radii_nm) {
      require_positive(r, "sweep.radii_nm");
      cfg.sweep_radii.push_back(r * 1e-9);
    }
    cfg.normalization_radius =
        get_number(*s, "sweep", "normalization_radius_nm", 50.0) * 1e-9;
    const auto lo_mw = get_array(*s, "sweep", "lo_powers_mw",
                                 {0.2, 0.4, 0.6, 0.8, 1.0});
    cfg.lo_powers.clear();
    for (double p : lo_mw) {
      require_positive(p, "sweep.lo_powers_mw");
      cfg.lo_powers.push_back(p * 1e-3);
    }
    cfg.noise_duration = get_number(*s, "sweep", "noise_duration_s", 5.0);
    require_positive(cfg.noise_duration, "sweep.noise_duration_s");
  } else {
    for (int r = 10; r <= 200; r += 5) cfg.sweep_radii.push_back(r * 1e-9);
    cfg.lo_powers = {0.2e-3, 0.4e-3, 0.6e-3, 0.8e-3, 1.0e-3};
  }

  // Resolved document: every effective key written back explicitly.
  json out;
  out["seed"] = cfg.seed;
  out["output_dir"] = cfg.output_dir;
  out["workers"] = cfg.workers;
  json g;
  g["core_diameter_um"] = cfg.geometry.core_diameter * 1e6;
  g["core_index"] = cfg.geometry.core_index;
  g["medium_index"] = cfg.geometry.medium_index;
  g["wavelength_nm"] = cfg.wavelength * 1e9;
  g["grid_spacing_nm"] = cfg.grid.spacing * 1e9;
  g["window_um"] = cfg.grid.extent_x * 1e6;
  g["n_modes"] = cfg.n_modes;
  g["open_hole"] = {{"radius_um", cfg.geometry.open_hole_radius * 1e6},
                    {"distance_um", cfg.geometry.open_hole_distance * 1e6}};
  g["internal_holes"] = {
      {"radius_um", cfg.geometry.internal_hole_radius * 1e6},
      {"distance_um", cfg.geometry.internal_hole_distance * 1e6},
      {"fill", cfg.geometry.internal_hole_index == 1.0 ? "air" : "water"}};
  out["geometry"] = g;
  json m;
  m["silica_index"] = cfg.silica_index;
  m["polystyrene_index"] = cfg.polystyrene_index;
  m["water_index"] = cfg.medium.index;
  m["temperature_k"] = cfg.medium.temperature;
  m["viscosity_pa_s"] = cfg.medium.viscosity;
  m["eta"] = cfg.eta;
  if (!cfg.eta_table_radii.empty()) {
    std::vector<double> radii_nm;
    for (double r : cfg.eta_table_radii) radii_nm.push_back(r * 1e9);
    m["eta_table"] = {{"radii_nm", radii_nm}, {"values", cfg.eta_table_values}};
  }
  m["wavevector_in_medium"] = cfg.wavevector_in_medium;
  m["cap_weighting"] =
      cfg.weighting == EvanescentWeighting::kAmplitude ? "amplitude" : "intensity";
  out["materials"] = m;
  out["beam"] = {{"power_mw", cfg.beam.power * 1e3},
                 {"waist_um", cfg.beam.waist * 1e6},
                 {"wavelength_nm", cfg.beam.wavelength * 1e9}};
  out["heterodyne"] = {{"beat_khz", cfg.heterodyne.beat_frequency * 1e-3},
                       {"lo_power_mw", cfg.heterodyne.lo_power * 1e3},
                       {"responsivity_a_per_w", cfg.heterodyne.responsivity},
                       {"gain_v_per_a", cfg.heterodyne.gain},
                       {"sample_rate_khz", cfg.heterodyne.sample_rate * 1e-3},
                       {"dual_end", cfg.heterodyne.dual_end},
                       {"lockin_cutoff_hz", cfg.lockin_cutoff},
                       {"decimation", cfg.decimation}};
  json n;
  n["electronic_psd_v2_hz"] = cfg.noise.electronic_psd;
  if (cfg.shot_auto)
    n["shot_coefficient"] = "auto";
  else
    n["shot_coefficient"] = cfg.noise.shot_psd_per_watt;
  n["onef_corner_hz"] = cfg.noise.onef_corner;
  if (cfg.onef_auto)
    n["onef_amplitude"] = "auto";
  else
    n["onef_amplitude"] = cfg.noise.onef_amplitude;
  n["psd_segment"] = cfg.psd_segment;
  n["fit_band_khz"] = {cfg.fit_band_lo * 1e-3, cfg.fit_band_hi * 1e-3};
  out["noise"] = n;
  out["transit"] = {{"material", cfg.transit_material},
                    {"radius_nm", cfg.particle_radius * 1e9},
                    {"concentration_per_ml", cfg.concentration_per_ml},
                    {"apply_dilution", cfg.apply_dilution},
                    {"added_ul", cfg.added_ul},
                    {"droplet_ml", cfg.droplet_ml},
                    {"duration_s", cfg.transit.duration},
                    {"timestep_ms", cfg.transit.timestep * 1e3},
                    {"region_length_um", cfg.transit.region_length * 1e6},
                    {"region_width_um", cfg.transit.region_width * 1e6},
                    {"region_height_gamma", cfg.region_height_gamma}};
  out["detection"] = {{"threshold_sigma", cfg.threshold_sigma},
                      {"min_separation_ms", cfg.min_separation_s * 1e3},
                      {"bandpass_lo_hz", cfg.bandpass_lo},
                      {"bandpass_hi_hz", cfg.bandpass_hi}};
  json s;
  {
    std::vector<double> radii_nm;
    for (double r : cfg.sweep_radii) radii_nm.push_back(r * 1e9);
    s["radii_nm"] = radii_nm;
  }
  s["normalization_radius_nm"] = cfg.normalization_radius * 1e9;
  {
    std::vector<double> lo_mw;
    for (double p : cfg.lo_powers) lo_mw.push_back(p * 1e3);
    s["lo_powers_mw"] = lo_mw;
  }
  s["noise_duration_s"] = cfg.noise_duration;
  out["sweep"] = s;

  cfg.resolved = out;
  const std::string dump = out.dump(2);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a(dump.data(), dump.size())));
  cfg.config_hash = hex;

  // seed feeds the transit module directly
  cfg.transit.seed = cfg.seed;
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

} // namespace ecf
