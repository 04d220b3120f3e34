#include "ecf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "ecf/csv.hpp"
#include "ecf/dsp.hpp"
#include "ecf/errors.hpp"
#include "ecf/evanescent.hpp"
#include "ecf/events.hpp"
#include "ecf/lockin.hpp"
#include "ecf/mode_solver.hpp"
#include "ecf/version.hpp"

namespace ecf {

namespace fs = std::filesystem;

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ECFSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const int n_threads = std::min<std::size_t>(std::max(workers, 1), count);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct Artifacts {
  fs::path dir;
  std::vector<std::string> names;

  void write(const std::string& name, const std::string& contents) {
    atomic_write(dir / name, contents);
    names.push_back(name);
  }
};

// ---------------------------------------------------------------------------
// Minimal SVG line plot; the CSVs stay the contract, this is a convenience
// rendering of the same numbers.

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel,
                          std::vector<PlotSeries> series, bool log_x = false,
                          bool log_y = false) {
  const double width = 840, height = 520, ml = 80, mr = 30, mt = 50, mb = 60;
  const char* palette[] = {"#1f6fb4", "#d1495b", "#3a9e5f", "#e69f00", "#7b5cb8"};

  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& s : series) {
    // thin dense series; SVG stays light and the CSV keeps the full data
    if (s.x.size() > 4000) {
      const std::size_t stride = s.x.size() / 4000 + 1;
      std::vector<double> x2, y2;
      for (std::size_t i = 0; i < s.x.size(); i += stride) {
        x2.push_back(s.x[i]);
        y2.push_back(s.y[i]);
      }
      s.x.swap(x2);
      s.y.swap(y2);
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x && !(s.x[i] > 0.0)) continue;
      if (log_y && !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double px = (width - ml - mr) / (xmax - xmin);
  const double py = (height - mt - mb) / (ymax - ymin);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // frame and tick labels
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
      << width - ml - mr << "\" height=\"" << height - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double sx = ml + (fx - xmin) * px;
    const double sy = height - mb - (fy - ymin) * py;
    std::snprintf(buf, sizeof(buf), "%.4g", log_x ? std::pow(10.0, fx) : fx);
    svg << "<text x=\"" << sx << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", log_y ? std::pow(10.0, fy) : fy);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << sy + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << buf << "</text>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" << xlabel << "</text>\n";
  svg << "<text x=\"20\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 20 " << height / 2 << ")\">" << ylabel
      << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << palette[k % 5]
        << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x && !(s.x[i] > 0.0)) continue;
      if (log_y && !(s.y[i] > 0.0)) continue;
      const double sx = ml + (tx(s.x[i]) - xmin) * px;
      const double sy = height - mb - (ty(s.y[i]) - ymin) * py;
      svg << format_full(sx) << ',' << format_full(sy) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 18 + 16 * k
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"" << palette[k % 5] << "\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// command bodies

struct ChainOutput {
  LockInOutput demod;
  TimeTrace trace;
  TransitResult transits;
  double contact_power = 0.0;
};

std::uint64_t reference_seed(std::uint64_t seed) {
  // fixed offset keeps the particle-free reference stream disjoint
  return seed + 0x9e3779b97f4a7c15ULL;
}

ChainOutput run_chain(const RunConfig& cfg, bool with_particles,
                      std::uint64_t seed) {
  const double gamma = decay_length(cfg.beam.wavelength, cfg.medium.index);

  Suspension susp;
  susp.particle = cfg.transit_particle();
  susp.medium = cfg.medium;
  susp.concentration = with_particles ? cfg.concentration_per_m3() : 0.0;

  TransitConfig tc = cfg.transit;
  tc.seed = seed;
  tc.region_height = cfg.region_height_gamma * gamma;

  ChainOutput out;
  out.transits = simulate_transits(
      susp, gamma, cfg.beam, cfg.collection_efficiency().at(susp.particle.radius),
      tc);
  out.contact_power = out.transits.contact_power_w;

  const double dt_out = 1.0 / cfg.heterodyne.sample_rate;
  const std::size_t n_out = static_cast<std::size_t>(
      std::floor(cfg.transit.duration * cfg.heterodyne.sample_rate)) + 1;
  const std::vector<double> env = resample_envelope(
      out.transits.envelope_w, out.transits.timestep, dt_out, n_out);

  out.trace = synthesize_photocurrent(env, dt_out, cfg.heterodyne,
                                      cfg.resolved_noise(cfg.heterodyne.lo_power),
                                      seed);
  out.demod = lockin_demodulate(out.trace, cfg.heterodyne.beat_frequency,
                                cfg.lockin_cutoff, cfg.decimation);
  return out;
}

void cmd_modes(const RunConfig& cfg, Artifacts& out) {
  const CrossSection cs =
      build_cross_section(cfg.geometry, cfg.grid, cfg.wavelength);
  const auto modes = solve_modes(cs, cfg.n_modes);

  std::vector<std::vector<double>> summary;
  for (const auto& m : modes)
    summary.push_back({static_cast<double>(m.ordinal), m.n_eff, m.residual});
  out.write("modes_summary.csv",
            csv_table({"ordinal", "n_eff", "residual"}, summary));

  for (const auto& m : modes) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(cs.nx) * cs.ny);
    for (int iy = 0; iy < cs.ny; ++iy)
      for (int ix = 0; ix < cs.nx; ++ix)
        rows.push_back({cs.cell_x(ix), cs.cell_y(iy),
                        m.field[static_cast<std::size_t>(iy) * cs.nx + ix]});
    out.write("mode_" + std::to_string(m.ordinal) + ".csv",
              csv_table({"x_m", "y_m", "amplitude"}, rows));
  }
}

void cmd_profile(const RunConfig& cfg, Artifacts& out) {
  const CrossSection cs =
      build_cross_section(cfg.geometry, cfg.grid, cfg.wavelength);
  const auto modes = solve_modes(cs, 1);
  const EvanescentProfile prof = evanescent_profile(modes.front(), cs);

  std::vector<std::vector<double>> rows;
  for (const auto& [d, v] : prof.samples) rows.push_back({d, v});
  out.write("profile.csv", csv_table({"distance_m", "normalized_field"}, rows));
  out.write("profile_summary.csv",
            csv_table({"n_eff", "gamma_nominal_m", "gamma_fitted_m",
                       "surface_fraction", "surface_distance_m"},
                      {{modes.front().n_eff, prof.gamma_nominal,
                        prof.gamma_fitted, prof.surface_fraction,
                        prof.surface_distance}}));
}

void cmd_scaling(const RunConfig& cfg, Artifacts& out) {
  const double gamma = decay_length(cfg.beam.wavelength, cfg.medium.index);
  ScalingOptions opts;
  opts.wavevector_in_medium = cfg.wavevector_in_medium;
  opts.weighting = cfg.weighting;
  const RadiusScalingCurve curve = radius_scaling_curve(
      cfg.sweep_radii, cfg.transit_particle().index, cfg.medium, cfg.beam,
      gamma, cfg.collection_efficiency(), cfg.normalization_radius, opts);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < curve.radii.size(); ++i)
    rows.push_back({curve.radii[i], curve.amplitude_dipole[i],
                    curve.amplitude_corrected[i], curve.scattered_power_w[i],
                    curve.collected_power_w[i]});
  out.write("scaling.csv",
            csv_table({"radius_m", "amplitude_dipole", "amplitude_corrected",
                       "P_scatt_W", "P_sig_W"},
                      rows));
  out.write("scaling_summary.csv",
            csv_table({"calibration_constant_per_sqrtW", "normalization_radius_m",
                       "gamma_m"},
                      {{curve.calibration_constant, curve.normalization_radius,
                        gamma}}));
}

void write_transit(const TransitResult& transits, Artifacts& out) {
  std::vector<std::vector<double>> rows;
  rows.reserve(transits.envelope_w.size());
  for (std::size_t i = 0; i < transits.envelope_w.size(); ++i)
    rows.push_back({i * transits.timestep, transits.envelope_w[i]});
  out.write("envelope.csv", csv_table({"t_s", "P_sig_W"}, rows));
  out.write("truth_events.txt", events_to_text(transits.truth_events));
  out.write("transit_summary.csv",
            csv_table({"particle_count", "contact_power_W", "n_truth_events"},
                      {{static_cast<double>(transits.particle_count),
                        transits.contact_power_w,
                        static_cast<double>(transits.truth_events.size())}}));
}

void cmd_transit(const RunConfig& cfg, Artifacts& out) {
  const double gamma = decay_length(cfg.beam.wavelength, cfg.medium.index);
  Suspension susp{cfg.transit_particle(), cfg.concentration_per_m3(), cfg.medium};
  TransitConfig tc = cfg.transit;
  tc.region_height = cfg.region_height_gamma * gamma;
  const TransitResult transits = simulate_transits(
      susp, gamma, cfg.beam, cfg.collection_efficiency().at(susp.particle.radius),
      tc);
  write_transit(transits, out);
}

void cmd_trace(const RunConfig& cfg, Artifacts& out) {
  const ChainOutput chain = run_chain(cfg, true, cfg.seed);
  write_transit(chain.transits, out);
  out.write("trace.csv", trace_to_csv(chain.trace));
}

void cmd_detect(const RunConfig& cfg, Artifacts& out) {
  const ChainOutput chain = run_chain(cfg, true, cfg.seed);
  const ChainOutput ref = run_chain(cfg, false, reference_seed(cfg.seed));

  const std::size_t settle =
      std::max(chain.demod.settle_samples, ref.demod.settle_samples);
  if (ref.demod.amplitude.size() <= 2 * settle)
    throw Error("detect: trace too short for the filter settling window");

  auto trimmed = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(settle),
                               v.end());
  };
  const std::vector<double> amp = trimmed(chain.demod.amplitude);
  const std::vector<double> amp_ref = trimmed(ref.demod.amplitude);
  const double dt = 1.0 / chain.demod.output_rate;
  const double t0 = chain.demod.start_time + settle * dt;

  const auto events = detect_events(amp, dt, t0, amp_ref, cfg.threshold_sigma,
                                    cfg.min_separation_s);
  out.write("events.txt", events_to_text(events));

  std::vector<std::vector<double>> rows;
  rows.reserve(chain.demod.amplitude.size());
  for (std::size_t i = 0; i < chain.demod.amplitude.size(); ++i)
    rows.push_back({chain.demod.time_at(i), chain.demod.x[i], chain.demod.y[i],
                    chain.demod.amplitude[i]});
  out.write("demod.csv", csv_table({"t_s", "X_V", "Y_V", "A_V"}, rows));

  // Display normalization: band-passed amplitude in units of the band-passed
  // quantum reference sigma.
  const auto banded = dsp::bandpass_zero_phase(amp, chain.demod.output_rate,
                                               cfg.bandpass_lo, cfg.bandpass_hi);
  const auto banded_ref = dsp::bandpass_zero_phase(
      amp_ref, ref.demod.output_rate, cfg.bandpass_lo, cfg.bandpass_hi);
  const double sigma_band = noise_sigma(banded_ref);
  std::vector<std::vector<double>> norm_rows;
  norm_rows.reserve(banded.size());
  for (std::size_t i = 0; i < banded.size(); ++i)
    norm_rows.push_back({t0 + i * dt, banded[i] / sigma_band});
  out.write("normalized.csv", csv_table({"t_s", "amplitude_sigma"}, norm_rows));

  out.write("detect_summary.csv",
            csv_table({"sigma_ref_V", "sigma_band_V", "n_events",
                       "truth_events", "particle_count"},
                      {{noise_sigma(amp_ref), sigma_band,
                        static_cast<double>(events.size()),
                        static_cast<double>(chain.transits.truth_events.size()),
                        static_cast<double>(chain.transits.particle_count)}}));
  out.write("truth_events.txt", events_to_text(chain.transits.truth_events));
}

void cmd_noisefit(const RunConfig& cfg, Artifacts& out) {
  const std::size_t points = cfg.lo_powers.size();
  if (points < 3)
    throw Error("noisefit: need at least 3 LO powers in sweep.lo_powers_mw");

  const std::size_t n_samples = static_cast<std::size_t>(
      std::floor(cfg.noise_duration * cfg.heterodyne.sample_rate)) + 1;
  const std::vector<double> zero_env(n_samples, 0.0);
  const double dt = 1.0 / cfg.heterodyne.sample_rate;

  std::vector<double> band_psd(points);
  std::vector<dsp::PsdEstimate> spectra(points);
  parallel_for(points, resolve_workers(cfg.workers), [&](std::size_t i) {
    HeterodyneConfig het = cfg.heterodyne;
    het.lo_power = cfg.lo_powers[i];
    const TimeTrace trace =
        synthesize_photocurrent(zero_env, dt, het, cfg.resolved_noise(het.lo_power),
                                cfg.seed + 7919 * (i + 1));
    spectra[i] = dsp::welch_psd(trace.samples, het.sample_rate, cfg.psd_segment);
    band_psd[i] = dsp::band_mean(spectra[i], cfg.fit_band_lo, cfg.fit_band_hi);
  });

  // Detected power on the balanced pair is twice the per-diode LO power.
  std::vector<double> detected(points);
  for (std::size_t i = 0; i < points; ++i) detected[i] = 2.0 * cfg.lo_powers[i];
  const dsp::LinearFit fit = dsp::fit_line(detected, band_psd);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < points; ++i)
    rows.push_back({cfg.lo_powers[i], detected[i], band_psd[i]});
  out.write("noisefit.csv",
            csv_table({"lo_power_W", "detected_power_W", "band_psd_V2_hz"}, rows));
  out.write("noisefit_summary.csv",
            csv_table({"slope_V2_hz_per_W", "intercept_V2_hz", "r_squared",
                       "electronic_psd_V2_hz"},
                      {{fit.slope, fit.intercept, fit.r_squared,
                        cfg.noise.electronic_psd}}));

  for (std::size_t i = 0; i < points; ++i) {
    std::vector<std::vector<double>> psd_rows;
    psd_rows.reserve(spectra[i].frequency.size());
    for (std::size_t k = 0; k < spectra[i].frequency.size(); ++k)
      psd_rows.push_back({spectra[i].frequency[k], spectra[i].psd[k]});
    out.write("psd_" + std::to_string(i) + ".csv",
              csv_table({"frequency_hz", "psd_V2_hz"}, psd_rows));
  }
}

// Reads back a csv_table artifact: header plus numeric columns.
std::pair<std::vector<std::string>, std::vector<std::vector<double>>>
read_csv_columns(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("figure: cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("figure: empty csv " + path.string());
  std::vector<std::string> headers;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) headers.push_back(cell);
  }
  std::vector<std::vector<double>> cols(headers.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream r(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(r, cell, ',') && c < cols.size())
      cols[c++].push_back(std::stod(cell));
  }
  return {headers, cols};
}

void cmd_figure(const std::string& target, const RunConfig& cfg, Artifacts& out);

void dispatch(const std::string& command, const RunConfig& cfg, Artifacts& out) {
  if (command == "modes") {
    cmd_modes(cfg, out);
  } else if (command == "profile") {
    cmd_profile(cfg, out);
  } else if (command == "scaling") {
    cmd_scaling(cfg, out);
  } else if (command == "trace") {
    cmd_trace(cfg, out);
  } else if (command == "detect") {
    cmd_detect(cfg, out);
  } else if (command == "noisefit") {
    cmd_noisefit(cfg, out);
  } else if (command == "transit") {
    cmd_transit(cfg, out);
  } else if (command.rfind("figure:", 0) == 0) {
    cmd_figure(command.substr(7), cfg, out);
  } else {
    throw Error("unknown command: " + command);
  }
}

void cmd_figure(const std::string& target, const RunConfig& cfg, Artifacts& out) {
  dispatch(target, cfg, out);

  auto col = [](const auto& table, const std::string& name) {
    for (std::size_t i = 0; i < table.first.size(); ++i)
      if (table.first[i] == name) return table.second[i];
    throw Error("figure: missing column " + name);
  };

  std::string svg;
  if (target == "profile") {
    auto t = read_csv_columns(out.dir / "profile.csv");
    svg = svg_line_plot("evanescent profile", "distance from surface (m)",
                        "normalized field",
                        {{"field", col(t, "distance_m"), col(t, "normalized_field")}});
  } else if (target == "scaling") {
    auto t = read_csv_columns(out.dir / "scaling.csv");
    svg = svg_line_plot("signal amplitude vs particle radius", "radius (m)",
                        "normalized amplitude",
                        {{"dipole", col(t, "radius_m"), col(t, "amplitude_dipole")},
                         {"evanescent-corrected", col(t, "radius_m"),
                          col(t, "amplitude_corrected")}},
                        true, true);
  } else if (target == "modes") {
    auto t = read_csv_columns(out.dir / "modes_summary.csv");
    svg = svg_line_plot("guided-mode ladder", "mode ordinal", "n_eff",
                        {{"n_eff", col(t, "ordinal"), col(t, "n_eff")}});
  } else if (target == "transit" || target == "trace") {
    auto t = read_csv_columns(out.dir / "envelope.csv");
    svg = svg_line_plot("collected-power envelope", "t (s)", "P_sig (W)",
                        {{"envelope", col(t, "t_s"), col(t, "P_sig_W")}});
  } else if (target == "detect") {
    auto t = read_csv_columns(out.dir / "normalized.csv");
    svg = svg_line_plot("normalized trace", "t (s)", "amplitude (sigma)",
                        {{"amplitude", col(t, "t_s"), col(t, "amplitude_sigma")}});
  } else if (target == "noisefit") {
    auto t = read_csv_columns(out.dir / "noisefit.csv");
    svg = svg_line_plot("noise power vs detected power", "detected power (W)",
                        "band PSD (V^2/Hz)",
                        {{"band mean", col(t, "detected_power_W"),
                          col(t, "band_psd_V2_hz")}});
  } else {
    throw Error("figure: no figure defined for target " + target);
  }
  out.write("figure_" + target + ".svg", svg);
}

} // namespace

ReportBundle run_command(const std::string& command, const RunConfig& cfg) {
  Artifacts out;
  out.dir = cfg.output_dir;
  fs::create_directories(out.dir);

  dispatch(command, cfg, out);

  out.write("resolved_config.json", cfg.resolved.dump(2) + "\n");

  nlohmann::ordered_json prov;
  prov["command"] = command;
  prov["version"] = kVersion;
  prov["seed"] = cfg.seed;
  prov["config_hash"] = cfg.config_hash;
  if (command == "detect")
    prov["reference_seed"] = reference_seed(cfg.seed);
  prov["artifacts"] = out.names;
  out.write("provenance.json", prov.dump(2) + "\n");

  ReportBundle bundle;
  bundle.directory = out.dir;
  bundle.artifacts = out.names;
  bundle.config_hash = cfg.config_hash;
  return bundle;
}

} // namespace ecf
