#include "ecf/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ecf/errors.hpp"

namespace ecf {

void atomic_write(const std::filesystem::path& path,
                  const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write: cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("atomic_write: short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw Error("csv_table: row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_full(row[c]);
    }
    out << '\n';
  }
  return out.str();
}

std::string trace_to_csv(const TimeTrace& trace) {
  std::ostringstream out;
  out << "# sample_rate_hz=" << format_full(trace.sample_rate())
      << " start_time_s=" << format_full(trace.start_time) << " units=V\n";
  for (double v : trace.samples) out << format_full(v) << '\n';
  return out.str();
}

TimeTrace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# sample_rate_hz=", 0) != 0)
    throw Error("trace_from_csv: missing trace header");
  TimeTrace trace;
  double rate = 0.0;
  if (std::sscanf(header.c_str(), "# sample_rate_hz=%lf start_time_s=%lf",
                  &rate, &trace.start_time) != 2 ||
      !(rate > 0.0))
    throw Error("trace_from_csv: malformed trace header");
  trace.sample_interval = 1.0 / rate;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trace.samples.push_back(std::stod(line));
  }
  if (trace.samples.size() < 2) throw Error("trace_from_csv: too few samples");
  return trace;
}

std::string events_to_text(const std::vector<DetectionEvent>& events) {
  std::ostringstream out;
  out << "# start_s end_s peak_sigma snr\n";
  for (const DetectionEvent& e : events) {
    out << format_full(e.start_s) << ' ' << format_full(e.end_s) << ' '
        << format_full(e.peak_sigma) << ' ' << format_full(e.snr) << '\n';
  }
  return out.str();
}

std::vector<DetectionEvent> events_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<DetectionEvent> events;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    DetectionEvent e;
    std::istringstream row(line);
    if (!(row >> e.start_s >> e.end_s >> e.peak_sigma >> e.snr))
      throw Error("events_from_text: malformed record: " + line);
    events.push_back(e);
  }
  return events;
}

} // namespace ecf
