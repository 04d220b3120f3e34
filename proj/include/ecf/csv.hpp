#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecf/events.hpp"
#include "ecf/heterodyne.hpp"

namespace ecf {

/// Write a file atomically: contents land under a temporary name in the same
/// directory and are renamed into place.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Format a double with enough digits to round-trip exactly.
std::string format_full(double v);

/// Columnar CSV with a header row; all values formatted round-trip exact.
std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

/// Trace file: `# sample_rate_hz=... start_time_s=... units=V` header plus
/// one sample per line.
std::string trace_to_csv(const TimeTrace& trace);
TimeTrace trace_from_csv(const std::string& text);

/// Event report: `# start_s end_s peak_sigma snr` plus one record per line.
std::string events_to_text(const std::vector<DetectionEvent>& events);
std::vector<DetectionEvent> events_from_text(const std::string& text);

} // namespace ecf
