#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecf/config.hpp"

namespace ecf {

/// Artifacts produced by one command run. Every run also writes
/// resolved_config.json and provenance.json (config hash, seed, version,
/// artifact list) into the output directory.
struct ReportBundle {
  std::filesystem::path directory;
  std::vector<std::string> artifacts;
  std::string config_hash;
};

/// Execute one command: modes, profile, scaling, trace, detect, noisefit,
/// transit, or figure:<target>. Artifacts are written atomically; identical
/// config and seed reproduce identical bytes. Module errors propagate as
/// exceptions with context.
ReportBundle run_command(const std::string& command, const RunConfig& cfg);

/// Worker count resolution: explicit value > ECFSIM_WORKERS > hardware.
int resolve_workers(int requested);

} // namespace ecf
