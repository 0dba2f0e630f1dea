#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"

namespace dtlab {

struct RunOptions {
  std::string out_dir;                // empty: write no files
  std::optional<std::uint64_t> seed;  // overrides [scenario] seed
};

struct PresetInfo {
  std::string name;
  std::string description;
};

// Everything a caller needs to judge a run: per-check reports, the constants
// block (key = value lines, also written to disk), and scalar metrics for
// downstream calibration (residual magnitudes, fitted rates, slopes).
struct ScenarioOutcome {
  std::string name;
  bool passed = true;
  std::vector<Report> reports;
  std::string constants_text;
  std::map<std::string, double> metrics;
  std::vector<std::string> files_written;
};

const std::vector<PresetInfo>& preset_list();
std::string preset_config_text(const std::string& name);  // ConfigError if unknown

ScenarioOutcome run_scenario_config(const Config& cfg, const RunOptions& opts);
ScenarioOutcome run_scenario_file(const std::string& path, const RunOptions& opts);
ScenarioOutcome run_preset(const std::string& name, const RunOptions& opts);

// Human or JSON listing of the built-in presets.
std::string list_presets_text(bool json);

}  // namespace dtlab
