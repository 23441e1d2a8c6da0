#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "patchflow/driver.hpp"

namespace patchflow {

/// A parsed experiment file: one run description plus optional sweep settings.
///
/// Format: key=value lines, '#' starts a comment, blank lines ignored. Keys
/// are grouped by prefix (grid., run., projection., nutrient., sweep.);
/// unknown or repeated keys are errors and key order does not matter.
struct ExperimentConfig {
  RunConfig run;
  std::string output_dir = "run";
  std::vector<double> sweep_D;      // D = 0 reference is always added
  std::vector<double> sweep_times;  // empty means {T}
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);
/// Writes every key explicitly; parse(serialize(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace patchflow
