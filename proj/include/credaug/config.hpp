#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credaug/dataset.hpp"
#include "credaug/harness.hpp"

namespace credaug {

struct SweepSettings {
  ScenarioTechnique technique = ScenarioTechnique::kAdasyn;
  std::vector<double> multipliers{1.0, 2.0, 3.0};
};

/// Everything a CLI run needs. Loaded from one JSON document.
struct RunConfig {
  std::filesystem::path data_path;  // resolved against the config's directory
  FeatureSchema schema;
  SuiteOptions options;
  std::vector<ExperimentSpec> suite;  // default_suite() when absent
  std::filesystem::path output_dir = "out";
  SweepSettings sweep;
};

/// Throws ConfigError on unknown keys, wrong types, or invalid values.
/// Relative data paths are resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});

/// Reads and parses a config file. Throws IoError if it cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);

/// The schema of the Give Me Some Credit training file, with the caps used
/// by the shipped example config.
FeatureSchema gmsc_schema();

}  // namespace credaug
