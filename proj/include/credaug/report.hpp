#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "credaug/harness.hpp"

namespace credaug {

nlohmann::json to_json(const BootstrapResult& r);
nlohmann::json to_json(const FeatureQualityRow& r);
nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const RankRow& r);

/// The suite document. Wall-clock timings are kept out of it so that the
/// same inputs always serialize to the same bytes.
nlohmann::json to_json(const SuiteReport& report);
nlohmann::json to_json(const SweepReport& report);

/// Writes report.json, ranking.csv, significance.csv, one
/// multiplier_effect_<technique>.csv per technique, and per-scenario
/// quality_/roc_/lorenz_/bootstrap_ CSVs, plus timings.json. Returns the
/// paths written.
std::vector<std::filesystem::path> write_suite_report(
    const std::filesystem::path& dir, const SuiteReport& report);

/// Writes sweep_<technique>.json, sweep_<technique>.csv and
/// sweep_<technique>_checks.json (composition monotonicity checks).
std::vector<std::filesystem::path> write_sweep_report(
    const std::filesystem::path& dir, const SweepReport& report);

/// Fixed-width ranking table for terminal output.
std::string format_ranking(const std::vector<RankRow>& ranking);

}  // namespace credaug
