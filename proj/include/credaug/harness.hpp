#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credaug/bootstrap.hpp"
#include "credaug/dataset.hpp"
#include "credaug/gbdt.hpp"
#include "credaug/oversample.hpp"
#include "credaug/quality.hpp"

namespace credaug {

enum class ScenarioTechnique { kNone, kSmote, kBorderlineSmote, kAdasyn, kEnsemble };

std::string_view to_string(ScenarioTechnique t) noexcept;
/// "none", "smote", "borderline_smote", "adasyn", "ensemble".
ScenarioTechnique parse_scenario_technique(std::string_view name);

struct ExperimentSpec {
  std::string id;
  ScenarioTechnique technique = ScenarioTechnique::kNone;
  double multiplier = 0.0;  // ignored for kNone; per technique for kEnsemble
  std::size_t k_neighbors = 5;
  std::size_t m_neighbors = 10;
  GBDTConfig classifier;  // scale_pos_weight is recomputed per scenario
  std::optional<std::uint64_t> seed;  // default: derived from (global seed, id)

  /// Display name used in tables, e.g. "ADASYN 1x".
  std::string label() const;
  std::uint64_t resolved_seed(std::uint64_t global_seed) const;
};

/// The ten scenarios E01-E10: baseline, SMOTE/BorderlineSMOTE/ADASYN at
/// 1x-3x, and the 1x-each ensemble.
std::vector<ExperimentSpec> default_suite();

/// Split, scaler, and standardized views shared by every scenario.
struct PreparedData {
  SplitResult split;
  ScalerParams scaler;
  Dataset train_std;
  Dataset test_std;
};

/// Caps, stratified split, and train-only standardization.
PreparedData prepare(const Dataset& data, double train_fraction,
                     std::uint64_t split_seed);

struct Augmentation {
  SyntheticBatch batch;        // standardized, pre-rounding
  FinalizedBatch finalized;    // rounded/capped, both unit systems
  std::optional<AdasynAllocation> allocation;
  std::vector<std::string> warnings;
};

/// Runs the scenario's oversampler(s) on the training minority only.
Augmentation augment(const ExperimentSpec& spec, const PreparedData& prepared,
                     std::uint64_t global_seed);

struct ExperimentResult {
  std::string id;
  std::string label;
  ScenarioTechnique technique = ScenarioTechnique::kNone;
  double multiplier = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::vector<std::string> warnings;

  std::size_t n_train = 0;
  std::size_t n_synthetic = 0;
  std::size_t n_minority = 0;  // after augmentation
  std::size_t n_majority = 0;
  double minority_fraction = 0.0;  // n_minority / n_train
  double final_ratio = 0.0;        // n_majority / n_minority
  double scale_pos_weight = 0.0;

  double auc = 0.0;
  double gini = 0.0;
  double ks = 0.0;

  std::optional<BootstrapResult> bootstrap_vs_baseline;
  bool significant = false;
  std::optional<std::vector<FeatureQualityRow>> quality;
  std::size_t exact_copies = 0;
  double wall_time_seconds = 0.0;

  std::vector<double> test_scores;  // predicted P(default) on the test rows
  GBDTModel model;
};

/// Augment (train only), recompute scale_pos_weight on the augmented set,
/// train, and score the untouched test partition. Failures are captured in
/// the result (ok = false) rather than thrown.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const PreparedData& prepared,
                                std::uint64_t global_seed,
                                const QualityOptions& quality = {});

struct SuiteOptions {
  double train_fraction = 0.7;
  std::uint64_t split_seed = 42;
  std::uint64_t global_seed = 42;
  std::size_t bootstrap_iterations = 1000;
  bool bootstrap_stratified = false;
  double alpha = 0.05;
  QualityOptions quality;
};

struct RankRow {
  std::size_t rank = 0;
  std::string id;
  std::string label;
  std::size_t n_train = 0;
  double target_pct = 0.0;  // minority share of the training set, percent
  double auc = 0.0;
  double gini = 0.0;
  double delta_auc = 0.0;
  std::optional<double> p_value;
  bool significant = false;
};

struct SuiteReport {
  SuiteOptions options;
  std::size_t rows_total = 0;
  std::size_t n_train_baseline = 0;
  std::size_t n_test = 0;
  std::size_t train_positives = 0;
  std::size_t test_positives = 0;
  std::string test_digest_before;
  std::string test_digest_after;
  std::string baseline_id;
  std::vector<int> test_labels;
  std::vector<ExperimentResult> results;  // in spec order
  std::vector<RankRow> ranking;

  const ExperimentResult* find(std::string_view id) const;
  std::size_t failures() const;
};

/// Exactly one baseline (technique none) is required; ids must be unique.
/// One split and scaler serve every scenario, and each non-baseline result
/// gets a paired bootstrap comparison against the baseline.
SuiteReport run_suite(std::span<const ExperimentSpec> specs,
                      const Dataset& data, const SuiteOptions& options);

/// Descending AUC; ties by smaller n_train, then id. Failed scenarios are
/// left out.
std::vector<RankRow> rank_results(std::span<const ExperimentResult> results);

struct SweepPoint {
  double multiplier = 0.0;
  ExperimentResult result;
};

struct SweepReport {
  ScenarioTechnique technique = ScenarioTechnique::kAdasyn;
  ExperimentResult baseline;
  std::vector<SweepPoint> points;  // ascending multiplier
  double argmax_multiplier = 0.0;  // highest AUC among successful points
  std::vector<int> test_labels;
};

/// One experiment per multiplier plus the baseline, all on one split.
/// `base` supplies neighbor counts and classifier settings.
SweepReport sweep(ScenarioTechnique technique, std::vector<double> multipliers,
                  const Dataset& data, const SuiteOptions& options,
                  const ExperimentSpec& base = {});

}  // namespace credaug
