#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace credaug {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains_zero() const noexcept { return low <= 0.0 && high >= 0.0; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Paired bootstrap comparison of a model against a baseline on one test set.
/// Deltas are always model minus baseline.
struct BootstrapResult {
  double auc_model = 0.0;
  double auc_baseline = 0.0;
  double delta_auc_point = 0.0;
  double delta_gini_point = 0.0;
  double p_value = 1.0;  // fraction of iterations with delta <= 0
  Interval ci95_auc;
  Interval ci95_gini;
  std::size_t n_iterations = 0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;  // resamples rejected for lacking a class
  std::vector<double> deltas;  // per-iteration delta AUC, iteration order

  friend bool operator==(const BootstrapResult&,
                         const BootstrapResult&) = default;
};

struct BootstrapOptions {
  std::size_t n_iterations = 1000;
  std::uint64_t seed = 42;
  /// Resample each class separately (keeps class counts fixed). Off by
  /// default: plain resampling of the whole test set.
  bool stratified = false;
};

/// Each iteration draws one multiset of n test indices with replacement and
/// scores BOTH models on it. Resamples missing a class are redrawn, so
/// exactly n_iterations deltas are kept. Iteration b uses its own RNG stream
/// derived from (seed, b). The CI is the [2.5, 97.5] percentile range using
/// linear interpolation between order statistics.
/// Throws UndefinedMetricError if the full set lacks a class.
BootstrapResult bootstrap_compare(std::span<const double> model_scores,
                                  std::span<const double> baseline_scores,
                                  std::span<const int> labels,
                                  const BootstrapOptions& options = {});

/// Linear-interpolation percentile (q in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// p < alpha and the AUC interval excludes zero.
bool significance_flag(const BootstrapResult& r, double alpha = 0.05) noexcept;

}  // namespace credaug
