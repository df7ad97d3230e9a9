#include "credaug/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credaug/error.hpp"
#include "credaug/metrics.hpp"
#include "credaug/parallel.hpp"
#include "credaug/rng.hpp"

namespace credaug {

namespace {

// Score ordering with tie groups precomputed, so the AUC of any resample
// (given as per-row multiplicities) is a single linear sweep.
class SortedScores {
 public:
  SortedScores(std::span<const double> scores, std::span<const int> labels)
      : labels_(labels) {
    order_.resize(scores.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores[a] < scores[b];
                     });
    for (std::size_t i = 0; i < order_.size(); ++i) {
      if (i == 0 || scores[order_[i]] != scores[order_[i - 1]]) {
        group_start_.push_back(i);
      }
    }
    group_start_.push_back(order_.size());
  }

  // Midrank AUC of the multiset; same rational value auc_roc would return.
  double auc(std::span<const std::uint32_t> counts) const {
    std::uint64_t neg_below = 0, pos = 0, twice_u = 0;
    for (std::size_t g = 0; g + 1 < group_start_.size(); ++g) {
      std::uint64_t gp = 0, gn = 0;
      for (std::size_t i = group_start_[g]; i < group_start_[g + 1]; ++i) {
        const std::size_t row = order_[i];
        (labels_[row] == 1 ? gp : gn) += counts[row];
      }
      twice_u += 2 * gp * neg_below + gp * gn;
      neg_below += gn;
      pos += gp;
    }
    return static_cast<double>(twice_u) /
           static_cast<double>(2 * pos * neg_below);
  }

 private:
  std::span<const int> labels_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> group_start_;
};

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw UndefinedMetricError("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapResult bootstrap_compare(std::span<const double> model_scores,
                                  std::span<const double> baseline_scores,
                                  std::span<const int> labels,
                                  const BootstrapOptions& options) {
  const std::size_t n = labels.size();
  if (model_scores.size() != n || baseline_scores.size() != n) {
    throw UndefinedMetricError("score vectors and labels differ in length");
  }
  if (options.n_iterations == 0) {
    throw UndefinedMetricError("bootstrap needs at least one iteration");
  }
  BootstrapResult r;
  r.auc_model = auc_roc({model_scores, labels});  // validates both classes
  r.auc_baseline = auc_roc({baseline_scores, labels});
  r.delta_auc_point = r.auc_model - r.auc_baseline;
  r.delta_gini_point = 2.0 * r.delta_auc_point;
  r.n_iterations = options.n_iterations;
  r.seed = options.seed;

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

  const SortedScores model(model_scores, labels);
  const SortedScores baseline(baseline_scores, labels);
  r.deltas.resize(options.n_iterations);
  std::vector<std::size_t> redraws(options.n_iterations, 0);

  parallel_for(options.n_iterations, [&](std::size_t b) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(b)));
    std::vector<std::uint32_t> counts(n);
    for (;;) {
      std::fill(counts.begin(), counts.end(), 0u);
      if (options.stratified) {
        for (const auto& members : by_class) {
          for (std::size_t k = 0; k < members.size(); ++k) {
            ++counts[members[rng.below(members.size())]];
          }
        }
        break;
      }
      std::size_t pos = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto row = static_cast<std::size_t>(rng.below(n));
        ++counts[row];
        pos += labels[row] == 1;
      }
      if (pos > 0 && pos < n) break;
      ++redraws[b];
    }
    r.deltas[b] = model.auc(counts) - baseline.auc(counts);
  });

  r.redraws = std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
  const auto non_positive = std::count_if(
      r.deltas.begin(), r.deltas.end(), [](double d) { return d <= 0.0; });
  r.p_value = static_cast<double>(non_positive) /
              static_cast<double>(options.n_iterations);
  r.ci95_auc = {percentile(r.deltas, 2.5), percentile(r.deltas, 97.5)};
  r.ci95_gini = {2.0 * r.ci95_auc.low, 2.0 * r.ci95_auc.high};
  return r;
}

bool significance_flag(const BootstrapResult& r, double alpha) noexcept {
  return r.p_value < alpha && !r.ci95_auc.contains_zero();
}

}  // namespace credaug
