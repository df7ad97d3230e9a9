#include "credaug/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "credaug/error.hpp"

namespace credaug {

namespace {

struct ClassCounts {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

ClassCounts check(ScoredSet s) {
  if (s.scores.size() != s.labels.size()) {
    throw UndefinedMetricError("scores and labels differ in length");
  }
  ClassCounts c;
  for (int label : s.labels) {
    if (label == 1) {
      ++c.pos;
    } else if (label == 0) {
      ++c.neg;
    } else {
      throw UndefinedMetricError("labels must be 0 or 1");
    }
  }
  if (c.pos == 0 || c.neg == 0) {
    throw UndefinedMetricError("metric needs both classes present");
  }
  return c;
}

std::vector<std::size_t> ascending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  return order;
}

}  // namespace

double auc_roc(ScoredSet s) {
  const ClassCounts c = check(s);
  const auto order = ascending_order(s.scores);
  // Ranks are 1-based; a tie group spanning ranks [lo, hi] gets midrank
  // (lo + hi) / 2, so twice the positive rank sum stays an integer.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    while (j < order.size() && s.scores[order[j]] == s.scores[order[i]]) {
      group_pos += s.labels[order[j]] == 1;
      ++j;
    }
    twice_rank_sum += group_pos * ((i + 1) + j);
    i = j;
  }
  const std::uint64_t twice_u = twice_rank_sum - c.pos * (c.pos + 1);
  return static_cast<double>(twice_u) /
         static_cast<double>(2 * c.pos * c.neg);
}

double gini(double auc) noexcept { return 2.0 * auc - 1.0; }

double ks_statistic(ScoredSet s) {
  const ClassCounts c = check(s);
  const auto order = ascending_order(s.scores);
  std::uint64_t cum_pos = 0, cum_neg = 0, best = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = s.scores[order[i]];
    while (i < order.size() && s.scores[order[i]] == v) {
      (s.labels[order[i]] == 1 ? cum_pos : cum_neg) += 1;
      ++i;
    }
    // |F_pos - F_neg| scaled by P * N, kept in integers.
    const std::uint64_t a = cum_pos * c.neg, b = cum_neg * c.pos;
    best = std::max(best, a > b ? a - b : b - a);
  }
  return static_cast<double>(best) / static_cast<double>(c.pos * c.neg);
}

CurvePoints curve_points(ScoredSet s, CurveKind kind) {
  const ClassCounts c = check(s);
  auto order = ascending_order(s.scores);
  std::reverse(order.begin(), order.end());
  const double n = static_cast<double>(order.size());
  CurvePoints curve;
  curve.kind = kind;
  curve.points.emplace_back(0.0, 0.0);
  std::uint64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = s.scores[order[i]];
    while (i < order.size() && s.scores[order[i]] == v) {
      (s.labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    const double y = static_cast<double>(tp) / static_cast<double>(c.pos);
    const double x = kind == CurveKind::kRoc
                         ? static_cast<double>(fp) / static_cast<double>(c.neg)
                         : static_cast<double>(tp + fp) / n;
    curve.points.emplace_back(x, y);
  }
  return curve;
}

double area_under(const CurvePoints& curve) noexcept {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto [x0, y0] = curve.points[i - 1];
    const auto [x1, y1] = curve.points[i];
    area += (x1 - x0) * (y0 + y1) * 0.5;
  }
  return area;
}

double accuracy_ratio(const CurvePoints& lorenz, double positive_rate) noexcept {
  return (area_under(lorenz) - 0.5) / (0.5 * (1.0 - positive_rate));
}

void write_curve_csv(const std::filesystem::path& path,
                     const CurvePoints& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << (curve.kind == CurveKind::kRoc ? "fpr,tpr\n"
                                        : "population_fraction,default_fraction\n");
  char buf[64];
  for (const auto& [x, y] : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.10f,%.10f\n", x, y);
    out << buf;
  }
}

}  // namespace credaug
