#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace credaug {

/// Non-owning view of model scores and their binary labels.
struct ScoredSet {
  std::span<const double> scores;
  std::span<const int> labels;
};

/// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 * P(tie), computed from
/// midranks. The result is exactly (2 * concordant + ties) / (2 * P * N).
/// Throws UndefinedMetricError unless both classes are present.
double auc_roc(ScoredSet s);

/// 2 * auc - 1.
double gini(double auc) noexcept;

/// Largest gap between the per-class empirical CDFs of the scores.
double ks_statistic(ScoredSet s);

enum class CurveKind { kRoc, kLorenz };

struct CurvePoints {
  CurveKind kind = CurveKind::kRoc;
  std::vector<std::pair<double, double>> points;
};

/// One point per distinct score threshold, visiting scores from high to low,
/// plus the (0,0) origin. ROC: (FPR, TPR). Lorenz (cumulative accuracy
/// profile): (population fraction, captured positive fraction).
CurvePoints curve_points(ScoredSet s, CurveKind kind);

/// Trapezoidal area under a curve.
double area_under(const CurvePoints& curve) noexcept;

/// Lorenz area above the diagonal relative to the perfect model's. Equals
/// the Gini coefficient of the same scores.
double accuracy_ratio(const CurvePoints& lorenz, double positive_rate) noexcept;

/// Two-column CSV with a header naming the axes.
void write_curve_csv(const std::filesystem::path& path,
                     const CurvePoints& curve);

}  // namespace credaug
