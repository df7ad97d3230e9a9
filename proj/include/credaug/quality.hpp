#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "credaug/dataset.hpp"

namespace credaug {

enum class KsMethod {
  kAsymptotic,  // Kolmogorov limit distribution at n_a * n_b / (n_a + n_b)
  kExact,       // lattice-path count; both samples must have <= 25 values
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. Throws Error on empty input.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       KsMethod method = KsMethod::kAsymptotic);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x) noexcept;

/// 1-D Wasserstein-1 distance between the empirical distributions:
/// the integral of |F_a - F_b| over the merged sample points.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// Jensen-Shannon divergence (log base 2, so within [0, 1]) between
/// histograms of a and b on n_bins equal-width bins over their joint range.
double js_divergence(std::span<const double> a, std::span<const double> b,
                     std::size_t n_bins = 50);

struct FeatureQualityRow {
  std::string feature;
  double ks_stat = 0.0;
  double ks_p = 1.0;
  double wasserstein = 0.0;
  double js_divergence = 0.0;
  bool shifted = false;  // ks_p < 0.05
};

struct QualityOptions {
  std::size_t js_bins = 50;
  double shift_alpha = 0.05;
};

/// Per-feature similarity of synthetic rows to real minority rows, both in
/// original units. Throws SchemaError if the feature lists differ.
std::vector<FeatureQualityRow> quality_report(const Dataset& real_minority,
                                              const Dataset& synthetic,
                                              const QualityOptions& options = {});

/// Synthetic rows that exactly equal some real row.
std::size_t count_exact_copies(const Dataset& real, const Dataset& synthetic);

void write_quality_csv(const std::filesystem::path& path,
                       const std::vector<FeatureQualityRow>& rows);

}  // namespace credaug
