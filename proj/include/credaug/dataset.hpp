#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "credaug/matrix.hpp"

namespace credaug {

enum class FeatureKind { kContinuous, kDiscreteInteger };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  std::optional<double> cap_low;
  std::optional<double> cap_high;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  std::string target_name;

  std::size_t size() const noexcept { return features.size(); }
  std::vector<std::string> feature_names() const;

  /// Throws SchemaError when names collide, caps are inverted, or a discrete
  /// feature carries a fractional cap.
  void validate() const;
};

/// Feature matrix plus binary labels (1 = default, the minority class).
struct Dataset {
  Matrix X;
  std::vector<int> y;
  FeatureSchema schema;

  std::size_t rows() const noexcept { return y.size(); }
  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept { return rows() - positives(); }

  /// Rows with the given label, in their original order.
  Matrix rows_with_label(int label) const;
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws SchemaError on shape or label violations.
  void validate() const;
};

struct LoadResult {
  Dataset data;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Reads an RFC-4180 CSV with a header row. Rows with a missing or
/// unparseable value in any schema column (or a non-binary target) are
/// dropped and counted. Columns not named by the schema are ignored.
LoadResult load_csv(const std::filesystem::path& path,
                    const FeatureSchema& schema);

/// Writes features and target in schema order. Values use shortest
/// round-trip formatting so reloading is lossless.
void write_csv(const std::filesystem::path& path, const Dataset& d);

/// Clamps every value into its feature's [cap_low, cap_high].
Dataset apply_caps(const Dataset& d);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

/// Class-stratified random split. Per-class train counts are
/// round-half-up(count * fraction); the larger class absorbs the +-1 row
/// needed to hit round-half-up(n * fraction) overall. Both partitions keep
/// rows in original order.
SplitResult stratified_split(const Dataset& d, double train_fraction,
                             std::uint64_t seed);

struct ScalerParams {
  std::vector<double> means;
  std::vector<double> std_devs;

  std::size_t size() const noexcept { return means.size(); }
  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

/// Per-feature mean and population standard deviation (ddof = 0) of the
/// training rows. Throws DegenerateScaleError for a constant feature.
ScalerParams fit_scaler(const Dataset& train);

Dataset transform(const Dataset& d, const ScalerParams& s);
Dataset inverse_transform(const Dataset& d, const ScalerParams& s);

/// Matrix-level variants used by the oversamplers.
Matrix transform(const Matrix& X, const ScalerParams& s);
Matrix inverse_transform(const Matrix& X, const ScalerParams& s);

/// Hex SHA-256 over the exact bytes of X and y. Used to prove the test
/// partition is never modified.
std::string digest(const Dataset& d);

}  // namespace credaug
