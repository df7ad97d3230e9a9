#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "credaug/dataset.hpp"
#include "credaug/matrix.hpp"

namespace credaug {

enum class Technique { kSmote, kBorderlineSmote, kAdasyn };

std::string_view to_string(Technique t) noexcept;
/// Accepts "smote", "borderline_smote", "adasyn". Throws ConfigError.
Technique parse_technique(std::string_view name);

struct OversampleConfig {
  Technique technique = Technique::kSmote;
  double multiplier = 1.0;  // G = round(multiplier * n_minority)
  std::size_t k_neighbors = 5;
  std::size_t m_neighbors = 10;  // borderline danger test only
  std::uint64_t seed = 42;

  void validate() const;
};

/// Where a synthetic row came from: x = x_i + lambda * (x_j - x_i), with
/// parent indices into the minority matrix the batch was generated from.
struct SyntheticOrigin {
  Technique technique = Technique::kSmote;
  double multiplier = 0.0;
  std::uint64_t seed = 0;
  std::size_t parent_i = 0;
  std::size_t parent_j = 0;
  double lambda = 0.0;
};

/// Generated minority rows in standardized space. Every row has label 1.
struct SyntheticBatch {
  Matrix X;
  std::vector<SyntheticOrigin> origins;

  std::size_t size() const noexcept { return origins.size(); }
};

/// round(multiplier * n_minority), halves rounded away from zero.
std::size_t synthetic_count(double multiplier, std::size_t n_minority);

/// SMOTE. Base instances are visited round-robin over a seeded permutation of
/// the minority rows; each synthetic interpolates toward one of the base's k
/// nearest minority neighbors (uniform choice) with lambda ~ U[0, 1).
SyntheticBatch smote(const Matrix& minority, const OversampleConfig& cfg);

enum class BorderlineClass { kSafe, kDanger, kNoise };

struct BorderlineAssessment {
  std::size_t m = 0;
  std::vector<std::size_t> majority_neighbors;  // m' per minority row
  std::vector<BorderlineClass> classes;

  std::vector<std::size_t> danger_indices() const;
};

/// Danger test over the m nearest neighbors in minority + majority:
/// noise if m' == m, danger (borderline) if m/2 <= m' < m, safe otherwise.
BorderlineAssessment assess_borderline(const Matrix& minority,
                                       const Matrix& majority, std::size_t m);

/// Borderline-SMOTE (variant 1). Throws NoBorderlineError when no minority
/// row passes the danger test.
SyntheticBatch borderline_smote(const Matrix& minority, const Matrix& majority,
                                const OversampleConfig& cfg);

struct AdasynAllocation {
  std::vector<std::size_t> majority_neighbors;  // Delta_i
  std::vector<double> ratios;                   // r_i = Delta_i / k
  std::vector<double> normalized;               // r_i / sum(r)
  std::vector<std::size_t> counts;              // g_i, sums to G
  bool uniform_fallback = false;                // every r_i was 0
};

/// Largest-remainder apportionment of `total` proportional to integer
/// weights. Leftover units go to the largest fractional parts, ties to the
/// lower index. All-zero weights are treated as uniform.
std::vector<std::size_t> largest_remainder(std::span<const std::uint64_t> weights,
                                           std::size_t total);

AdasynAllocation adasyn_allocation(const Matrix& minority,
                                   const Matrix& majority, std::size_t k,
                                   std::size_t total);

struct AdasynResult {
  SyntheticBatch batch;
  AdasynAllocation allocation;
};

AdasynResult adasyn(const Matrix& minority, const Matrix& majority,
                    const OversampleConfig& cfg);

/// Dispatches on cfg.technique. ADASYN's allocation is discarded.
SyntheticBatch oversample(const Matrix& minority, const Matrix& majority,
                          const OversampleConfig& cfg);

struct FinalizedBatch {
  Dataset original;      // original units, discrete features rounded, capped
  Dataset standardized;  // the same rows re-standardized for training
};

/// Maps a batch back to original units, rounds discrete-integer features to
/// the nearest integer, clamps into the schema caps, and re-standardizes.
FinalizedBatch finalize_batch(const SyntheticBatch& batch,
                              const ScalerParams& scaler,
                              const FeatureSchema& schema);

/// Concatenates batches in order, keeping every row's origin. No dedup.
SyntheticBatch ensemble_combine(std::span<const SyntheticBatch> batches);

/// Synthetic rows in original units and the target (always 1), followed by
/// the provenance columns
/// technique, multiplier, seed, parent_i, parent_j, lambda.
void write_synthetic_csv(const std::filesystem::path& path,
                         const FinalizedBatch& finalized,
                         const SyntheticBatch& batch);

}  // namespace credaug
