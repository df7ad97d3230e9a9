#include "credaug/oversample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "credaug/csv.hpp"
#include "credaug/error.hpp"
#include "credaug/neighbors.hpp"
#include "credaug/parallel.hpp"
#include "credaug/rng.hpp"

namespace credaug {

std::string_view to_string(Technique t) noexcept {
  switch (t) {
    case Technique::kSmote:
      return "smote";
    case Technique::kBorderlineSmote:
      return "borderline_smote";
    case Technique::kAdasyn:
      return "adasyn";
  }
  return "unknown";
}

Technique parse_technique(std::string_view name) {
  if (name == "smote") return Technique::kSmote;
  if (name == "borderline_smote") return Technique::kBorderlineSmote;
  if (name == "adasyn") return Technique::kAdasyn;
  throw ConfigError("unknown oversampling technique '" + std::string(name) +
                    "'");
}

void OversampleConfig::validate() const {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw ConfigError("multiplier must be a positive number");
  }
  if (k_neighbors < 1) throw ConfigError("k_neighbors must be >= 1");
  if (m_neighbors < 1) throw ConfigError("m_neighbors must be >= 1");
}

std::size_t synthetic_count(double multiplier, std::size_t n_minority) {
  return static_cast<std::size_t>(
      std::llround(multiplier * static_cast<double>(n_minority)));
}

namespace {

// Seeds below are sub-streams of cfg.seed; row generation uses the row's
// output position as the counter.
constexpr std::uint64_t kPermutationStream = 0xfffffffffffffff0ULL;

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix all = top;
  all.append_rows(bottom);
  return all;
}

void require_minority(const Matrix& minority, std::size_t k) {
  if (minority.rows() < k + 1) {
    throw InsufficientNeighborsError(
        "need at least k+1=" + std::to_string(k + 1) +
        " minority rows, have " + std::to_string(minority.rows()));
  }
}

SyntheticBatch empty_batch(const Matrix& minority) {
  SyntheticBatch b;
  b.X = Matrix(0, minority.cols());
  return b;
}

// Fills rows [0, bases.size()) of `out`: row t interpolates from bases[t]
// toward a uniformly chosen entry of its minority neighbor list.
SyntheticBatch interpolate(const Matrix& minority, const NeighborTable& nn,
                           std::span<const std::size_t> bases,
                           const OversampleConfig& cfg) {
  SyntheticBatch batch;
  batch.X = Matrix(bases.size(), minority.cols());
  batch.origins.resize(bases.size());
  parallel_for(bases.size(), [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    const std::size_t i = bases[t];
    const std::size_t j = nn.index(i, static_cast<std::size_t>(rng.below(nn.k)));
    const double lambda = rng.uniform();
    auto xi = minority.row(i);
    auto xj = minority.row(j);
    auto out = batch.X.row(t);
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = xi[c] + lambda * (xj[c] - xi[c]);
    }
    batch.origins[t] = {cfg.technique, cfg.multiplier, cfg.seed, i, j, lambda};
  });
  return batch;
}

std::vector<std::size_t> round_robin(std::vector<std::size_t> pool,
                                     std::size_t total, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kPermutationStream));
  rng.shuffle(std::span<std::size_t>(pool));
  std::vector<std::size_t> bases(total);
  for (std::size_t t = 0; t < total; ++t) bases[t] = pool[t % pool.size()];
  return bases;
}

std::vector<std::size_t> count_majority_neighbors(const Matrix& minority,
                                                  const Matrix& majority,
                                                  std::size_t k) {
  const Matrix all = stack(minority, majority);
  const NeighborTable nn = knn(minority, all, k, /*exclude_self=*/true);
  std::vector<std::size_t> counts(minority.rows(), 0);
  for (std::size_t q = 0; q < minority.rows(); ++q) {
    for (std::size_t r = 0; r < k; ++r) {
      if (nn.index(q, r) >= minority.rows()) ++counts[q];
    }
  }
  return counts;
}

}  // namespace

SyntheticBatch smote(const Matrix& minority, const OversampleConfig& cfg) {
  cfg.validate();
  const std::size_t total = synthetic_count(cfg.multiplier, minority.rows());
  if (total == 0) return empty_batch(minority);
  require_minority(minority, cfg.k_neighbors);
  const NeighborTable nn = knn(minority, minority, cfg.k_neighbors, true);
  std::vector<std::size_t> pool(minority.rows());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const auto bases = round_robin(std::move(pool), total, cfg.seed);
  return interpolate(minority, nn, bases, cfg);
}

std::vector<std::size_t> BorderlineAssessment::danger_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == BorderlineClass::kDanger) out.push_back(i);
  }
  return out;
}

BorderlineAssessment assess_borderline(const Matrix& minority,
                                       const Matrix& majority, std::size_t m) {
  if (majority.empty()) {
    throw InsufficientNeighborsError("borderline test needs majority rows");
  }
  BorderlineAssessment a;
  a.m = m;
  a.majority_neighbors = count_majority_neighbors(minority, majority, m);
  a.classes.reserve(minority.rows());
  for (std::size_t count : a.majority_neighbors) {
    if (count == m) {
      a.classes.push_back(BorderlineClass::kNoise);
    } else if (2 * count >= m) {
      a.classes.push_back(BorderlineClass::kDanger);
    } else {
      a.classes.push_back(BorderlineClass::kSafe);
    }
  }
  return a;
}

SyntheticBatch borderline_smote(const Matrix& minority, const Matrix& majority,
                                const OversampleConfig& cfg) {
  cfg.validate();
  const std::size_t total = synthetic_count(cfg.multiplier, minority.rows());
  if (total == 0) return empty_batch(minority);
  require_minority(minority, cfg.k_neighbors);
  const auto assessment = assess_borderline(minority, majority, cfg.m_neighbors);
  auto danger = assessment.danger_indices();
  if (danger.empty()) {
    throw NoBorderlineError("no minority row satisfies m/2 <= m' < m (m=" +
                            std::to_string(cfg.m_neighbors) + ")");
  }
  const NeighborTable nn = knn(minority, minority, cfg.k_neighbors, true);
  const auto bases = round_robin(std::move(danger), total, cfg.seed);
  return interpolate(minority, nn, bases, cfg);
}

std::vector<std::size_t> largest_remainder(std::span<const std::uint64_t> weights,
                                           std::size_t total) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> counts(n, 0);
  if (n == 0) return counts;
  std::uint64_t weight_sum = std::accumulate(weights.begin(), weights.end(),
                                             std::uint64_t{0});
  std::vector<std::uint64_t> w(weights.begin(), weights.end());
  if (weight_sum == 0) {
    std::fill(w.begin(), w.end(), 1);
    weight_sum = n;
  }
  std::vector<std::uint64_t> remainder(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t scaled = w[i] * total;
    counts[i] = static_cast<std::size_t>(scaled / weight_sum);
    remainder[i] = scaled % weight_sum;
    assigned += counts[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) {
    ++counts[order[r]];
  }
  return counts;
}

AdasynAllocation adasyn_allocation(const Matrix& minority,
                                   const Matrix& majority, std::size_t k,
                                   std::size_t total) {
  if (majority.empty()) {
    throw InsufficientNeighborsError("ADASYN needs majority rows");
  }
  AdasynAllocation a;
  a.majority_neighbors = count_majority_neighbors(minority, majority, k);
  const std::size_t n = minority.rows();
  a.ratios.resize(n);
  a.normalized.resize(n);
  std::uint64_t delta_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a.ratios[i] = static_cast<double>(a.majority_neighbors[i]) /
                  static_cast<double>(k);
    delta_sum += a.majority_neighbors[i];
  }
  a.uniform_fallback = delta_sum == 0;
  for (std::size_t i = 0; i < n; ++i) {
    a.normalized[i] =
        a.uniform_fallback
            ? 1.0 / static_cast<double>(n)
            : static_cast<double>(a.majority_neighbors[i]) /
                  static_cast<double>(delta_sum);
  }
  // r_i / sum(r) = Delta_i / sum(Delta): apportion on the integer counts so
  // the remainders compare exactly.
  std::vector<std::uint64_t> weights(a.majority_neighbors.begin(),
                                     a.majority_neighbors.end());
  a.counts = largest_remainder(weights, total);
  return a;
}

AdasynResult adasyn(const Matrix& minority, const Matrix& majority,
                    const OversampleConfig& cfg) {
  cfg.validate();
  const std::size_t total = synthetic_count(cfg.multiplier, minority.rows());
  require_minority(minority, cfg.k_neighbors);
  AdasynResult result;
  result.allocation =
      adasyn_allocation(minority, majority, cfg.k_neighbors, total);
  if (total == 0) {
    result.batch = empty_batch(minority);
    return result;
  }
  std::vector<std::size_t> bases;
  bases.reserve(total);
  for (std::size_t i = 0; i < minority.rows(); ++i) {
    bases.insert(bases.end(), result.allocation.counts[i], i);
  }
  const NeighborTable nn = knn(minority, minority, cfg.k_neighbors, true);
  result.batch = interpolate(minority, nn, bases, cfg);
  return result;
}

SyntheticBatch oversample(const Matrix& minority, const Matrix& majority,
                          const OversampleConfig& cfg) {
  switch (cfg.technique) {
    case Technique::kSmote:
      return smote(minority, cfg);
    case Technique::kBorderlineSmote:
      return borderline_smote(minority, majority, cfg);
    case Technique::kAdasyn:
      return adasyn(minority, majority, cfg).batch;
  }
  throw ConfigError("unknown technique");
}

FinalizedBatch finalize_batch(const SyntheticBatch& batch,
                              const ScalerParams& scaler,
                              const FeatureSchema& schema) {
  if (batch.X.cols() != schema.size() || scaler.size() != schema.size()) {
    throw SchemaError("synthetic batch arity does not match schema");
  }
  FinalizedBatch out;
  out.original.schema = schema;
  out.original.X = inverse_transform(batch.X, scaler);
  out.original.y.assign(batch.size(), 1);
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& f = schema.features[j];
    for (std::size_t i = 0; i < out.original.rows(); ++i) {
      double& v = out.original.X(i, j);
      if (f.kind == FeatureKind::kDiscreteInteger) v = std::round(v);
      if (f.cap_low) v = std::max(v, *f.cap_low);
      if (f.cap_high) v = std::min(v, *f.cap_high);
    }
  }
  out.standardized = transform(out.original, scaler);
  return out;
}

SyntheticBatch ensemble_combine(std::span<const SyntheticBatch> batches) {
  SyntheticBatch out;
  for (const auto& b : batches) {
    if (!out.X.empty() && !b.X.empty() && b.X.cols() != out.X.cols()) {
      throw SchemaError("cannot combine batches of different widths");
    }
    out.X.append_rows(b.X);
    out.origins.insert(out.origins.end(), b.origins.begin(), b.origins.end());
  }
  return out;
}

void write_synthetic_csv(const std::filesystem::path& path,
                         const FinalizedBatch& finalized,
                         const SyntheticBatch& batch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  auto header = finalized.original.schema.feature_names();
  header.push_back(finalized.original.schema.target_name);
  for (const char* col :
       {"technique", "multiplier", "seed", "parent_i", "parent_j", "lambda"}) {
    header.emplace_back(col);
  }
  out << csv_join(header) << '\n';
  char buf[32];
  auto num = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::string line;
    for (double v : finalized.original.X.row(i)) line += num(v) + ",";
    line += "1,";
    const auto& o = batch.origins[i];
    line += std::string(to_string(o.technique)) + "," + num(o.multiplier) +
            "," + std::to_string(o.seed) + "," + std::to_string(o.parent_i) +
            "," + std::to_string(o.parent_j) + "," + num(o.lambda);
    out << line << '\n';
  }
}

}  // namespace credaug
