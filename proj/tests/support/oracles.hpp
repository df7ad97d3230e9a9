#pragma once

// Slow, direct reference implementations used to check the library. Each one
// follows the textbook definition rather than the library's algorithm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "credaug/matrix.hpp"

namespace oracle {

using credaug::Matrix;

/// Concordant pairs count 2, ties 1: AUC = sum / (2 * P * N).
inline double pairwise_auc(std::span<const double> s, std::span<const int> y) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] == 1) ++pos; else ++neg;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      twice += s[i] > s[j] ? 2 : s[i] == s[j] ? 1 : 0;
    }
  }
  return static_cast<double>(twice) / static_cast<double>(2 * pos * neg);
}

/// max over every score t of |F_pos(t) - F_neg(t)|, by counting.
inline double ks_by_counting(std::span<const double> s, std::span<const int> y) {
  double pos = 0, neg = 0;
  for (int v : y) (v == 1 ? pos : neg) += 1;
  double best = 0;
  for (double t : s) {
    double cp = 0, cn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] <= t) (y[i] == 1 ? cp : cn) += 1;
    }
    best = std::max(best, std::abs(cp / pos - cn / neg));
  }
  return best;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
  return d;
}

/// Reference indices sorted by (distance, index), self excluded when asked.
inline std::vector<std::size_t> neighbors_by_sorting(const Matrix& refs,
                                                     std::span<const double> q,
                                                     std::size_t self,
                                                     bool exclude_self) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t r = 0; r < refs.rows(); ++r) {
    if (exclude_self && r == self) continue;
    all.emplace_back(squared_distance(q, refs.row(r)), r);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (const auto& p : all) out.push_back(p.second);
  return out;
}

/// Majority rows among the m nearest of minority row i in minority+majority.
inline std::vector<std::size_t> majority_neighbor_counts(const Matrix& minority,
                                                         const Matrix& majority,
                                                         std::size_t m) {
  Matrix all = minority;
  all.append_rows(majority);
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < minority.rows(); ++i) {
    const auto order = neighbors_by_sorting(all, minority.row(i), i, true);
    std::size_t c = 0;
    for (std::size_t r = 0; r < m; ++r) c += order[r] >= minority.rows();
    counts.push_back(c);
  }
  return counts;
}

/// Hamilton apportionment in exact rational arithmetic: quota_i =
/// w_i * total / sum(w). Floors first, then one unit each to the largest
/// fractional parts, lower index first on ties.
inline std::vector<std::size_t> hamilton(const std::vector<std::uint64_t>& w_in,
                                         std::size_t total) {
  std::vector<std::uint64_t> w = w_in;
  std::uint64_t sum = std::accumulate(w.begin(), w.end(), std::uint64_t{0});
  if (sum == 0) {
    std::fill(w.begin(), w.end(), 1);
    sum = w.size();
  }
  std::vector<std::size_t> g(w.size());
  std::size_t given = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    g[i] = static_cast<std::size_t>(w[i] * total / sum);
    given += g[i];
  }
  std::vector<bool> bumped(w.size(), false);
  while (given < total) {
    // Fraction of i is (w_i * total mod sum) / sum; pick the largest unbumped.
    std::size_t best = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (bumped[i]) continue;
      if (best == w.size() || (w[i] * total) % sum > (w[best] * total) % sum) best = i;
    }
    bumped[best] = true;
    ++g[best];
    ++given;
  }
  return g;
}

/// Mean and population standard deviation by Welford's single pass.
inline std::pair<double, double> welford(std::span<const double> v) {
  double mean = 0, m2 = 0;
  std::size_t n = 0;
  for (double x : v) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n))};
}

inline double ecdf(std::span<const double> v, double t) {
  return static_cast<double>(std::count_if(v.begin(), v.end(),
                                           [&](double x) { return x <= t; })) /
         static_cast<double>(v.size());
}

/// Two-sample KS statistic by evaluating both ECDFs at every sample point.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  double best = 0;
  for (auto v : {a, b}) {
    for (double t : v) best = std::max(best, std::abs(ecdf(a, t) - ecdf(b, t)));
  }
  return best;
}

/// W1 as the integral of |F_a^-1(u) - F_b^-1(u)| over u in (0, 1): a step
/// function of u with breaks at k/n_a and k/n_b.
inline double wasserstein_quantile(std::span<const double> a_in,
                                   std::span<const double> b_in) {
  std::vector<double> a(a_in.begin(), a_in.end()), b(b_in.begin(), b_in.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t k = 1; k < a.size(); ++k) breaks.push_back(double(k) / a.size());
  for (std::size_t k = 1; k < b.size(); ++k) breaks.push_back(double(k) / b.size());
  std::sort(breaks.begin(), breaks.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    const auto qa = a[std::min(a.size() - 1, static_cast<std::size_t>(mid * a.size()))];
    const auto qb = b[std::min(b.size() - 1, static_cast<std::size_t>(mid * b.size()))];
    total += std::abs(qa - qb) * (hi - lo);
  }
  return total;
}

/// JS divergence (base 2) over `bins` equal-width bins spanning both samples.
/// Bin membership is decided by comparing against explicit edges.
inline double js_divergence(std::span<const double> a, std::span<const double> b,
                            std::size_t bins) {
  double lo = a[0], hi = a[0];
  for (auto v : {a, b}) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (hi == lo) return 0.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  auto hist = [&](std::span<const double> v) {
    std::vector<double> h(bins, 0);
    for (double x : v) {
      std::size_t k = 0;
      while (k + 1 < bins && x >= lo + static_cast<double>(k + 1) * width) ++k;
      h[k] += 1.0 / static_cast<double>(v.size());
    }
    return h;
  };
  const auto p = hist(a), q = hist(b);
  double kl_p = 0, kl_q = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    if (p[k] > 0) kl_p += p[k] * std::log2(p[k] / m);
    if (q[k] > 0) kl_q += q[k] * std::log2(q[k] / m);
  }
  return 0.5 * kl_p + 0.5 * kl_q;
}

/// Gaussian blob matrix, rows x cols, centered at `center`.
inline Matrix blob(std::mt19937_64& gen, std::size_t rows, std::size_t cols,
                   double center, double spread = 1.0) {
  std::normal_distribution<double> nd(center, spread);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = nd(gen);
  }
  return m;
}

}  // namespace oracle
