#include "credaug/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "credaug/csv.hpp"
#include "credaug/error.hpp"

namespace credaug {

namespace {

void require_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error("two-sample comparison needs nonempty samples");
  }
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

// sup |F_a - F_b| scaled by n_a * n_b, as an exact integer.
std::uint64_t ks_numerator(const std::vector<double>& a,
                           const std::vector<double>& b) {
  const std::uint64_t na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  std::uint64_t best = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    const std::uint64_t fa = i * nb, fb = j * na;
    best = std::max(best, fa > fb ? fa - fb : fb - fa);
  }
  return best;
}

// P(D >= d) for continuous samples of sizes n and m, by counting monotone
// lattice paths that stay strictly inside |i*m - j*n| < d_num.
double ks_exact_p(std::uint64_t n, std::uint64_t m, std::uint64_t d_num) {
  if (d_num == 0) return 1.0;
  std::vector<double> row(m + 1, 0.0);
  auto inside = [&](std::uint64_t i, std::uint64_t j) {
    const std::uint64_t a = i * m, b = j * n;
    return (a > b ? a - b : b - a) < d_num;
  };
  for (std::uint64_t j = 0; j <= m; ++j) {
    row[j] = (j == 0 || row[j - 1] > 0) && inside(0, j) ? 1.0 : 0.0;
  }
  for (std::uint64_t i = 1; i <= n; ++i) {
    row[0] = row[0] > 0 && inside(i, 0) ? 1.0 : 0.0;
    for (std::uint64_t j = 1; j <= m; ++j) {
      row[j] = inside(i, j) ? row[j] + row[j - 1] : 0.0;
    }
  }
  // Total paths: C(n + m, n).
  double total = 1.0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    total = total * static_cast<double>(m + k) / static_cast<double>(k);
  }
  return std::clamp(1.0 - row[m] / total, 0.0, 1.0);
}

}  // namespace

double kolmogorov_sf(double x) noexcept {
  if (x <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (x < 1.18) {
    // Theta-function form converges fast for small x.
    const double w = std::sqrt(2.0 * pi) / x;
    const double v = -pi * pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 20; k += 2) cdf += std::exp(v * k * k);
    return std::clamp(1.0 - w * cdf, 0.0, 1.0);
  }
  double sf = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sf += sign * term;
    sign = -sign;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sf, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       KsMethod method) {
  require_nonempty(a, b);
  const auto sa = sorted_copy(a), sb = sorted_copy(b);
  const std::uint64_t na = sa.size(), nb = sb.size();
  const std::uint64_t d_num = ks_numerator(sa, sb);
  KsResult r;
  r.statistic = static_cast<double>(d_num) / static_cast<double>(na * nb);
  if (method == KsMethod::kExact) {
    if (na > 25 || nb > 25) {
      throw Error("exact KS p-value is limited to samples of at most 25");
    }
    r.p_value = ks_exact_p(na, nb, d_num);
  } else {
    const double en = static_cast<double>(na) * static_cast<double>(nb) /
                      static_cast<double>(na + nb);
    r.p_value = kolmogorov_sf(std::sqrt(en) * r.statistic);
  }
  return r;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  const auto sa = sorted_copy(a), sb = sorted_copy(b);
  std::vector<double> all(sa);
  all.insert(all.end(), sb.begin(), sb.end());
  std::sort(all.begin(), all.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    while (ia < sa.size() && sa[ia] <= all[k]) ++ia;
    while (ib < sb.size() && sb[ib] <= all[k]) ++ib;
    const double width = all[k + 1] - all[k];
    if (width > 0.0) {
      total += std::abs(static_cast<double>(ia) / na -
                        static_cast<double>(ib) / nb) *
               width;
    }
  }
  return total;
}

double js_divergence(std::span<const double> a, std::span<const double> b,
                     std::size_t n_bins) {
  require_nonempty(a, b);
  if (n_bins == 0) throw Error("js_divergence needs at least one bin");
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  if (!(hi > lo)) return 0.0;  // every value in one bin
  const double width = (hi - lo) / static_cast<double>(n_bins);
  auto histogram = [&](std::span<const double> v) {
    std::vector<double> h(n_bins, 0.0);
    for (double x : v) {
      auto bin = static_cast<std::size_t>((x - lo) / width);
      h[std::min(bin, n_bins - 1)] += 1.0;
    }
    for (auto& c : h) c /= static_cast<double>(v.size());
    return h;
  };
  const auto p = histogram(a), q = histogram(b);
  double js = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) js += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) js += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

std::vector<FeatureQualityRow> quality_report(const Dataset& real_minority,
                                              const Dataset& synthetic,
                                              const QualityOptions& options) {
  if (real_minority.schema.feature_names() != synthetic.schema.feature_names()) {
    throw SchemaError("real and synthetic schemas differ");
  }
  std::vector<FeatureQualityRow> rows;
  for (std::size_t j = 0; j < real_minority.schema.size(); ++j) {
    const auto real = real_minority.X.column(j);
    const auto syn = synthetic.X.column(j);
    FeatureQualityRow row;
    row.feature = real_minority.schema.features[j].name;
    const auto ks = ks_two_sample(real, syn);
    row.ks_stat = ks.statistic;
    row.ks_p = ks.p_value;
    row.wasserstein = wasserstein_1d(real, syn);
    row.js_divergence = js_divergence(real, syn, options.js_bins);
    row.shifted = row.ks_p < options.shift_alpha;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t count_exact_copies(const Dataset& real, const Dataset& synthetic) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < real.rows(); ++i) {
    auto r = real.X.row(i);
    seen.emplace(r.begin(), r.end());
  }
  std::size_t copies = 0;
  for (std::size_t i = 0; i < synthetic.rows(); ++i) {
    auto r = synthetic.X.row(i);
    copies += seen.contains(std::vector<double>(r.begin(), r.end()));
  }
  return copies;
}

void write_quality_csv(const std::filesystem::path& path,
                       const std::vector<FeatureQualityRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "feature,ks_stat,ks_p_value,wasserstein,js_divergence,shifted\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f,%s\n", r.ks_stat,
                  r.ks_p, r.wasserstein, r.js_divergence,
                  r.shifted ? "true" : "false");
    out << csv_escape(r.feature) << buf;
  }
}

}  // namespace credaug
