#include "credaug/gmsc_like.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "credaug/error.hpp"
#include "credaug/rng.hpp"

namespace credaug {

namespace {

double normal(Rng& rng) {
  // Box-Muller; uniform() can return 0, so shift into (0, 1].
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double p = rng.uniform();
  while (p > limit) {
    ++k;
    p *= rng.uniform();
  }
  return k;
}

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void write_gmsc_like_csv(const std::filesystem::path& path,
                         const GmscLikeOptions& options) {
  if (options.positives > options.complete_rows) {
    throw ConfigError("more positives than rows requested");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << ",SeriousDlqin2yrs,RevolvingUtilizationOfUnsecuredLines,age,"
         "NumberOfTime30-59DaysPastDueNotWorse,DebtRatio,MonthlyIncome,"
         "NumberOfOpenCreditLinesAndLoans,NumberOfTimes90DaysLate,"
         "NumberRealEstateLoansOrLines,NumberOfTime60-89DaysPastDueNotWorse,"
         "NumberOfDependents\n";

  const std::size_t total = options.complete_rows + options.incomplete_rows;
  // Row kinds: 0 complete negative, 1 complete positive, 2 incomplete.
  std::vector<int> kind(total, 0);
  std::fill(kind.begin(), kind.begin() + options.positives, 1);
  std::fill(kind.begin() + options.complete_rows, kind.end(), 2);
  Rng order(derive_seed(options.seed, 0));
  order.shuffle(std::span<int>(kind));

  for (std::size_t i = 0; i < total; ++i) {
    Rng rng(derive_seed(options.seed, i + 1));
    const bool incomplete = kind[i] == 2;
    const int y = incomplete ? (rng.uniform() < 0.07 ? 1 : 0) : kind[i];
    // Shared latent risk so the features correlate within a class.
    const double risk = 1.5 * y + normal(rng);

    const double age = std::clamp(std::round(51.0 - 4.0 * risk + 14.0 * normal(rng)), 18.0, 103.0);
    double income = std::round(std::exp(8.55 - 0.12 * risk + 0.65 * normal(rng)));
    if (rng.uniform() < 0.01) income = 0.0;
    const double debt = std::exp(-1.1 + 0.18 * risk + 0.9 * normal(rng));
    const int dependents = poisson(rng, std::max(0.2, 0.75 + 0.12 * risk));
    const int open_lines = poisson(rng, std::max(0.5, 8.4 - 0.5 * risk));
    const int real_estate = poisson(rng, std::max(0.05, 1.0 - 0.15 * risk));
    const double revolving = std::clamp(0.3 + 0.25 * risk + 0.3 * normal(rng), 0.0, 1.5);
    const int late30 = poisson(rng, std::max(0.02, 0.25 + 0.3 * risk));
    const int late90 = poisson(rng, std::max(0.01, 0.1 + 0.25 * risk));
    const int late60 = poisson(rng, std::max(0.01, 0.08 + 0.15 * risk));

    std::string income_field = num(income);
    std::string dependents_field = std::to_string(dependents);
    if (incomplete) {
      if (rng.uniform() < 0.8) {
        income_field = "NA";
      } else {
        dependents_field = "NA";
      }
    }
    out << (i + 1) << ',' << y << ',' << num(revolving) << ',' << num(age) << ','
        << late30 << ',' << num(debt) << ',' << income_field << ',' << open_lines
        << ',' << late90 << ',' << real_estate << ',' << late60 << ','
        << dependents_field << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace credaug
