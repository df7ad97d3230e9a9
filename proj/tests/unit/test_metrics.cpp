#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "credaug/error.hpp"
#include "credaug/metrics.hpp"
#include "oracles.hpp"

using namespace credaug;

namespace {

void random_fixture(std::mt19937_64& gen, std::vector<double>& s, std::vector<int>& y) {
  const std::size_t n = 2 + gen() % 199;
  const int levels = 1 + static_cast<int>(gen() % 20);  // few levels => many ties
  s.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<double>(gen() % levels) / 7.0;
    y[i] = static_cast<int>(gen() % 2);
  }
  y[0] = 0;
  y[1] = 1;
}

}  // namespace

TEST_CASE("AUC equals pairwise enumeration exactly") {
  std::mt19937_64 gen(1);
  std::vector<double> s;
  std::vector<int> y;
  for (int rep = 0; rep < 300; ++rep) {
    random_fixture(gen, s, y);
    REQUIRE(auc_roc({s, y}) == oracle::pairwise_auc(s, y));
  }
}

TEST_CASE("AUC examples") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  CHECK(auc_roc({s, std::vector<int>{1, 1, 0, 0}}) == 1.0);
  CHECK(auc_roc({s, std::vector<int>{0, 0, 1, 1}}) == 0.0);
  const std::vector<double> flat(4, 0.5);
  CHECK(auc_roc({flat, std::vector<int>{1, 0, 1, 0}}) == 0.5);
  CHECK_THROWS_AS(auc_roc({s, std::vector<int>{1, 1, 1, 1}}), UndefinedMetricError);
  CHECK_THROWS_AS(auc_roc({s, std::vector<int>{1, 0}}), UndefinedMetricError);
}

TEST_CASE("Gini identity") {
  CHECK(gini(0.677839) == doctest::Approx(0.355678).epsilon(1e-15));
  CHECK(gini(0.5) == 0.0);
  CHECK(gini(1.0) == 1.0);
}

TEST_CASE("KS statistic by counting") {
  std::mt19937_64 gen(2);
  std::vector<double> s;
  std::vector<int> y;
  for (int rep = 0; rep < 200; ++rep) {
    random_fixture(gen, s, y);
    CHECK(ks_statistic({s, y}) == doctest::Approx(oracle::ks_by_counting(s, y)).epsilon(1e-12));
  }
  const std::vector<double> sep{0.9, 0.8, 0.2, 0.1};
  CHECK(ks_statistic({sep, std::vector<int>{1, 1, 0, 0}}) == 1.0);
}

TEST_CASE("ROC points and area") {
  const std::vector<double> s{0.9, 0.8, 0.8, 0.3, 0.1};
  const std::vector<int> y{1, 0, 1, 0, 0};
  const auto roc = curve_points({s, y}, CurveKind::kRoc);
  using P = std::pair<double, double>;
  const std::vector<P> expect{{0, 0}, {0, 0.5}, {1.0 / 3, 1}, {2.0 / 3, 1}, {1, 1}};
  REQUIRE(roc.points.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(roc.points[i].first == doctest::Approx(expect[i].first));
    CHECK(roc.points[i].second == doctest::Approx(expect[i].second));
  }
  CHECK(area_under(roc) == doctest::Approx(auc_roc({s, y})).epsilon(1e-12));
}

TEST_CASE("ROC area equals AUC on random fixtures") {
  std::mt19937_64 gen(3);
  std::vector<double> s;
  std::vector<int> y;
  for (int rep = 0; rep < 100; ++rep) {
    random_fixture(gen, s, y);
    CHECK(area_under(curve_points({s, y}, CurveKind::kRoc)) ==
          doctest::Approx(auc_roc({s, y})).epsilon(1e-12));
  }
}

TEST_CASE("Lorenz curve of a perfect model") {
  const std::vector<double> s{0.9, 0.8, 0.4, 0.3, 0.2};
  const std::vector<int> y{1, 1, 0, 0, 0};
  const auto lorenz = curve_points({s, y}, CurveKind::kLorenz);
  CHECK(lorenz.points.front() == std::pair<double, double>{0, 0});
  CHECK(lorenz.points[2].first == doctest::Approx(0.4));
  CHECK(lorenz.points[2].second == 1.0);
  CHECK(lorenz.points.back() == std::pair<double, double>{1, 1});
  CHECK(accuracy_ratio(lorenz, 0.4) == doctest::Approx(1.0));
}

TEST_CASE("accuracy ratio equals Gini") {
  std::mt19937_64 gen(4);
  std::vector<double> s;
  std::vector<int> y;
  for (int rep = 0; rep < 100; ++rep) {
    random_fixture(gen, s, y);
    double pos = 0;
    for (int v : y) pos += v;
    const double rate = pos / static_cast<double>(y.size());
    const auto lorenz = curve_points({s, y}, CurveKind::kLorenz);
    CHECK(accuracy_ratio(lorenz, rate) ==
          doctest::Approx(gini(auc_roc({s, y}))).epsilon(1e-9));
    // Area between the Lorenz curve and the diagonal is gini * (1 - rate) / 2.
    CHECK(area_under(lorenz) - 0.5 ==
          doctest::Approx(gini(auc_roc({s, y})) * (1 - rate) / 2).epsilon(1e-9));
  }
}

TEST_CASE("curve CSV header") {
  const std::vector<double> s{0.9, 0.1};
  const std::vector<int> y{1, 0};
  const auto path = std::filesystem::temp_directory_path() / "credaug_test_roc.csv";
  write_curve_csv(path, curve_points({s, y}, CurveKind::kRoc));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "fpr,tpr");
  write_curve_csv(path, curve_points({s, y}, CurveKind::kLorenz));
  std::ifstream in2(path);
  std::getline(in2, line);
  CHECK(line == "population_fraction,default_fraction");
}
