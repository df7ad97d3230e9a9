#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "credaug/error.hpp"
#include "credaug/gbdt.hpp"
#include "credaug/metrics.hpp"
#include "credaug/parallel.hpp"
#include "oracles.hpp"

using namespace credaug;

namespace {

// Four Gaussian blobs on the corners of a square; opposite corners share a
// label, so no single axis-aligned split separates the classes.
void xor_blobs(std::uint64_t seed, std::size_t per_blob, Matrix& X, std::vector<int>& y) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.5);
  X = Matrix(0, 0);
  y.clear();
  const double cx[] = {-2, 2, -2, 2};
  const double cy[] = {-2, 2, 2, -2};
  for (int b = 0; b < 4; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      const double row[] = {cx[b] + nd(gen), cy[b] + nd(gen)};
      X.append_row(row);
      y.push_back(b < 2 ? 1 : 0);
    }
  }
}

}  // namespace

TEST_CASE("XOR blobs are learned") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(1, 150, X, y);
  GBDTConfig cfg;
  cfg.record_train_auc = true;
  const auto model = train(X, y, cfg);
  const auto p = predict_proba(model, X);
  CHECK(auc_roc({p, y}) >= 0.95);
  CHECK(model.history.back().train_auc >= 0.95);
  CHECK(model.trees.size() == 100);
}

TEST_CASE("weighted training loss never increases") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(2, 100, X, y);
  std::mt19937_64 gen(2);
  for (auto& label : y) {
    if (gen() % 10 == 0) label = 1 - label;  // label noise
  }
  GBDTConfig cfg;
  cfg.scale_pos_weight = 3.0;
  const auto model = train(X, y, cfg);
  REQUIRE(model.history.size() == 100);
  double prev = model.initial_loss;
  for (const auto& h : model.history) {
    CHECK(h.train_loss <= prev);
    prev = h.train_loss;
  }
}

TEST_CASE("models are bit-identical for any thread count") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(3, 200, X, y);
  GBDTConfig cfg;
  cfg.n_estimators = 30;
  set_num_threads(1);
  const auto a = model_to_json(train(X, y, cfg));
  set_num_threads(4);
  const auto b = model_to_json(train(X, y, cfg));
  set_num_threads(1);
  CHECK(a == b);
}

TEST_CASE("a single stump matches the closed-form gain and leaf values") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    const std::size_t n = 12 + gen() % 30;
    Matrix X(n, 3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) X(i, j) = static_cast<double>(gen() % 7);
      y[i] = static_cast<int>(gen() % 3 == 0);
    }
    if (std::accumulate(y.begin(), y.end(), 0) == 0) y[0] = 1;
    GBDTConfig cfg;
    cfg.max_depth = 1;
    cfg.n_estimators = 1;
    cfg.scale_pos_weight = 2.0;
    cfg.min_child_weight = 0.0;
    const auto model = train(X, y, cfg);

    // Gradient statistics at the base score.
    double wp = 0, wt = 0;
    for (int label : y) {
      wp += label ? 2.0 : 0.0;
      wt += label ? 2.0 : 1.0;
    }
    const double p0 = wp / wt;
    CHECK(model.base_score == doctest::Approx(std::log(p0 / (1 - p0))).epsilon(1e-12));
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = y[i] ? 2.0 : 1.0;
      g[i] = w * (p0 - y[i]);
      h[i] = w * p0 * (1 - p0);
    }
    auto score = [&](double G, double H) { return G * G / (H + cfg.reg_lambda); };
    const double G = std::accumulate(g.begin(), g.end(), 0.0);
    const double H = std::accumulate(h.begin(), h.end(), 0.0);

    // Every admissible split with its gain. Splits whose gains agree to
    // within rounding are true ties; any of them is a correct choice.
    struct Candidate {
      int f;
      double t;  // smallest present value >= the cut
      double gain;
    };
    std::vector<Candidate> candidates;
    for (int f = 0; f < 3; ++f) {
      for (double t = 1; t <= 6; t += 1) {
        double gl = 0, hl = 0;
        std::size_t left = 0;
        double present = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
          if (X(i, f) < t) {
            gl += g[i];
            hl += h[i];
            ++left;
          } else {
            present = std::min(present, X(i, f));
          }
        }
        if (left == 0 || left == n || present != t) continue;
        const double gain = score(gl, hl) + score(G - gl, H - hl) - score(G, H);
        candidates.push_back({f, t, gain});
      }
    }
    double best_gain = 1e-6;
    for (const auto& c : candidates) best_gain = std::max(best_gain, c.gain);
    const auto& tree = model.trees.at(0);
    if (best_gain <= 1e-6 + 1e-9) {
      REQUIRE(tree.nodes.size() == 1);
      CHECK(tree.nodes[0].value ==
            doctest::Approx(-G / (H + cfg.reg_lambda) * cfg.learning_rate));
      continue;
    }
    REQUIRE(tree.nodes.size() == 3);
    const int best_f = tree.nodes[0].feature;
    const double best_t = tree.nodes[0].threshold;
    const bool tied_best = std::any_of(candidates.begin(), candidates.end(), [&](const Candidate& c) {
      return c.f == best_f && c.t == best_t && c.gain >= best_gain - 1e-9;
    });
    CHECK(tied_best);
    double gl = 0, hl = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (X(i, best_f) < best_t) {
        gl += g[i];
        hl += h[i];
      }
    }
    const auto& left = tree.nodes[tree.nodes[0].left];
    const auto& right = tree.nodes[tree.nodes[0].right];
    CHECK(left.value == doctest::Approx(-gl / (hl + 1.0) * 0.1).epsilon(1e-12));
    CHECK(right.value ==
          doctest::Approx(-(G - gl) / (H - hl + 1.0) * 0.1).epsilon(1e-12));
  }
}

TEST_CASE("trees respect max_depth") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(4, 100, X, y);
  for (int depth : {1, 2, 4, 6}) {
    GBDTConfig cfg;
    cfg.max_depth = depth;
    cfg.n_estimators = 5;
    for (const auto& t : train(X, y, cfg).trees) CHECK(t.depth() <= depth);
  }
}

TEST_CASE("JSON round trip is exact") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(5, 80, X, y);
  GBDTConfig cfg;
  cfg.n_estimators = 20;
  cfg.scale_pos_weight = 1.7;
  const auto model = train(X, y, cfg);
  const auto text = model_to_json(model);
  const auto back = model_from_json(text);
  CHECK(predict_margin(back, X) == predict_margin(model, X));
  CHECK(model_to_json(back) == text);
  CHECK(text.find("\"format_version\"") != std::string::npos);
  CHECK_THROWS(model_from_json("{\"format_version\": 99}"));
}

TEST_CASE("doubling scale_pos_weight raises the mean positive probability") {
  Matrix X;
  std::vector<int> y;
  xor_blobs(6, 100, X, y);
  std::mt19937_64 gen(6);
  for (auto& label : y) {
    if (gen() % 4 == 0) label = 1 - label;
  }
  auto mean_p = [&](double spw) {
    GBDTConfig cfg;
    cfg.scale_pos_weight = spw;
    cfg.n_estimators = 20;
    const auto p = predict_proba(train(X, y, cfg), X);
    return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  };
  CHECK(mean_p(2.0) > mean_p(1.0));
}

TEST_CASE("scale_pos_weight is the class ratio") {
  Dataset d;
  d.schema.target_name = "y";
  d.schema.features = {{"a"}};
  d.X = Matrix{{1}, {2}, {3}, {4}};
  d.y = {0, 0, 0, 1};
  CHECK(compute_scale_pos_weight(d) == 3.0);
  d.y = {0, 0, 0, 0};
  CHECK_THROWS_AS(compute_scale_pos_weight(d), DegenerateClassError);
}

TEST_CASE("all-negative training set gives near-zero probabilities") {
  const Matrix X{{1}, {2}, {3}, {4}, {5}};
  const std::vector<int> y(5, 0);
  GBDTConfig cfg;
  cfg.n_estimators = 10;
  const auto model = train(X, y, cfg);
  for (double p : predict_proba(model, X)) CHECK(p < 1e-3);
}

TEST_CASE("training and prediction errors") {
  GBDTConfig cfg;
  CHECK_THROWS_AS(train(Matrix{{1}}, std::vector<int>{1}, cfg), TrainingError);
  cfg.max_depth = 0;
  CHECK_THROWS_AS(train(Matrix{{1}, {2}}, std::vector<int>{0, 1}, cfg), ConfigError);
  const auto model = train(Matrix{{1}, {2}, {3}}, std::vector<int>{0, 1, 0}, GBDTConfig{});
  CHECK_THROWS_AS(predict_proba(model, Matrix{{1, 2}}), SchemaError);
}

TEST_CASE("weighted logloss by hand") {
  const double margins[] = {0.0, 0.0};
  const int y[] = {1, 0};
  CHECK(weighted_logloss(margins, y, 3.0) == doctest::Approx(std::log(2.0)));
  const double m2[] = {2.0};
  const int y2[] = {1};
  CHECK(weighted_logloss(m2, y2, 1.0) == doctest::Approx(std::log1p(std::exp(-2.0))));
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
}
