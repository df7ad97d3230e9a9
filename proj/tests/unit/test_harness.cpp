#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "credaug/config.hpp"
#include "credaug/error.hpp"
#include "credaug/gmsc_like.hpp"
#include "credaug/harness.hpp"
#include "credaug/parallel.hpp"
#include "credaug/report.hpp"
#include "credaug/rng.hpp"
#include "oracles.hpp"

using namespace credaug;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const Dataset& small_gmsc() {
  static const Dataset data = [] {
    const auto path = fs::temp_directory_path() / "credaug_test_small_gmsc.csv";
    GmscLikeOptions o;
    o.complete_rows = 1500;
    o.positives = 160;
    o.incomplete_rows = 20;
    o.seed = 5;
    write_gmsc_like_csv(path, o);
    return load_csv(path, gmsc_schema()).data;
  }();
  return data;
}

SuiteOptions fast_options() {
  SuiteOptions o;
  o.bootstrap_iterations = 200;
  return o;
}

std::vector<ExperimentSpec> fast_suite() {
  auto suite = default_suite();
  for (auto& s : suite) s.classifier.n_estimators = 15;
  return suite;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentResult fake(std::string id, double auc, std::size_t n_train) {
  ExperimentResult r;
  r.id = std::move(id);
  r.label = r.id;
  r.auc = auc;
  r.gini = 2 * auc - 1;
  r.n_train = n_train;
  return r;
}

}  // namespace

TEST_CASE("default suite layout") {
  const auto s = default_suite();
  REQUIRE(s.size() == 10);
  CHECK(s[0].id == "E01");
  CHECK(s[0].label() == "Baseline");
  CHECK(s[1].label() == "SMOTE 1x");
  CHECK(s[4].label() == "BorderlineSMOTE 2x");
  CHECK(s[6].label() == "Ensemble 1x each");
  CHECK(s[7].label() == "ADASYN 1x");
  CHECK(s[9].id == "E10");
  CHECK(s[7].resolved_seed(42) == derive_seed(42, "E08"));
}

TEST_CASE("full suite on a small fixture") {
  const Dataset& data = small_gmsc();
  const auto suite = fast_suite();
  const auto report = run_suite(suite, data, fast_options());
  REQUIRE(report.results.size() == 10);
  CHECK(report.failures() == 0);
  CHECK(report.test_digest_before == report.test_digest_after);
  CHECK(report.n_train_baseline + report.n_test == data.rows());

  const std::size_t n_min = report.train_positives;
  for (const auto& r : report.results) {
    INFO(r.id);
    REQUIRE(r.ok);
    std::size_t expect_syn = 0;
    if (r.technique == ScenarioTechnique::kEnsemble) {
      expect_syn = 3 * synthetic_count(r.multiplier, n_min);
    } else if (r.technique != ScenarioTechnique::kNone) {
      expect_syn = synthetic_count(r.multiplier, n_min);
    }
    CHECK(r.n_synthetic == expect_syn);
    CHECK(r.n_train == report.n_train_baseline + r.n_synthetic);
    CHECK(r.n_minority == n_min + r.n_synthetic);
    CHECK(r.minority_fraction == double(r.n_minority) / double(r.n_train));
    CHECK(r.final_ratio == double(r.n_majority) / double(r.n_minority));
    CHECK(r.gini == 2 * r.auc - 1);
    if (r.technique == ScenarioTechnique::kNone) {
      CHECK_FALSE(r.bootstrap_vs_baseline);
      CHECK_FALSE(r.quality);
    } else {
      REQUIRE(r.bootstrap_vs_baseline);
      CHECK(r.bootstrap_vs_baseline->auc_model == r.auc);
      CHECK(r.quality->size() == 6);
    }
  }
  REQUIRE(report.ranking.size() == 10);
  for (const auto& row : report.ranking) {
    if (row.id == report.baseline_id) {
      CHECK(row.delta_auc == 0.0);
      CHECK_FALSE(row.p_value);
    }
  }
  for (std::size_t i = 1; i < report.ranking.size(); ++i) {
    CHECK(report.ranking[i - 1].auc >= report.ranking[i].auc);
  }
}

TEST_CASE("suite reports are byte-identical across reruns and thread counts") {
  const Dataset& data = small_gmsc();
  std::vector<ExperimentSpec> suite = fast_suite();
  suite.resize(3);
  set_num_threads(1);
  const auto a = to_json(run_suite(suite, data, fast_options())).dump();
  const auto b = to_json(run_suite(suite, data, fast_options())).dump();
  set_num_threads(3);
  const auto c = to_json(run_suite(suite, data, fast_options())).dump();
  set_num_threads(1);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("wall_time") == std::string::npos);
}

TEST_CASE("baseline-only suite") {
  std::vector<ExperimentSpec> suite{fast_suite().front()};
  const auto report = run_suite(suite, small_gmsc(), fast_options());
  REQUIRE(report.results.size() == 1);
  CHECK_FALSE(report.results[0].bootstrap_vs_baseline);
  CHECK(report.ranking.size() == 1);
  CHECK(report.ranking[0].rank == 1);
}

TEST_CASE("suites need exactly one baseline and unique ids") {
  auto suite = fast_suite();
  std::vector<ExperimentSpec> none(suite.begin() + 1, suite.end());
  CHECK_THROWS_AS(run_suite(none, small_gmsc(), fast_options()), ConfigError);
  auto twice = suite;
  twice[1].technique = ScenarioTechnique::kNone;
  CHECK_THROWS_AS(run_suite(twice, small_gmsc(), fast_options()), ConfigError);
  auto dup = suite;
  dup[2].id = dup[1].id;
  CHECK_THROWS_AS(run_suite(dup, small_gmsc(), fast_options()), ConfigError);
}

TEST_CASE("failed scenarios are recorded and the suite continues") {
  // Minority far from the majority: no borderline rows exist.
  std::mt19937_64 gen(1);
  Dataset d;
  d.schema.target_name = "y";
  d.schema.features = {{"a"}, {"b"}};
  d.X = oracle::blob(gen, 200, 2, 0.0);
  d.X.append_rows(oracle::blob(gen, 40, 2, 50.0));
  d.y.assign(200, 0);
  d.y.resize(240, 1);
  std::vector<ExperimentSpec> suite(3);
  suite[0].id = "base";
  suite[1].id = "border";
  suite[1].technique = ScenarioTechnique::kBorderlineSmote;
  suite[1].multiplier = 1;
  suite[2].id = "smote";
  suite[2].technique = ScenarioTechnique::kSmote;
  suite[2].multiplier = 1;
  for (auto& s : suite) s.classifier.n_estimators = 5;
  const auto report = run_suite(suite, d, fast_options());
  CHECK(report.failures() == 1);
  CHECK_FALSE(report.find("border")->ok);
  CHECK(report.find("border")->error.find("m/2") != std::string::npos);
  CHECK(report.find("smote")->ok);
  CHECK(report.ranking.size() == 2);
  const auto j = to_json(report);
  CHECK(j["results"][1]["status"] == "failed");
}

TEST_CASE("ranking order and ties") {
  SUBCASE("higher AUC first") {
    std::vector<ExperimentResult> r{fake("E01", 0.6727, 68070), fake("E08", 0.6778, 72880)};
    const auto rows = rank_results(r);
    CHECK(rows[0].id == "E08");
    CHECK(rows[1].id == "E01");
  }
  SUBCASE("single result") {
    std::vector<ExperimentResult> r{fake("E01", 0.6, 10)};
    CHECK(rank_results(r)[0].rank == 1);
  }
  SUBCASE("exact tie goes to smaller n_train, then id") {
    std::vector<ExperimentResult> r{fake("B", 0.7, 200), fake("C", 0.7, 100),
                                    fake("A", 0.7, 200)};
    const auto rows = rank_results(r);
    CHECK(rows[0].id == "C");
    CHECK(rows[1].id == "A");
    CHECK(rows[2].id == "B");
  }
}

TEST_CASE("ADASYN sweep on a fixture with planted overlap") {
  SuiteOptions o = fast_options();
  ExperimentSpec base;
  base.classifier.n_estimators = 15;
  const auto report =
      sweep(ScenarioTechnique::kAdasyn, {3.0, 1.0, 2.0}, small_gmsc(), o, base);
  REQUIRE(report.points.size() == 3);
  CHECK(report.points[0].multiplier == 1.0);
  CHECK(report.points[2].multiplier == 3.0);
  double best = -1, best_m = 0;
  for (const auto& p : report.points) {
    REQUIRE(p.result.ok);
    if (p.result.auc > best) {
      best = p.result.auc;
      best_m = p.multiplier;
    }
  }
  CHECK(report.argmax_multiplier == best_m);
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    CHECK(report.points[i].result.n_train > report.points[i - 1].result.n_train);
    CHECK(report.points[i].result.final_ratio < report.points[i - 1].result.final_ratio);
  }

  const auto dir = fs::temp_directory_path() / "credaug_test_sweep";
  fs::remove_all(dir);
  write_sweep_report(dir, report);
  const auto checks = json::parse(read(dir / "sweep_adasyn_checks.json"));
  CHECK(checks["n_train_increasing"] == true);
  CHECK(checks["final_ratio_decreasing"] == true);
  CHECK(checks["composition_identity"] == true);
  CHECK(fs::exists(dir / "sweep_adasyn.csv"));

  const auto one = sweep(ScenarioTechnique::kSmote, {2.0}, small_gmsc(), o, base);
  CHECK(one.points.size() == 1);
  CHECK(one.argmax_multiplier == 2.0);
  CHECK_THROWS_AS(sweep(ScenarioTechnique::kSmote, {}, small_gmsc(), o, base), ConfigError);
  CHECK_THROWS_AS(sweep(ScenarioTechnique::kSmote, {-1.0}, small_gmsc(), o, base),
                  ConfigError);
}

TEST_CASE("suite report files") {
  auto suite = fast_suite();
  suite.resize(3);
  const auto report = run_suite(suite, small_gmsc(), fast_options());
  const auto dir = fs::temp_directory_path() / "credaug_test_report";
  fs::remove_all(dir);
  write_suite_report(dir, report);
  for (const char* f : {"report.json", "ranking.csv", "significance.csv", "timings.json",
                        "multiplier_effect_smote.csv", "roc_E01.csv", "lorenz_E02.csv",
                        "quality_E02.csv", "bootstrap_E03.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  const auto ranking = read(dir / "ranking.csv");
  CHECK(ranking.rfind("rank,experiment,id,n_train,target_pct,auc,gini,delta_auc,p_value,"
                      "significant\n", 0) == 0);
  const auto effect = read(dir / "multiplier_effect_smote.csv");
  CHECK(effect.find("\n0,") != std::string::npos);
  const auto j = json::parse(read(dir / "report.json"));
  CHECK(j["split"]["test_untouched"] == true);
  CHECK(j["results"].size() == 3);
  CHECK(format_ranking(report.ranking).find("Baseline") != std::string::npos);
}

TEST_CASE("run config parsing") {
  const json doc = json::parse(R"({
    "data_path": "d.csv",
    "schema": {"target": "y", "features": [{"name": "a"}, {"name": "n", "kind": "integer", "cap_low": 0}]},
    "split": {"train_fraction": 0.6, "seed": 3},
    "seed": 9,
    "bootstrap": {"n_iter": 10, "alpha": 0.1},
    "classifier": {"n_estimators": 7},
    "suite": [{"id": "b", "technique": "none"}, {"id": "s", "technique": "smote", "multiplier": 2, "k_neighbors": 3}]
  })");
  const auto cfg = parse_run_config(doc, "/base");
  CHECK(cfg.data_path == fs::path("/base/d.csv"));
  CHECK(cfg.options.train_fraction == 0.6);
  CHECK(cfg.options.split_seed == 3);
  CHECK(cfg.options.global_seed == 9);
  CHECK(cfg.options.bootstrap_iterations == 10);
  REQUIRE(cfg.suite.size() == 2);
  CHECK(cfg.suite[1].k_neighbors == 3);
  CHECK(cfg.suite[1].classifier.n_estimators == 7);
  CHECK(cfg.schema.features[1].kind == FeatureKind::kDiscreteInteger);

  SUBCASE("unknown keys are rejected at every level") {
    for (const char* patch : {R"({"extra": 1})", R"({"split": {"fraction": 0.5}})",
                              R"({"classifier": {"eta": 0.3}})"}) {
      json bad = doc;
      bad.merge_patch(json::parse(patch));
      CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    }
    json bad = doc;
    bad["suite"][0]["mult"] = 1;
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
  }
  SUBCASE("invalid values") {
    json bad = doc;
    bad["split"]["train_fraction"] = 1.0;
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["suite"][0]["technique"] = "smote";
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["suite"][1]["multiplier"] = -1;
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
    bad = doc;
    bad["seed"] = "x";
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
  }
  SUBCASE("suite defaults to the ten scenarios") {
    json d = doc;
    d.erase("suite");
    const auto c = parse_run_config(d);
    CHECK(c.suite.size() == 10);
    CHECK(c.suite[3].classifier.n_estimators == 7);
  }
}

TEST_CASE("shipped GMSC config parses") {
  const auto cfg = load_run_config(fs::path(CREDAUG_TEST_DATA) / ".." / ".." / "configs" /
                                   "gmsc.json");
  CHECK(cfg.suite.size() == 10);
  CHECK(cfg.schema.feature_names() == gmsc_schema().feature_names());
}
