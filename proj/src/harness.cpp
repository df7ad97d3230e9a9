#include "credaug/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

#include "credaug/error.hpp"
#include "credaug/metrics.hpp"
#include "credaug/rng.hpp"

namespace credaug {

std::string_view to_string(ScenarioTechnique t) noexcept {
  switch (t) {
    case ScenarioTechnique::kNone:
      return "none";
    case ScenarioTechnique::kSmote:
      return "smote";
    case ScenarioTechnique::kBorderlineSmote:
      return "borderline_smote";
    case ScenarioTechnique::kAdasyn:
      return "adasyn";
    case ScenarioTechnique::kEnsemble:
      return "ensemble";
  }
  return "unknown";
}

ScenarioTechnique parse_scenario_technique(std::string_view name) {
  if (name == "none" || name == "baseline") return ScenarioTechnique::kNone;
  if (name == "smote") return ScenarioTechnique::kSmote;
  if (name == "borderline_smote") return ScenarioTechnique::kBorderlineSmote;
  if (name == "adasyn") return ScenarioTechnique::kAdasyn;
  if (name == "ensemble") return ScenarioTechnique::kEnsemble;
  throw ConfigError("unknown scenario technique '" + std::string(name) + "'");
}

namespace {

std::string format_multiplier(double m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gx", m);
  return buf;
}

Technique to_oversampler(ScenarioTechnique t) {
  switch (t) {
    case ScenarioTechnique::kSmote:
      return Technique::kSmote;
    case ScenarioTechnique::kBorderlineSmote:
      return Technique::kBorderlineSmote;
    case ScenarioTechnique::kAdasyn:
      return Technique::kAdasyn;
    default:
      throw ConfigError("scenario technique has no single oversampler");
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string ExperimentSpec::label() const {
  switch (technique) {
    case ScenarioTechnique::kNone:
      return "Baseline";
    case ScenarioTechnique::kSmote:
      return "SMOTE " + format_multiplier(multiplier);
    case ScenarioTechnique::kBorderlineSmote:
      return "BorderlineSMOTE " + format_multiplier(multiplier);
    case ScenarioTechnique::kAdasyn:
      return "ADASYN " + format_multiplier(multiplier);
    case ScenarioTechnique::kEnsemble:
      return "Ensemble " + format_multiplier(multiplier) + " each";
  }
  return id;
}

std::uint64_t ExperimentSpec::resolved_seed(std::uint64_t global_seed) const {
  return seed ? *seed : derive_seed(global_seed, id);
}

std::vector<ExperimentSpec> default_suite() {
  using T = ScenarioTechnique;
  const struct {
    const char* id;
    T technique;
    double multiplier;
  } rows[] = {
      {"E01", T::kNone, 0.0},           {"E02", T::kSmote, 1.0},
      {"E03", T::kSmote, 2.0},          {"E04", T::kSmote, 3.0},
      {"E05", T::kBorderlineSmote, 2.0}, {"E06", T::kAdasyn, 2.0},
      {"E07", T::kEnsemble, 1.0},       {"E08", T::kAdasyn, 1.0},
      {"E09", T::kAdasyn, 3.0},         {"E10", T::kBorderlineSmote, 1.0},
  };
  std::vector<ExperimentSpec> suite;
  for (const auto& r : rows) {
    ExperimentSpec s;
    s.id = r.id;
    s.technique = r.technique;
    s.multiplier = r.multiplier;
    suite.push_back(s);
  }
  return suite;
}

PreparedData prepare(const Dataset& data, double train_fraction,
                     std::uint64_t split_seed) {
  PreparedData p;
  p.split = stratified_split(apply_caps(data), train_fraction, split_seed);
  p.scaler = fit_scaler(p.split.train);
  p.train_std = transform(p.split.train, p.scaler);
  p.test_std = transform(p.split.test, p.scaler);
  return p;
}

Augmentation augment(const ExperimentSpec& spec, const PreparedData& prepared,
                     std::uint64_t global_seed) {
  if (spec.technique == ScenarioTechnique::kNone) {
    throw ConfigError("baseline scenario '" + spec.id + "' has nothing to augment");
  }
  const std::uint64_t seed = spec.resolved_seed(global_seed);
  const Matrix minority = prepared.train_std.rows_with_label(1);
  const Matrix majority = prepared.train_std.rows_with_label(0);

  auto config_for = [&](Technique t, std::uint64_t s) {
    OversampleConfig cfg;
    cfg.technique = t;
    cfg.multiplier = spec.multiplier;
    cfg.k_neighbors = spec.k_neighbors;
    cfg.m_neighbors = spec.m_neighbors;
    cfg.seed = s;
    return cfg;
  };

  Augmentation out;
  auto run_one = [&](Technique t, std::uint64_t s) {
    const auto cfg = config_for(t, s);
    if (t != Technique::kAdasyn) return oversample(minority, majority, cfg);
    auto result = adasyn(minority, majority, cfg);
    if (result.allocation.uniform_fallback) {
      out.warnings.push_back(
          "ADASYN: no minority row has majority neighbors; allocation fell "
          "back to uniform");
    }
    out.allocation = std::move(result.allocation);
    return std::move(result.batch);
  };

  if (spec.technique == ScenarioTechnique::kEnsemble) {
    std::vector<SyntheticBatch> parts;
    for (Technique t :
         {Technique::kSmote, Technique::kBorderlineSmote, Technique::kAdasyn}) {
      parts.push_back(run_one(t, derive_seed(seed, to_string(t))));
    }
    out.batch = ensemble_combine(parts);
  } else {
    out.batch = run_one(to_oversampler(spec.technique), seed);
  }
  out.finalized =
      finalize_batch(out.batch, prepared.scaler, prepared.train_std.schema);
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const PreparedData& prepared,
                                std::uint64_t global_seed,
                                const QualityOptions& quality) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult r;
  r.id = spec.id;
  r.label = spec.label();
  r.technique = spec.technique;
  r.multiplier = spec.technique == ScenarioTechnique::kNone ? 0.0 : spec.multiplier;
  r.seed = spec.resolved_seed(global_seed);
  try {
    Dataset merged = prepared.train_std;
    if (spec.technique != ScenarioTechnique::kNone) {
      Augmentation aug = augment(spec, prepared, global_seed);
      r.warnings = std::move(aug.warnings);
      r.n_synthetic = aug.finalized.standardized.rows();
      merged.X.append_rows(aug.finalized.standardized.X);
      merged.y.insert(merged.y.end(), aug.finalized.standardized.y.begin(),
                      aug.finalized.standardized.y.end());
      if (r.n_synthetic > 0) {
        const Dataset real_minority = prepared.split.train.subset([&] {
          std::vector<std::size_t> idx;
          for (std::size_t i = 0; i < prepared.split.train.rows(); ++i) {
            if (prepared.split.train.y[i] == 1) idx.push_back(i);
          }
          return idx;
        }());
        r.quality = quality_report(real_minority, aug.finalized.original, quality);
        r.exact_copies = count_exact_copies(real_minority, aug.finalized.original);
      }
    }
    r.n_train = merged.rows();
    r.n_minority = merged.positives();
    r.n_majority = r.n_train - r.n_minority;
    r.minority_fraction =
        static_cast<double>(r.n_minority) / static_cast<double>(r.n_train);
    r.scale_pos_weight = compute_scale_pos_weight(merged);
    r.final_ratio = r.scale_pos_weight;

    GBDTConfig cfg = spec.classifier;
    cfg.scale_pos_weight = r.scale_pos_weight;
    cfg.seed = r.seed;
    r.model = train(merged, cfg);
    r.test_scores = predict_proba(r.model, prepared.test_std.X);
    const ScoredSet scored{r.test_scores, prepared.test_std.y};
    r.auc = auc_roc(scored);
    r.gini = gini(r.auc);
    r.ks = ks_statistic(scored);
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.wall_time_seconds = seconds_since(start);
  return r;
}

const ExperimentResult* SuiteReport::find(std::string_view id) const {
  for (const auto& r : results) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      results.begin(), results.end(), [](const auto& r) { return !r.ok; }));
}

SuiteReport run_suite(std::span<const ExperimentSpec> specs,
                      const Dataset& data, const SuiteOptions& options) {
  std::set<std::string> ids;
  const ExperimentSpec* baseline_spec = nullptr;
  for (const auto& s : specs) {
    if (s.id.empty()) throw ConfigError("scenario with empty id");
    if (!ids.insert(s.id).second) {
      throw ConfigError("duplicate scenario id '" + s.id + "'");
    }
    if (s.technique == ScenarioTechnique::kNone) {
      if (baseline_spec) throw ConfigError("suite has more than one baseline");
      baseline_spec = &s;
    }
  }
  if (!baseline_spec) throw ConfigError("suite has no baseline scenario");

  SuiteReport report;
  report.options = options;
  report.baseline_id = baseline_spec->id;
  const PreparedData prepared =
      prepare(data, options.train_fraction, options.split_seed);
  report.rows_total = data.rows();
  report.n_train_baseline = prepared.split.train.rows();
  report.n_test = prepared.split.test.rows();
  report.train_positives = prepared.split.train.positives();
  report.test_positives = prepared.split.test.positives();
  report.test_labels = prepared.split.test.y;
  report.test_digest_before = digest(prepared.split.test);

  for (const auto& s : specs) {
    report.results.push_back(
        run_experiment(s, prepared, options.global_seed, options.quality));
  }

  const ExperimentResult* baseline = report.find(report.baseline_id);
  for (auto& r : report.results) {
    if (&r == baseline || !r.ok) continue;
    if (!baseline->ok) {
      r.warnings.push_back("baseline failed; no significance test");
      continue;
    }
    BootstrapOptions bo;
    bo.n_iterations = options.bootstrap_iterations;
    bo.stratified = options.bootstrap_stratified;
    bo.seed = derive_seed(r.seed, "bootstrap");
    r.bootstrap_vs_baseline = bootstrap_compare(
        r.test_scores, baseline->test_scores, report.test_labels, bo);
    r.significant = significance_flag(*r.bootstrap_vs_baseline, options.alpha);
  }

  report.test_digest_after = digest(prepared.split.test);
  report.ranking = rank_results(report.results);
  // The baseline row carries delta 0 by definition.
  if (baseline->ok) {
    for (auto& row : report.ranking) {
      row.delta_auc = row.id == report.baseline_id ? 0.0 : row.auc - baseline->auc;
    }
  }
  return report;
}

std::vector<RankRow> rank_results(std::span<const ExperimentResult> results) {
  std::vector<const ExperimentResult*> ok;
  for (const auto& r : results) {
    if (r.ok) ok.push_back(&r);
  }
  std::stable_sort(ok.begin(), ok.end(), [](const auto* a, const auto* b) {
    if (a->auc != b->auc) return a->auc > b->auc;
    if (a->n_train != b->n_train) return a->n_train < b->n_train;
    return a->id < b->id;
  });
  std::vector<RankRow> rows;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    const auto& r = *ok[i];
    RankRow row;
    row.rank = i + 1;
    row.id = r.id;
    row.label = r.label;
    row.n_train = r.n_train;
    row.target_pct = 100.0 * r.minority_fraction;
    row.auc = r.auc;
    row.gini = r.gini;
    if (r.bootstrap_vs_baseline) {
      row.delta_auc = r.bootstrap_vs_baseline->delta_auc_point;
      row.p_value = r.bootstrap_vs_baseline->p_value;
    }
    row.significant = r.significant;
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepReport sweep(ScenarioTechnique technique, std::vector<double> multipliers,
                  const Dataset& data, const SuiteOptions& options,
                  const ExperimentSpec& base) {
  if (technique == ScenarioTechnique::kNone) {
    throw ConfigError("sweep needs an oversampling technique");
  }
  if (multipliers.empty()) throw ConfigError("sweep needs at least one multiplier");
  std::sort(multipliers.begin(), multipliers.end());
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    if (!(multipliers[i] > 0.0)) {
      throw ConfigError("sweep multipliers must be positive");
    }
    if (i > 0 && multipliers[i] == multipliers[i - 1]) {
      throw ConfigError("duplicate sweep multiplier");
    }
  }

  std::vector<ExperimentSpec> specs;
  ExperimentSpec baseline = base;
  baseline.id = "baseline";
  baseline.technique = ScenarioTechnique::kNone;
  baseline.multiplier = 0.0;
  baseline.seed.reset();
  specs.push_back(baseline);
  for (double m : multipliers) {
    ExperimentSpec s = base;
    s.technique = technique;
    s.multiplier = m;
    s.id = std::string(to_string(technique)) + "_" + format_multiplier(m);
    s.seed.reset();
    specs.push_back(s);
  }

  SuiteReport suite = run_suite(specs, data, options);
  SweepReport report;
  report.technique = technique;
  report.test_labels = std::move(suite.test_labels);
  report.baseline = std::move(suite.results.front());
  double best_auc = -1.0;
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    SweepPoint p{multipliers[i], std::move(suite.results[i + 1])};
    if (p.result.ok && p.result.auc > best_auc) {
      best_auc = p.result.auc;
      report.argmax_multiplier = p.multiplier;
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

}  // namespace credaug
