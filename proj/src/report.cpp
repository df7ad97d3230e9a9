#include "credaug/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "credaug/csv.hpp"
#include "credaug/error.hpp"
#include "credaug/metrics.hpp"

namespace credaug {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kReportFormatVersion = 1;

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

json options_json(const SuiteOptions& o) {
  return {{"train_fraction", o.train_fraction},
          {"split_seed", o.split_seed},
          {"global_seed", o.global_seed},
          {"bootstrap_iterations", o.bootstrap_iterations},
          {"bootstrap_stratified", o.bootstrap_stratified},
          {"alpha", o.alpha},
          {"js_bins", o.quality.js_bins}};
}

void write_curves(const fs::path& dir, const ExperimentResult& r,
                  const std::vector<int>& labels,
                  std::vector<fs::path>& written) {
  if (!r.ok || r.test_scores.size() != labels.size()) return;
  const ScoredSet s{r.test_scores, labels};
  for (auto kind : {CurveKind::kRoc, CurveKind::kLorenz}) {
    const auto path =
        dir / ((kind == CurveKind::kRoc ? "roc_" : "lorenz_") + r.id + ".csv");
    write_curve_csv(path, curve_points(s, kind));
    written.push_back(path);
  }
}

}  // namespace

json to_json(const BootstrapResult& r) {
  return {{"auc_model", r.auc_model},
          {"auc_baseline", r.auc_baseline},
          {"delta_auc", r.delta_auc_point},
          {"delta_gini", r.delta_gini_point},
          {"p_value", r.p_value},
          {"ci95_auc", {r.ci95_auc.low, r.ci95_auc.high}},
          {"ci95_gini", {r.ci95_gini.low, r.ci95_gini.high}},
          {"n_iterations", r.n_iterations},
          {"seed", r.seed},
          {"redraws", r.redraws}};
}

json to_json(const FeatureQualityRow& r) {
  return {{"feature", r.feature},
          {"ks_stat", r.ks_stat},
          {"ks_p_value", r.ks_p},
          {"wasserstein", r.wasserstein},
          {"js_divergence", r.js_divergence},
          {"shifted", r.shifted}};
}

json to_json(const ExperimentResult& r) {
  json j = {{"id", r.id},
            {"label", r.label},
            {"technique", std::string(to_string(r.technique))},
            {"multiplier", r.multiplier},
            {"seed", r.seed},
            {"status", r.ok ? "ok" : "failed"}};
  if (!r.ok) j["error"] = r.error;
  j["warnings"] = r.warnings;
  if (!r.ok) return j;
  j["n_train"] = r.n_train;
  j["n_synthetic"] = r.n_synthetic;
  j["n_minority"] = r.n_minority;
  j["n_majority"] = r.n_majority;
  j["minority_fraction"] = r.minority_fraction;
  j["final_ratio"] = r.final_ratio;
  j["scale_pos_weight"] = r.scale_pos_weight;
  j["auc"] = r.auc;
  j["gini"] = r.gini;
  j["ks"] = r.ks;
  if (r.bootstrap_vs_baseline) {
    j["bootstrap_vs_baseline"] = to_json(*r.bootstrap_vs_baseline);
    j["significant"] = r.significant;
  }
  if (r.quality) {
    json q = json::array();
    for (const auto& row : *r.quality) q.push_back(to_json(row));
    j["quality"] = std::move(q);
    j["exact_copies"] = r.exact_copies;
  }
  return j;
}

json to_json(const RankRow& r) {
  json j = {{"rank", r.rank},          {"id", r.id},
            {"label", r.label},        {"n_train", r.n_train},
            {"target_pct", r.target_pct}, {"auc", r.auc},
            {"gini", r.gini},          {"delta_auc", r.delta_auc},
            {"significant", r.significant}};
  j["p_value"] = r.p_value ? json(*r.p_value) : json(nullptr);
  return j;
}

json to_json(const SuiteReport& report) {
  json results = json::array();
  for (const auto& r : report.results) results.push_back(to_json(r));
  json ranking = json::array();
  for (const auto& r : report.ranking) ranking.push_back(to_json(r));
  return {{"format_version", kReportFormatVersion},
          {"options", options_json(report.options)},
          {"split",
           {{"rows_total", report.rows_total},
            {"n_train", report.n_train_baseline},
            {"n_test", report.n_test},
            {"train_positives", report.train_positives},
            {"test_positives", report.test_positives},
            {"test_digest_before", report.test_digest_before},
            {"test_digest_after", report.test_digest_after},
            {"test_untouched",
             report.test_digest_before == report.test_digest_after}}},
          {"baseline_id", report.baseline_id},
          {"results", std::move(results)},
          {"ranking", std::move(ranking)}};
}

json to_json(const SweepReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"multiplier", p.multiplier}, {"result", to_json(p.result)}});
  }
  return {{"format_version", kReportFormatVersion},
          {"technique", std::string(to_string(report.technique))},
          {"baseline", to_json(report.baseline)},
          {"points", std::move(points)},
          {"argmax_multiplier", report.argmax_multiplier}};
}

std::vector<fs::path> write_suite_report(const fs::path& dir,
                                         const SuiteReport& report) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  written.push_back(dir / "report.json");
  write_text(written.back(), to_json(report).dump(2) + "\n");

  {
    written.push_back(dir / "ranking.csv");
    auto out = open_out(written.back());
    out << "rank,experiment,id,n_train,target_pct,auc,gini,delta_auc,p_value,"
           "significant\n";
    for (const auto& r : report.ranking) {
      out << r.rank << ',' << csv_escape(r.label) << ',' << csv_escape(r.id)
          << ',' << r.n_train << ',' << fixed(r.target_pct, 2) << ','
          << fixed(r.auc) << ',' << fixed(r.gini) << ',' << fixed(r.delta_auc)
          << ',' << (r.p_value ? fixed(*r.p_value, 3) : "") << ','
          << (r.significant ? "*" : "") << '\n';
    }
  }

  const ExperimentResult* baseline = report.find(report.baseline_id);
  {
    written.push_back(dir / "significance.csv");
    auto out = open_out(written.back());
    out << "id,experiment,auc_baseline,auc_model,gini_baseline,gini_model,"
           "delta_auc,delta_auc_rel_pct,delta_gini,delta_gini_rel_pct,p_value,"
           "ci95_auc_low,ci95_auc_high,ci95_gini_low,ci95_gini_high,"
           "significant\n";
    for (const auto& r : report.results) {
      if (!r.bootstrap_vs_baseline) continue;
      const auto& b = *r.bootstrap_vs_baseline;
      const double base_gini = gini(b.auc_baseline);
      out << csv_escape(r.id) << ',' << csv_escape(r.label) << ','
          << fixed(b.auc_baseline) << ',' << fixed(b.auc_model) << ','
          << fixed(base_gini) << ',' << fixed(gini(b.auc_model)) << ','
          << fixed(b.delta_auc_point) << ','
          << fixed(100.0 * b.delta_auc_point / b.auc_baseline, 2) << ','
          << fixed(b.delta_gini_point) << ','
          << (base_gini != 0.0 ? fixed(100.0 * b.delta_gini_point / base_gini, 2)
                               : std::string())
          << ',' << fixed(b.p_value, 3) << ',' << fixed(b.ci95_auc.low) << ','
          << fixed(b.ci95_auc.high) << ',' << fixed(b.ci95_gini.low) << ','
          << fixed(b.ci95_gini.high) << ',' << (r.significant ? "true" : "false")
          << '\n';
    }
  }

  // Multiplier effect, one table per technique that appears at more than
  // zero multipliers.
  std::map<ScenarioTechnique, std::vector<const ExperimentResult*>> by_technique;
  for (const auto& r : report.results) {
    if (r.ok && r.technique != ScenarioTechnique::kNone) {
      by_technique[r.technique].push_back(&r);
    }
  }
  for (auto& [technique, rows] : by_technique) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
      return a->multiplier < b->multiplier;
    });
    written.push_back(dir / ("multiplier_effect_" +
                             std::string(to_string(technique)) + ".csv"));
    auto out = open_out(written.back());
    out << "multiplier,final_ratio,n_train,auc,delta_auc\n";
    if (baseline && baseline->ok) {
      out << "0," << fixed(baseline->final_ratio, 2) << ','
          << baseline->n_train << ',' << fixed(baseline->auc) << ','
          << fixed(0.0) << '\n';
    }
    for (const auto* r : rows) {
      out << r->multiplier << ',' << fixed(r->final_ratio, 2) << ','
          << r->n_train << ',' << fixed(r->auc) << ','
          << (baseline && baseline->ok ? fixed(r->auc - baseline->auc) : "")
          << '\n';
    }
  }

  json timings = json::object();
  for (const auto& r : report.results) {
    timings[r.id] = r.wall_time_seconds;
    write_curves(dir, r, report.test_labels, written);
    if (r.quality) {
      written.push_back(dir / ("quality_" + r.id + ".csv"));
      write_quality_csv(written.back(), *r.quality);
    }
    if (r.bootstrap_vs_baseline) {
      written.push_back(dir / ("bootstrap_" + r.id + ".csv"));
      auto out = open_out(written.back());
      out << "iteration,delta_auc\n";
      const auto& deltas = r.bootstrap_vs_baseline->deltas;
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        out << i << ',' << fixed(deltas[i], 9) << '\n';
      }
    }
  }
  written.push_back(dir / "timings.json");
  write_text(written.back(), json{{"wall_time_seconds", timings}}.dump(2) + "\n");
  return written;
}

std::vector<fs::path> write_sweep_report(const fs::path& dir,
                                         const SweepReport& report) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const std::string stem = "sweep_" + std::string(to_string(report.technique));

  written.push_back(dir / (stem + ".json"));
  write_text(written.back(), to_json(report).dump(2) + "\n");

  written.push_back(dir / (stem + ".csv"));
  {
    auto out = open_out(written.back());
    out << "multiplier,final_ratio,n_train,n_synthetic,auc,gini,ks,delta_auc,"
           "p_value,significant\n";
    auto row = [&](double m, const ExperimentResult& r) {
      if (!r.ok) {
        out << m << ",,,,,,,,,failed\n";
        return;
      }
      out << m << ',' << fixed(r.final_ratio, 4) << ',' << r.n_train << ','
          << r.n_synthetic << ',' << fixed(r.auc) << ',' << fixed(r.gini) << ','
          << fixed(r.ks) << ','
          << (r.bootstrap_vs_baseline
                  ? fixed(r.bootstrap_vs_baseline->delta_auc_point)
                  : fixed(0.0))
          << ','
          << (r.bootstrap_vs_baseline ? fixed(r.bootstrap_vs_baseline->p_value, 3)
                                      : "")
          << ',' << (r.significant ? "true" : "false") << '\n';
    };
    row(0.0, report.baseline);
    for (const auto& p : report.points) row(p.multiplier, p.result);
  }

  // Quantities that are monotone in the multiplier by construction.
  bool n_train_increasing = report.baseline.ok;
  bool ratio_decreasing = report.baseline.ok;
  bool counts_exact = true;
  const ExperimentResult* prev = &report.baseline;
  for (const auto& p : report.points) {
    if (!p.result.ok) continue;
    if (prev->ok) {
      n_train_increasing &= p.result.n_train > prev->n_train;
      ratio_decreasing &= p.result.final_ratio < prev->final_ratio;
    }
    if (report.baseline.ok) {
      counts_exact &= p.result.n_train ==
                      report.baseline.n_train + p.result.n_synthetic;
    }
    prev = &p.result;
  }
  written.push_back(dir / (stem + "_checks.json"));
  write_text(written.back(),
             json{{"n_train_increasing", n_train_increasing},
                  {"final_ratio_decreasing", ratio_decreasing},
                  {"composition_identity", counts_exact},
                  {"argmax_multiplier", report.argmax_multiplier}}
                     .dump(2) +
                 "\n");

  for (const auto& p : report.points) {
    write_curves(dir, p.result, report.test_labels, written);
  }
  return written;
}

std::string format_ranking(const std::vector<RankRow>& ranking) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-4s %-28s %8s %8s %8s %8s %9s %8s\n",
                "Rank", "Experiment", "N Train", "Target%", "AUC", "Gini",
                "dAUC", "p-value");
  out << buf;
  for (const auto& r : ranking) {
    const std::string p =
        r.p_value ? fixed(*r.p_value, 3) + (r.significant ? "*" : "") : "---";
    std::snprintf(buf, sizeof(buf),
                  "%-4zu %-28s %8zu %7.1f%% %8.4f %8.4f %+9.4f %8s\n", r.rank,
                  r.label.c_str(), r.n_train, r.target_pct, r.auc, r.gini,
                  r.delta_auc, p.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace credaug
