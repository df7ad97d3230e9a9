#include "credaug/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "credaug/config.hpp"
#include "credaug/error.hpp"
#include "credaug/metrics.hpp"
#include "credaug/parallel.hpp"
#include "credaug/report.hpp"

namespace credaug::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputDirEnv = "CREDAUG_OUTPUT_DIR";

struct CommonFlags {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> only;
};

struct SweepFlags {
  std::string technique;
  std::vector<double> multipliers;
};

struct Context {
  RunConfig config;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("-c,--config", f.config, "Run configuration (JSON)")->required();
  sub->add_option("-o,--output-dir", f.output_dir,
                  std::string("Output directory; overrides ") + kOutputDirEnv +
                      " and the config");
  sub->add_option("--seed", f.seed, "Global seed; overrides the config");
  sub->add_option("-j,--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--only", f.only, "Scenario ids to process")->delimiter(',');
}

Context make_context(const CommonFlags& f, std::ostream& out, std::ostream& err) {
  Context ctx{load_run_config(f.config), {}, out, err};
  if (f.seed) ctx.config.options.global_seed = *f.seed;
  ctx.out_dir = ctx.config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) ctx.out_dir = env;
  if (!f.output_dir.empty()) ctx.out_dir = f.output_dir;
  set_num_threads(f.jobs);
  return ctx;
}

Dataset load_data(const Context& ctx) {
  auto loaded = load_csv(ctx.config.data_path, ctx.config.schema);
  ctx.err << "loaded " << loaded.data.rows() << " rows from "
          << ctx.config.data_path.string() << " (" << loaded.rows_dropped
          << " dropped)\n";
  return std::move(loaded.data);
}

const ExperimentSpec& find_spec(const RunConfig& cfg, const std::string& id) {
  for (const auto& s : cfg.suite) {
    if (s.id == id) return s;
  }
  throw ConfigError("no scenario with id '" + id + "' in the suite");
}

const ExperimentSpec& baseline_spec(const RunConfig& cfg) {
  for (const auto& s : cfg.suite) {
    if (s.technique == ScenarioTechnique::kNone) return s;
  }
  throw ConfigError("suite has no baseline scenario");
}

/// Ids named by --only, or the fallback list when the flag is absent.
std::vector<const ExperimentSpec*> selected(const Context& ctx,
                                            const std::vector<std::string>& only,
                                            bool augmenting_only) {
  std::vector<const ExperimentSpec*> specs;
  if (only.empty()) {
    for (const auto& s : ctx.config.suite) {
      if (!augmenting_only || s.technique != ScenarioTechnique::kNone) {
        specs.push_back(&s);
      }
    }
    return specs;
  }
  for (const auto& id : only) {
    const auto& s = find_spec(ctx.config, id);
    if (augmenting_only && s.technique == ScenarioTechnique::kNone) {
      throw ConfigError("scenario '" + id + "' is the baseline and has no synthetics");
    }
    specs.push_back(&s);
  }
  return specs;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_prepare(Context& ctx) {
  const Dataset data = load_data(ctx);
  const PreparedData p = prepare(data, ctx.config.options.train_fraction,
                                 ctx.config.options.split_seed);
  fs::create_directories(ctx.out_dir);
  write_csv(ctx.out_dir / "train.csv", p.split.train);
  write_csv(ctx.out_dir / "test.csv", p.split.test);

  json scaler = {{"features", p.train_std.schema.feature_names()},
                 {"means", p.scaler.means},
                 {"std_devs", p.scaler.std_devs}};
  write_file(ctx.out_dir / "scaler.json", scaler.dump(2) + "\n");

  json split = {{"rows_total", data.rows()},
                {"train_fraction", p.split.train_fraction},
                {"seed", p.split.seed},
                {"n_train", p.split.train.rows()},
                {"n_test", p.split.test.rows()},
                {"train_positives", p.split.train.positives()},
                {"test_positives", p.split.test.positives()},
                {"train_digest", digest(p.split.train)},
                {"test_digest", digest(p.split.test)}};
  write_file(ctx.out_dir / "split.json", split.dump(2) + "\n");

  ctx.out << "train " << p.split.train.rows() << " rows ("
          << p.split.train.positives() << " positives), test "
          << p.split.test.rows() << " rows (" << p.split.test.positives()
          << " positives)\n"
          << "test digest " << split["test_digest"].get<std::string>() << "\n";
  return kOk;
}

void print_quality(std::ostream& out, const std::vector<FeatureQualityRow>& rows) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), "  %-34s %8s %8s %12s %8s\n", "feature", "KS",
                "KS p", "Wasserstein", "JS");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "  %-34s %8.4f %8.3f %12.4f %8.4f%s\n",
                  r.feature.c_str(), r.ks_stat, r.ks_p, r.wasserstein,
                  r.js_divergence, r.shifted ? "  shifted" : "");
    out << buf;
  }
}

// Shared by augment and quality. Synthetics are written only by augment.
int augment_selected(Context& ctx, const std::vector<std::string>& only,
                     bool write_synthetics) {
  const auto specs = selected(ctx, only, true);
  const Dataset data = load_data(ctx);
  const PreparedData p = prepare(data, ctx.config.options.train_fraction,
                                 ctx.config.options.split_seed);
  const Dataset real_minority = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < p.split.train.rows(); ++i) {
      if (p.split.train.y[i] == 1) idx.push_back(i);
    }
    return p.split.train.subset(idx);
  }();
  fs::create_directories(ctx.out_dir);

  int status = kOk;
  for (const auto* spec : specs) {
    try {
      const Augmentation aug = augment(*spec, p, ctx.config.options.global_seed);
      for (const auto& w : aug.warnings) ctx.err << spec->id << ": warning: " << w << "\n";
      if (write_synthetics) {
        write_synthetic_csv(ctx.out_dir / ("synthetic_" + spec->id + ".csv"),
                            aug.finalized, aug.batch);
      }
      ctx.out << spec->id << " (" << spec->label() << "): "
              << aug.finalized.original.rows() << " synthetic rows from "
              << real_minority.rows() << " minority rows\n";
      if (aug.finalized.original.rows() > 0) {
        const auto rows =
            quality_report(real_minority, aug.finalized.original, ctx.config.options.quality);
        write_quality_csv(ctx.out_dir / ("quality_" + spec->id + ".csv"), rows);
        print_quality(ctx.out, rows);
        ctx.out << "  exact copies of real rows: "
                << count_exact_copies(real_minority, aug.finalized.original) << "\n";
      }
    } catch (const Error& e) {
      ctx.err << spec->id << ": failed: " << e.what() << "\n";
      status = kScenarioFailures;
    }
  }
  return status;
}

json model_summary(const ExperimentResult& r) {
  json history = json::array();
  for (const auto& h : r.model.history) history.push_back(h.train_loss);
  return {{"id", r.id},
          {"label", r.label},
          {"n_train", r.n_train},
          {"n_synthetic", r.n_synthetic},
          {"scale_pos_weight", r.scale_pos_weight},
          {"initial_loss", r.model.initial_loss},
          {"train_loss", std::move(history)}};
}

std::vector<const ExperimentSpec*> ids_or_baseline(const Context& ctx,
                                                   const std::vector<std::string>& only) {
  if (only.empty()) return {&baseline_spec(ctx.config)};
  return selected(ctx, only, false);
}

int cmd_train(Context& ctx, const std::vector<std::string>& only) {
  const auto specs = ids_or_baseline(ctx, only);
  const Dataset data = load_data(ctx);
  const PreparedData p = prepare(data, ctx.config.options.train_fraction,
                                 ctx.config.options.split_seed);
  fs::create_directories(ctx.out_dir);
  int status = kOk;
  for (const auto* spec : specs) {
    const auto r = run_experiment(*spec, p, ctx.config.options.global_seed,
                                  ctx.config.options.quality);
    if (!r.ok) {
      ctx.err << spec->id << ": failed: " << r.error << "\n";
      status = kScenarioFailures;
      continue;
    }
    write_file(ctx.out_dir / ("model_" + r.id + ".json"), model_to_json(r.model));
    write_file(ctx.out_dir / ("train_" + r.id + ".json"),
               model_summary(r).dump(2) + "\n");
    ctx.out << r.id << " (" << r.label << "): " << r.model.trees.size()
            << " trees on " << r.n_train << " rows, final loss "
            << (r.model.history.empty() ? r.model.initial_loss
                                        : r.model.history.back().train_loss)
            << "\n";
  }
  return status;
}

int cmd_evaluate(Context& ctx, const std::vector<std::string>& only,
                 const std::string& model_path) {
  std::vector<std::pair<std::string, fs::path>> models;
  if (!model_path.empty()) {
    models.emplace_back(fs::path(model_path).stem().string(), model_path);
  } else {
    for (const auto* spec : ids_or_baseline(ctx, only)) {
      models.emplace_back(spec->id, ctx.out_dir / ("model_" + spec->id + ".json"));
    }
  }
  const Dataset data = load_data(ctx);
  const PreparedData p = prepare(data, ctx.config.options.train_fraction,
                                 ctx.config.options.split_seed);
  fs::create_directories(ctx.out_dir);
  for (const auto& [id, path] : models) {
    const GBDTModel model = model_from_json(read_file(path));
    const auto scores = predict_proba(model, p.test_std.X);
    const ScoredSet s{scores, p.test_std.y};
    const auto roc = curve_points(s, CurveKind::kRoc);
    const auto lorenz = curve_points(s, CurveKind::kLorenz);
    const double positive_rate = static_cast<double>(p.test_std.positives()) /
                                 static_cast<double>(p.test_std.rows());
    const double auc = auc_roc(s);
    json metrics = {{"id", id},
                    {"model", path.string()},
                    {"n_test", p.test_std.rows()},
                    {"auc", auc},
                    {"gini", gini(auc)},
                    {"ks", ks_statistic(s)},
                    {"accuracy_ratio", accuracy_ratio(lorenz, positive_rate)}};
    write_file(ctx.out_dir / ("metrics_" + id + ".json"), metrics.dump(2) + "\n");
    write_curve_csv(ctx.out_dir / ("roc_" + id + ".csv"), roc);
    write_curve_csv(ctx.out_dir / ("lorenz_" + id + ".csv"), lorenz);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: AUC %.4f  Gini %.4f  KS %.4f\n",
                  id.c_str(), auc, gini(auc), metrics["ks"].get<double>());
    ctx.out << buf;
  }
  return kOk;
}

int cmd_run(Context& ctx, const std::vector<std::string>& only) {
  std::vector<ExperimentSpec> specs;
  if (only.empty()) {
    specs = ctx.config.suite;
  } else {
    // The baseline is always rerun; it is deterministic, so its numbers match
    // a full-suite run.
    specs.push_back(baseline_spec(ctx.config));
    for (const auto& id : only) {
      const auto& s = find_spec(ctx.config, id);
      if (s.technique != ScenarioTechnique::kNone) specs.push_back(s);
    }
  }
  const Dataset data = load_data(ctx);
  const SuiteReport report = run_suite(specs, data, ctx.config.options);
  write_suite_report(ctx.out_dir, report);
  ctx.out << format_ranking(report.ranking);
  for (const auto& r : report.results) {
    for (const auto& w : r.warnings) ctx.err << r.id << ": warning: " << w << "\n";
    if (!r.ok) ctx.err << r.id << ": failed: " << r.error << "\n";
  }
  if (report.test_digest_before != report.test_digest_after) {
    ctx.err << "test partition changed during the run\n";
    return kScenarioFailures;
  }
  return report.failures() > 0 ? kScenarioFailures : kOk;
}

int cmd_sweep(Context& ctx, const SweepFlags& flags) {
  SweepSettings settings = ctx.config.sweep;
  if (!flags.technique.empty()) {
    settings.technique = parse_scenario_technique(flags.technique);
  }
  if (!flags.multipliers.empty()) settings.multipliers = flags.multipliers;
  const Dataset data = load_data(ctx);
  ExperimentSpec base;
  const auto& b = baseline_spec(ctx.config);
  base.classifier = b.classifier;
  base.k_neighbors = b.k_neighbors;
  base.m_neighbors = b.m_neighbors;
  const SweepReport report =
      sweep(settings.technique, settings.multipliers, data, ctx.config.options, base);
  write_sweep_report(ctx.out_dir, report);

  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %8s %8s %9s\n", "multiplier",
                "ratio", "n_train", "AUC", "dAUC");
  ctx.out << buf;
  auto line = [&](double m, const ExperimentResult& r) {
    if (!r.ok) {
      std::snprintf(buf, sizeof(buf), "%-10g failed: %s\n", m, r.error.c_str());
    } else {
      std::snprintf(buf, sizeof(buf), "%-10g %9.2f:1 %8zu %8.4f %+9.4f\n", m,
                    r.final_ratio, r.n_train, r.auc,
                    report.baseline.ok ? r.auc - report.baseline.auc : 0.0);
    }
    ctx.out << buf;
  };
  line(0.0, report.baseline);
  bool failed = !report.baseline.ok;
  for (const auto& p : report.points) {
    line(p.multiplier, p.result);
    failed |= !p.result.ok;
  }
  ctx.out << "best multiplier: " << report.argmax_multiplier << "\n";
  return failed ? kScenarioFailures : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minority oversampling experiments for credit default data", "credaug"};
  app.require_subcommand(1);

  CommonFlags common;
  SweepFlags sweep_flags;
  std::string model_path;

  auto* prepare_cmd = app.add_subcommand("prepare", "Cap, split and standardize the data");
  auto* augment_cmd = app.add_subcommand("augment", "Write synthetic rows and quality tables");
  auto* train_cmd = app.add_subcommand("train", "Train scenario models and save them");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score saved models on the test split");
  auto* run_cmd = app.add_subcommand("run", "Run the scenario suite and write the report");
  auto* sweep_cmd = app.add_subcommand("sweep", "Vary the multiplier for one technique");
  auto* quality_cmd = app.add_subcommand("quality", "Per-feature synthetic data quality");
  for (auto* sub : {prepare_cmd, augment_cmd, train_cmd, evaluate_cmd, run_cmd,
                    sweep_cmd, quality_cmd}) {
    add_common(sub, common);
  }
  evaluate_cmd->add_option("--model", model_path, "Model JSON to evaluate");
  sweep_cmd->add_option("--technique", sweep_flags.technique,
                        "smote, borderline_smote, adasyn or ensemble");
  sweep_cmd->add_option("--multipliers", sweep_flags.multipliers, "e.g. 0.5,1,2,3")
      ->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // A --help on a subcommand lands here too.
    if (e.get_exit_code() == 0) return kOk;
    return kConfigOrDataError;
  }

  try {
    Context ctx = make_context(common, out, err);
    if (*prepare_cmd) return cmd_prepare(ctx);
    if (*augment_cmd) return augment_selected(ctx, common.only, true);
    if (*quality_cmd) return augment_selected(ctx, common.only, false);
    if (*train_cmd) return cmd_train(ctx, common.only);
    if (*evaluate_cmd) return cmd_evaluate(ctx, common.only, model_path);
    if (*run_cmd) return cmd_run(ctx, common.only);
    if (*sweep_cmd) return cmd_sweep(ctx, sweep_flags);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigOrDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigOrDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigOrDataError;
  }
  return kConfigOrDataError;
}

}  // namespace credaug::cli
