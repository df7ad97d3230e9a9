#include "credaug/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "credaug/error.hpp"

namespace credaug {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

std::string path_of(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

double get_number(const json& obj, std::string_view where, const char* key,
                  double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(path_of(where, key) + " must be a number");
  return it->get<double>();
}

std::uint64_t get_uint(const json& obj, std::string_view where, const char* key,
                       std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw ConfigError(path_of(where, key) + " must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

bool get_bool(const json& obj, std::string_view where, const char* key,
              bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(path_of(where, key) + " must be a boolean");
  return it->get<bool>();
}

std::string get_string(const json& obj, std::string_view where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path_of(where, key) + " is required");
  if (!it->is_string()) throw ConfigError(path_of(where, key) + " must be a string");
  return it->get<std::string>();
}

FeatureKind parse_kind(const std::string& s, std::string_view where) {
  if (s == "continuous") return FeatureKind::kContinuous;
  if (s == "integer" || s == "discrete" || s == "discrete_integer") {
    return FeatureKind::kDiscreteInteger;
  }
  throw ConfigError(std::string(where) + ".kind must be 'continuous' or 'integer', got '" +
                    s + "'");
}

FeatureSchema parse_schema(const json& j) {
  reject_unknown(j, "schema", {"target", "features"});
  FeatureSchema schema;
  schema.target_name = get_string(j, "schema", "target");
  auto it = j.find("features");
  if (it == j.end() || !it->is_array() || it->empty()) {
    throw ConfigError("schema.features must be a nonempty array");
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& f = (*it)[i];
    const std::string where = "schema.features[" + std::to_string(i) + "]";
    reject_unknown(f, where, {"name", "kind", "cap_low", "cap_high"});
    FeatureSpec spec;
    spec.name = get_string(f, where, "name");
    if (f.contains("kind")) spec.kind = parse_kind(get_string(f, where, "kind"), where);
    if (f.contains("cap_low")) spec.cap_low = get_number(f, where, "cap_low", 0.0);
    if (f.contains("cap_high")) spec.cap_high = get_number(f, where, "cap_high", 0.0);
    schema.features.push_back(std::move(spec));
  }
  try {
    schema.validate();
  } catch (const SchemaError& e) {
    throw ConfigError(std::string("schema: ") + e.what());
  }
  return schema;
}

GBDTConfig parse_classifier(const json& j, std::string_view where, GBDTConfig cfg) {
  reject_unknown(j, where,
                 {"max_depth", "learning_rate", "n_estimators", "min_child_weight",
                  "reg_lambda", "seed", "record_train_auc"});
  cfg.max_depth = static_cast<int>(get_uint(j, where, "max_depth", cfg.max_depth));
  cfg.learning_rate = get_number(j, where, "learning_rate", cfg.learning_rate);
  cfg.n_estimators =
      static_cast<int>(get_uint(j, where, "n_estimators", cfg.n_estimators));
  cfg.min_child_weight = get_number(j, where, "min_child_weight", cfg.min_child_weight);
  cfg.reg_lambda = get_number(j, where, "reg_lambda", cfg.reg_lambda);
  cfg.seed = get_uint(j, where, "seed", cfg.seed);
  cfg.record_train_auc = get_bool(j, where, "record_train_auc", cfg.record_train_auc);
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
  return cfg;
}

struct OversampleDefaults {
  std::size_t k_neighbors = 5;
  std::size_t m_neighbors = 10;
};

OversampleDefaults parse_oversample(const json& j, std::string_view where,
                                    OversampleDefaults d) {
  reject_unknown(j, where, {"k_neighbors", "m_neighbors"});
  d.k_neighbors = get_uint(j, where, "k_neighbors", d.k_neighbors);
  d.m_neighbors = get_uint(j, where, "m_neighbors", d.m_neighbors);
  if (d.k_neighbors == 0 || d.m_neighbors == 0) {
    throw ConfigError(std::string(where) + ": neighbor counts must be positive");
  }
  return d;
}

ScenarioTechnique parse_technique_field(const json& j, std::string_view where) {
  const auto name = get_string(j, where, "technique");
  try {
    return parse_scenario_technique(name);
  } catch (const Error& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

ExperimentSpec parse_spec(const json& j, std::size_t index,
                          const OversampleDefaults& os, const GBDTConfig& clf) {
  const std::string where = "suite[" + std::to_string(index) + "]";
  reject_unknown(j, where,
                 {"id", "technique", "multiplier", "k_neighbors", "m_neighbors",
                  "classifier", "seed"});
  ExperimentSpec spec;
  spec.id = get_string(j, where, "id");
  if (spec.id.empty()) throw ConfigError(where + ".id must be nonempty");
  spec.technique = parse_technique_field(j, where);
  spec.multiplier = get_number(j, where, "multiplier", 0.0);
  if (spec.technique != ScenarioTechnique::kNone &&
      !(spec.multiplier > 0.0 && std::isfinite(spec.multiplier))) {
    throw ConfigError(where + ".multiplier must be positive");
  }
  spec.k_neighbors = get_uint(j, where, "k_neighbors", os.k_neighbors);
  spec.m_neighbors = get_uint(j, where, "m_neighbors", os.m_neighbors);
  if (spec.k_neighbors == 0 || spec.m_neighbors == 0) {
    throw ConfigError(where + ": neighbor counts must be positive");
  }
  spec.classifier = j.contains("classifier")
                        ? parse_classifier(j["classifier"], where + ".classifier", clf)
                        : clf;
  if (j.contains("seed")) spec.seed = get_uint(j, where, "seed", 0);
  return spec;
}

}  // namespace

FeatureSchema gmsc_schema() {
  FeatureSchema s;
  s.target_name = "SeriousDlqin2yrs";
  s.features = {
      {"age", FeatureKind::kContinuous, 21.0, 85.0},
      {"MonthlyIncome", FeatureKind::kContinuous, 0.0, 25000.0},
      {"DebtRatio", FeatureKind::kContinuous, 0.0, std::nullopt},
      {"NumberOfDependents", FeatureKind::kDiscreteInteger, 0.0, std::nullopt},
      {"NumberOfOpenCreditLinesAndLoans", FeatureKind::kDiscreteInteger, 0.0,
       std::nullopt},
      {"NumberRealEstateLoansOrLines", FeatureKind::kDiscreteInteger, 0.0,
       std::nullopt},
  };
  return s;
}

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  reject_unknown(doc, "config",
                 {"data_path", "schema", "split", "seed", "suite", "output_dir",
                  "bootstrap", "quality", "oversample", "classifier", "sweep"});
  RunConfig cfg;

  fs::path data = get_string(doc, "config", "data_path");
  cfg.data_path = data.is_relative() && !base_dir.empty() ? base_dir / data : data;

  if (!doc.contains("schema")) throw ConfigError("config.schema is required");
  cfg.schema = parse_schema(doc["schema"]);

  if (doc.contains("split")) {
    const auto& s = doc["split"];
    reject_unknown(s, "split", {"train_fraction", "seed"});
    cfg.options.train_fraction = get_number(s, "split", "train_fraction", 0.7);
    cfg.options.split_seed = get_uint(s, "split", "seed", 42);
  }
  if (!(cfg.options.train_fraction > 0.0 && cfg.options.train_fraction < 1.0)) {
    throw ConfigError("split.train_fraction must lie strictly between 0 and 1");
  }
  cfg.options.global_seed = get_uint(doc, "config", "seed", 42);

  if (doc.contains("bootstrap")) {
    const auto& b = doc["bootstrap"];
    reject_unknown(b, "bootstrap", {"n_iter", "alpha", "stratified"});
    cfg.options.bootstrap_iterations = get_uint(b, "bootstrap", "n_iter", 1000);
    cfg.options.alpha = get_number(b, "bootstrap", "alpha", 0.05);
    cfg.options.bootstrap_stratified = get_bool(b, "bootstrap", "stratified", false);
  }
  if (cfg.options.bootstrap_iterations == 0) {
    throw ConfigError("bootstrap.n_iter must be positive");
  }
  if (!(cfg.options.alpha > 0.0 && cfg.options.alpha < 1.0)) {
    throw ConfigError("bootstrap.alpha must lie strictly between 0 and 1");
  }

  if (doc.contains("quality")) {
    const auto& q = doc["quality"];
    reject_unknown(q, "quality", {"js_bins", "shift_alpha"});
    cfg.options.quality.js_bins = get_uint(q, "quality", "js_bins", 50);
    cfg.options.quality.shift_alpha = get_number(q, "quality", "shift_alpha", 0.05);
  }
  if (cfg.options.quality.js_bins == 0) {
    throw ConfigError("quality.js_bins must be positive");
  }

  OversampleDefaults os;
  if (doc.contains("oversample")) os = parse_oversample(doc["oversample"], "oversample", os);
  GBDTConfig clf;
  if (doc.contains("classifier")) clf = parse_classifier(doc["classifier"], "classifier", clf);

  if (doc.contains("suite")) {
    const auto& suite = doc["suite"];
    if (!suite.is_array() || suite.empty()) {
      throw ConfigError("suite must be a nonempty array");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      auto spec = parse_spec(suite[i], i, os, clf);
      if (!ids.insert(spec.id).second) {
        throw ConfigError("duplicate scenario id '" + spec.id + "'");
      }
      cfg.suite.push_back(std::move(spec));
    }
  } else {
    cfg.suite = default_suite();
    for (auto& spec : cfg.suite) {
      spec.k_neighbors = os.k_neighbors;
      spec.m_neighbors = os.m_neighbors;
      spec.classifier = clf;
    }
  }
  const auto baselines = std::count_if(cfg.suite.begin(), cfg.suite.end(), [](const auto& s) {
    return s.technique == ScenarioTechnique::kNone;
  });
  if (baselines != 1) {
    throw ConfigError("suite must contain exactly one baseline (technique none), found " +
                      std::to_string(baselines));
  }

  if (doc.contains("output_dir")) cfg.output_dir = get_string(doc, "config", "output_dir");

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    reject_unknown(s, "sweep", {"technique", "multipliers"});
    if (s.contains("technique")) cfg.sweep.technique = parse_technique_field(s, "sweep");
    if (s.contains("multipliers")) {
      const auto& m = s["multipliers"];
      if (!m.is_array() || m.empty()) {
        throw ConfigError("sweep.multipliers must be a nonempty array");
      }
      cfg.sweep.multipliers.clear();
      for (const auto& v : m) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
          throw ConfigError("sweep.multipliers must be positive numbers");
        }
        cfg.sweep.multipliers.push_back(v.get<double>());
      }
    }
  }
  if (cfg.sweep.technique == ScenarioTechnique::kNone) {
    throw ConfigError("sweep.technique cannot be none");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

}  // namespace credaug
