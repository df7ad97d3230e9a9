#include "credaug/gbdt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "credaug/error.hpp"
#include "credaug/metrics.hpp"
#include "credaug/parallel.hpp"

namespace credaug {

namespace {

// Minimum loss reduction for a split to be kept. Guards against splits whose
// gain is rounding noise.
constexpr double kMinSplitGain = 1e-6;
constexpr double kMinHessian = 1e-16;

double softplus(double x) noexcept {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct SplitCandidate {
  double gain = kMinSplitGain;
  double threshold = 0.0;
  int feature = -1;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X,
              const std::vector<std::vector<std::uint32_t>>& sorted,
              const GBDTConfig& cfg)
      : X_(X), sorted_(sorted), cfg_(cfg) {}

  // Grows one tree on (grad, hess). On return node_of[r] is the leaf of row r.
  Tree build(const std::vector<double>& grad, const std::vector<double>& hess,
             std::vector<int>& node_of) {
    const std::size_t n = X_.rows();
    const std::size_t n_features = X_.cols();
    Tree tree;
    std::vector<double> node_g(1, 0.0), node_h(1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      node_g[0] += grad[r];
      node_h[0] += hess[r];
    }
    tree.nodes.emplace_back();
    node_of.assign(n, 0);
    std::vector<int> frontier{0};

    for (int depth = 0; depth < cfg_.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> slot_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        slot_of[frontier[s]] = static_cast<int>(s);
      }

      // Best split per (feature, frontier slot); reduced below in feature
      // order so the winner does not depend on the worker schedule.
      std::vector<std::vector<SplitCandidate>> best(
          n_features, std::vector<SplitCandidate>(frontier.size()));
      parallel_for(n_features, [&](std::size_t f) {
        scan_feature(f, grad, hess, node_of, slot_of, frontier, node_g,
                     node_h, best[f]);
      });

      std::vector<SplitCandidate> chosen(frontier.size());
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        for (std::size_t f = 0; f < n_features; ++f) {
          if (best[f][s].feature >= 0 && best[f][s].gain > chosen[s].gain) {
            chosen[s] = best[f][s];
          }
        }
      }

      std::vector<int> next;
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        if (chosen[s].feature < 0) continue;
        const int id = frontier[s];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[id].feature = chosen[s].feature;
        tree.nodes[id].threshold = chosen[s].threshold;
        tree.nodes[id].left = left;
        tree.nodes[id].right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;

      node_g.resize(tree.nodes.size(), 0.0);
      node_h.resize(tree.nodes.size(), 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const auto& parent = tree.nodes[node_of[r]];
        if (parent.feature < 0) continue;
        const int child = X_(r, parent.feature) < parent.threshold
                              ? parent.left
                              : parent.right;
        node_of[r] = child;
        node_g[child] += grad[r];
        node_h[child] += hess[r];
      }
      frontier = std::move(next);
    }

    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      auto& node = tree.nodes[id];
      node.sum_hessian = node_h[id];
      if (node.feature < 0) {
        node.value =
            -node_g[id] / (node_h[id] + cfg_.reg_lambda) * cfg_.learning_rate;
      }
    }
    return tree;
  }

 private:
  void scan_feature(std::size_t f, const std::vector<double>& grad,
                    const std::vector<double>& hess,
                    const std::vector<int>& node_of,
                    const std::vector<int>& slot_of,
                    const std::vector<int>& frontier,
                    const std::vector<double>& node_g,
                    const std::vector<double>& node_h,
                    std::vector<SplitCandidate>& best) const {
    struct Accumulator {
      double g = 0.0;
      double h = 0.0;
      double last = 0.0;
      bool started = false;
    };
    std::vector<Accumulator> acc(frontier.size());
    const double lambda = cfg_.reg_lambda;
    const double mcw = cfg_.min_child_weight;
    for (std::uint32_t r : sorted_[f]) {
      const int s = slot_of[node_of[r]];
      if (s < 0) continue;
      auto& a = acc[s];
      const double v = X_(r, f);
      if (a.started && v != a.last) {
        const int id = frontier[s];
        const double g_right = node_g[id] - a.g;
        const double h_right = node_h[id] - a.h;
        if (a.h >= mcw && h_right >= mcw) {
          const double gain = a.g * a.g / (a.h + lambda) +
                              g_right * g_right / (h_right + lambda) -
                              node_g[id] * node_g[id] / (node_h[id] + lambda);
          if (gain > best[s].gain) {
            best[s] = {gain, v, static_cast<int>(f)};
          }
        }
      }
      a.g += grad[r];
      a.h += hess[r];
      a.last = v;
      a.started = true;
    }
  }

  const Matrix& X_;
  const std::vector<std::vector<std::uint32_t>>& sorted_;
  const GBDTConfig& cfg_;
};

}  // namespace

void GBDTConfig::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (n_estimators < 0) throw ConfigError("n_estimators must be >= 0");
  if (!(scale_pos_weight > 0.0)) {
    throw ConfigError("scale_pos_weight must be positive");
  }
  if (min_child_weight < 0.0) throw ConfigError("min_child_weight must be >= 0");
  if (reg_lambda < 0.0) throw ConfigError("reg_lambda must be >= 0");
}

double Tree::predict(std::span<const double> row) const noexcept {
  int id = 0;
  while (nodes[id].feature >= 0) {
    id = row[nodes[id].feature] < nodes[id].threshold ? nodes[id].left
                                                     : nodes[id].right;
  }
  return nodes[id].value;
}

int Tree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    deepest = std::max(deepest, level[id]);
    if (nodes[id].feature >= 0) {
      level[nodes[id].left] = level[id] + 1;
      level[nodes[id].right] = level[id] + 1;
    }
  }
  return deepest;
}

double GBDTModel::margin(std::span<const double> row) const noexcept {
  double m = base_score;
  for (const auto& t : trees) m += t.predict(row);
  return m;
}

double compute_scale_pos_weight(const Dataset& train) {
  const std::size_t pos = train.positives();
  const std::size_t neg = train.rows() - pos;
  if (pos == 0 || neg == 0) {
    throw DegenerateClassError(
        "scale_pos_weight needs both classes in the training set");
  }
  return static_cast<double>(neg) / static_cast<double>(pos);
}

double sigmoid(double margin) noexcept {
  return margin >= 0 ? 1.0 / (1.0 + std::exp(-margin))
                     : std::exp(margin) / (1.0 + std::exp(margin));
}

double weighted_logloss(std::span<const double> margins, std::span<const int> y,
                        double scale_pos_weight) {
  double loss = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (y[i] == 1) {
      loss += scale_pos_weight * softplus(-margins[i]);
      weight += scale_pos_weight;
    } else {
      loss += softplus(margins[i]);
      weight += 1.0;
    }
  }
  return weight > 0 ? loss / weight : 0.0;
}

GBDTModel train(const Matrix& X, std::span<const int> y, const GBDTConfig& cfg) {
  cfg.validate();
  const std::size_t n = X.rows();
  if (n < 2) throw TrainingError("training needs at least 2 rows");
  if (y.size() != n) throw TrainingError("label count does not match rows");
  if (X.cols() == 0) throw TrainingError("training needs at least 1 feature");
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw TrainingError("too many rows");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw TrainingError("labels must be 0 or 1");
  }
  for (double v : X.flat()) {
    if (!std::isfinite(v)) throw TrainingError("non-finite feature value");
  }

  const std::size_t n_features = X.cols();
  std::vector<std::vector<std::uint32_t>> sorted(n_features);
  parallel_for(n_features, [&](std::size_t f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return X(a, f) < X(b, f);
                     });
  });

  std::vector<double> weight(n);
  double pos_weight = 0.0, total_weight = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    weight[r] = y[r] == 1 ? cfg.scale_pos_weight : 1.0;
    total_weight += weight[r];
    if (y[r] == 1) pos_weight += weight[r];
  }
  // A single-class input would put the base log-odds at +-inf.
  const double rate = std::clamp(pos_weight / total_weight, 1e-7, 1.0 - 1e-7);

  GBDTModel model;
  model.config = cfg;
  model.n_features = n_features;
  model.base_score = std::log(rate / (1.0 - rate));
  std::vector<double> margins(n, model.base_score);
  model.initial_loss = weighted_logloss(margins, y, cfg.scale_pos_weight);

  TreeBuilder builder(X, sorted, cfg);
  std::vector<double> grad(n), hess(n);
  std::vector<int> leaf_of;
  model.trees.reserve(static_cast<std::size_t>(cfg.n_estimators));
  for (int round = 0; round < cfg.n_estimators; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = sigmoid(margins[r]);
      grad[r] = weight[r] * (p - y[r]);
      hess[r] = std::max(weight[r] * p * (1.0 - p), kMinHessian);
    }
    Tree tree = builder.build(grad, hess, leaf_of);
    for (std::size_t r = 0; r < n; ++r) {
      margins[r] += tree.nodes[leaf_of[r]].value;
    }
    RoundLog log;
    log.train_loss = weighted_logloss(margins, y, cfg.scale_pos_weight);
    if (cfg.record_train_auc && pos_weight > 0.0 && pos_weight < total_weight) {
      std::vector<int> labels(y.begin(), y.end());
      log.train_auc = auc_roc(ScoredSet{margins, labels});
    }
    model.history.push_back(log);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

GBDTModel train(const Dataset& data, const GBDTConfig& cfg) {
  data.validate();
  return train(data.X, data.y, cfg);
}

std::vector<double> predict_margin(const GBDTModel& model, const Matrix& X) {
  if (X.rows() > 0 && X.cols() != model.n_features) {
    throw SchemaError("model expects " + std::to_string(model.n_features) +
                      " features, got " + std::to_string(X.cols()));
  }
  std::vector<double> out(X.rows());
  parallel_for(X.rows(), [&](std::size_t i) { out[i] = model.margin(X.row(i)); });
  return out;
}

std::vector<double> predict_proba(const GBDTModel& model, const Matrix& X) {
  auto out = predict_margin(model, X);
  for (auto& m : out) m = sigmoid(m);
  return out;
}

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_exact(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError("bad numeric string '" + s + "' in model document");
  }
  return v;
}

constexpr int kModelFormatVersion = 1;

}  // namespace

std::string model_to_json(const GBDTModel& model) {
  using nlohmann::json;
  const auto& c = model.config;
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["n_features"] = model.n_features;
  doc["base_score"] = exact(model.base_score);
  doc["config"] = {{"max_depth", c.max_depth},
                   {"learning_rate", exact(c.learning_rate)},
                   {"n_estimators", c.n_estimators},
                   {"scale_pos_weight", exact(c.scale_pos_weight)},
                   {"min_child_weight", exact(c.min_child_weight)},
                   {"reg_lambda", exact(c.reg_lambda)},
                   {"seed", c.seed}};
  json trees = json::array();
  for (const auto& t : model.trees) {
    json nodes = json::array();
    for (const auto& nd : t.nodes) {
      if (nd.feature >= 0) {
        nodes.push_back({{"feature", nd.feature},
                         {"threshold", exact(nd.threshold)},
                         {"left", nd.left},
                         {"right", nd.right}});
      } else {
        nodes.push_back({{"leaf", exact(nd.value)}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  json loss = json::array();
  for (const auto& h : model.history) loss.push_back(exact(h.train_loss));
  doc["train_loss"] = std::move(loss);
  return doc.dump(1);
}

GBDTModel model_from_json(const std::string& text) {
  using nlohmann::json;
  GBDTModel model;
  try {
    const json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw SchemaError("unsupported model format_version");
    }
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.base_score = parse_exact(doc.at("base_score"));
    const auto& c = doc.at("config");
    model.config.max_depth = c.at("max_depth").get<int>();
    model.config.learning_rate = parse_exact(c.at("learning_rate"));
    model.config.n_estimators = c.at("n_estimators").get<int>();
    model.config.scale_pos_weight = parse_exact(c.at("scale_pos_weight"));
    model.config.min_child_weight = parse_exact(c.at("min_child_weight"));
    model.config.reg_lambda = parse_exact(c.at("reg_lambda"));
    model.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& jt : doc.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode nd;
        if (jn.contains("leaf")) {
          nd.value = parse_exact(jn.at("leaf"));
        } else {
          nd.feature = jn.at("feature").get<int>();
          nd.threshold = parse_exact(jn.at("threshold"));
          nd.left = jn.at("left").get<int>();
          nd.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(nd);
      }
      const auto count = static_cast<int>(t.nodes.size());
      for (const auto& nd : t.nodes) {
        if (nd.feature >= 0 &&
            (nd.left <= 0 || nd.right <= 0 || nd.left >= count ||
             nd.right >= count ||
             static_cast<std::size_t>(nd.feature) >= model.n_features)) {
          throw SchemaError("malformed tree in model document");
        }
      }
      if (t.nodes.empty()) throw SchemaError("empty tree in model document");
      model.trees.push_back(std::move(t));
    }
    if (doc.contains("train_loss")) {
      for (const auto& l : doc.at("train_loss")) {
        model.history.push_back({parse_exact(l), -1.0});
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
  return model;
}

}  // namespace credaug
