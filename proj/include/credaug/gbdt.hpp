#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "credaug/dataset.hpp"
#include "credaug/matrix.hpp"

namespace credaug {

struct GBDTConfig {
  int max_depth = 6;
  double learning_rate = 0.1;
  int n_estimators = 100;
  double scale_pos_weight = 1.0;
  double min_child_weight = 1.0;
  double reg_lambda = 1.0;
  std::uint64_t seed = 42;
  /// Record training AUC after every round. Reporting only; never changes
  /// the fitted trees.
  bool record_train_auc = false;

  void validate() const;
};

/// Flat binary tree. A node with feature < 0 is a leaf. Rows go left when
/// x[feature] < threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate
  double sum_hessian = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const noexcept;
  int depth() const;
};

struct RoundLog {
  double train_loss = 0.0;  // weighted mean logistic loss after the round
  double train_auc = -1.0;  // -1 when not recorded
};

struct GBDTModel {
  std::vector<Tree> trees;
  double base_score = 0.0;  // log-odds
  std::size_t n_features = 0;
  GBDTConfig config;
  double initial_loss = 0.0;  // weighted loss at base_score, before round 1
  std::vector<RoundLog> history;

  double margin(std::span<const double> row) const noexcept;
};

/// n_majority / n_minority. Throws DegenerateClassError if a class is absent.
double compute_scale_pos_weight(const Dataset& train);

/// Second-order boosting on the weighted logistic loss with exact greedy
/// splits. Positive rows carry weight scale_pos_weight. Throws TrainingError
/// for fewer than 2 rows or malformed input.
GBDTModel train(const Matrix& X, std::span<const int> y, const GBDTConfig& cfg);
GBDTModel train(const Dataset& train, const GBDTConfig& cfg);

std::vector<double> predict_margin(const GBDTModel& model, const Matrix& X);
std::vector<double> predict_proba(const GBDTModel& model, const Matrix& X);

double sigmoid(double margin) noexcept;

/// Mean of w_i * logloss_i over sum(w). Used for the loss history.
double weighted_logloss(std::span<const double> margins, std::span<const int> y,
                        double scale_pos_weight);

/// JSON document with a format_version field. Thresholds and leaf values are
/// written as decimal strings with 17 significant digits so a reload is exact.
std::string model_to_json(const GBDTModel& model);
GBDTModel model_from_json(const std::string& text);

}  // namespace credaug
