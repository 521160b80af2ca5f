#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tweetalpha::gbdt {

struct TrainParams {
  double eta = 0.01;
  int n_estimators = 300;
  int max_depth = 5;
  double scale_pos_weight = 0.6;  // multiplies g and h of positive rows
  std::uint64_t seed = 4321;      // recorded; exact greedy itself is seed-free
  double reg_lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;  // minimum child hessian sum
  double base_score = 0.5;

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = true;  // where missing values go
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;  // -G/(H+lambda), before eta scaling

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Pre-shrinkage leaf value for one feature row (NaN = missing).
  double value(const std::vector<double>& row) const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct EvalRecord {
  int round = 0;  // 1-based
  double train_logloss = 0.0;
  double eval_logloss = 0.0;  // NaN when no eval set

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct Model {
  TrainParams params;
  std::vector<std::string> columns;
  std::string schema_hash;
  double base_margin = 0.0;  // logit(base_score)
  std::vector<Tree> trees;
  int best_round = 0;  // argmin eval logloss (1-based); 0 = use all trees
  std::vector<EvalRecord> history;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Hex FNV-1a over the column names; embedded in model documents and checked
/// at prediction time.
std::string schema_hash(const std::vector<std::string>& columns);

/// Throws Error(config) when a parameter is out of range.
void validate_params(const TrainParams& params);

/// Boosted trees for binary logistic loss, exact greedy splits.
///
/// Per round: g = p - y, h = p(1-p), positive rows scaled by
/// scale_pos_weight; thresholds at midpoints of consecutive distinct feature
/// values; gain = 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma; splits
/// with gain <= 0 or a child hessian below min_child_weight are rejected; the
/// missing-value direction is learned by trying both. Equal-gain candidates
/// resolve to the lowest feature index, then the lowest threshold, then
/// default-left. A round with no positive-gain split emits a single-leaf
/// tree. Gradient sums are accumulated in 2^-52 fixed point, which makes the
/// model independent of row order.
///
/// With an eval set, history records per-round train/eval logloss and
/// best_round is set to the eval-logloss argmin (ties -> earliest round).
Model train(const std::vector<std::vector<double>>& rows,
            const std::vector<int>& labels,
            const std::vector<std::string>& columns, const TrainParams& params,
            const std::vector<std::vector<double>>* eval_rows = nullptr,
            const std::vector<int>* eval_labels = nullptr);

/// P(y=1) per row, using trees up to best_round when it is set. The column
/// schema must match the model's. NaN features follow each node's learned
/// default direction.
std::vector<double> predict_proba(const Model& model,
                                  const std::vector<std::vector<double>>& rows,
                                  const std::vector<std::string>& columns);

/// Mean negative log-likelihood with probabilities clamped to
/// [1e-15, 1 - 1e-15].
double logloss(const std::vector<int>& labels, const std::vector<double>& probs);

/// Rank-based AUC, tied scores counted 1/2. Throws Error(data) when only one
/// class is present.
double auc(const std::vector<int>& labels, const std::vector<double>& scores);

/// Versioned JSON document; deserialize(serialize(m)) == m exactly.
std::string serialize(const Model& model);
Model deserialize(const std::string& text);

/// Eval-history artifact: "round,train_logloss,eval_logloss" CSV.
std::string history_csv(const Model& model, const std::string& comment = "");

}  // namespace tweetalpha::gbdt
