#include "tweetalpha/gbdt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "tweetalpha/error.hpp"

namespace tweetalpha::gbdt {
namespace {

// Gradient/hessian sums are kept as integers in units of 2^-52 so that
// accumulation order cannot change a split decision. |g| stays well below
// 2^11, so the scaled values fit an int64 and node sums fit __int128.
using fixed_t = long long;
using acc_t = __int128;

fixed_t to_fixed(double x) { return std::llround(std::ldexp(x, 52)); }

double to_real(acc_t v) { return std::ldexp(static_cast<double>(v), -52); }

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

double clamp_prob(double p) {
  constexpr double kEps = 1e-15;
  return std::min(1.0 - kEps, std::max(kEps, p));
}

double logloss_from_margins(const std::vector<int>& y,
                            const std::vector<double>& margins) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double p = clamp_prob(sigmoid(margins[i]));
    sum += y[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(y.size());
}

void validate_data(const std::vector<std::vector<double>>& rows,
                   const std::vector<int>& labels, std::size_t width,
                   const char* what) {
  if (rows.empty()) throw data_error(std::string(what) + ": no rows");
  if (labels.size() != rows.size())
    throw data_error(std::string(what) + ": label count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width)
      throw data_error(std::string(what) + ": row " + std::to_string(i) +
                       " has wrong width");
    for (double v : rows[i])
      if (std::isinf(v))
        throw data_error(std::string(what) + ": row " + std::to_string(i) +
                         " has a non-finite feature");
    if (labels[i] != 0 && labels[i] != 1)
      throw data_error(std::string(what) + ": labels must be 0 or 1");
  }
}

struct SplitChoice {
  double gain = 0.0;  // candidates must beat this strictly, so gain > 0
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
};

double score_term(acc_t g, acc_t h, double lambda) {
  double gd = to_real(g);
  double denom = to_real(h) + lambda;
  if (!(denom > 0.0)) return 0.0;
  return gd * gd / denom;
}

class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<double>>& cols,
             const std::vector<std::vector<std::uint32_t>>& order,
             const std::vector<std::vector<std::uint32_t>>& missing,
             const TrainParams& params)
      : cols_(cols), order_(order), missing_(missing), params_(params) {}

  // Grows one tree for the given per-row gradients; node_of maps each row to
  // its final leaf afterwards.
  Tree grow(const std::vector<fixed_t>& g, const std::vector<fixed_t>& h,
            std::vector<int>& node_of) {
    const std::size_t n = node_of.size();
    Tree tree;
    tree.nodes.emplace_back();
    std::fill(node_of.begin(), node_of.end(), 0);

    int frontier_first = 0;
    std::size_t frontier_size = 1;
    for (int depth = 0; frontier_size > 0; ++depth) {
      const std::size_t m = frontier_size;
      std::vector<acc_t> total_g(m, 0), total_h(m, 0);
      for (std::size_t row = 0; row < n; ++row) {
        int id = node_of[row];
        if (id < frontier_first) continue;
        total_g[static_cast<std::size_t>(id - frontier_first)] += g[row];
        total_h[static_cast<std::size_t>(id - frontier_first)] += h[row];
      }

      std::vector<SplitChoice> best(m);
      if (depth < params_.max_depth) {
        find_splits(g, h, node_of, frontier_first, m, total_g, total_h, best);
      }

      int children_first = static_cast<int>(tree.nodes.size());
      for (std::size_t s = 0; s < m; ++s) {
        std::size_t at = static_cast<std::size_t>(frontier_first) + s;
        if (best[s].feature >= 0) {
          int left_id = static_cast<int>(tree.nodes.size());
          tree.nodes.emplace_back();
          tree.nodes.emplace_back();
          // emplace_back may reallocate, so take the reference afterwards.
          TreeNode& node = tree.nodes[at];
          node.feature = best[s].feature;
          node.threshold = best[s].threshold;
          node.default_left = best[s].default_left;
          node.left = left_id;
          node.right = left_id + 1;
        } else {
          TreeNode& node = tree.nodes[at];
          node.feature = -1;
          double denom = to_real(total_h[s]) + params_.reg_lambda;
          node.leaf_value = denom > 0.0 ? -to_real(total_g[s]) / denom : 0.0;
        }
      }

      for (std::size_t row = 0; row < n; ++row) {
        int id = node_of[row];
        if (id < frontier_first) continue;
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) continue;  // finalized leaf keeps its rows
        double v = cols_[static_cast<std::size_t>(node.feature)][row];
        bool left = std::isnan(v) ? node.default_left : v < node.threshold;
        node_of[row] = left ? node.left : node.right;
      }

      frontier_first = children_first;
      frontier_size = tree.nodes.size() - static_cast<std::size_t>(children_first);
    }
    return tree;
  }

 private:
  void find_splits(const std::vector<fixed_t>& g, const std::vector<fixed_t>& h,
                   const std::vector<int>& node_of, int frontier_first,
                   std::size_t m, const std::vector<acc_t>& total_g,
                   const std::vector<acc_t>& total_h,
                   std::vector<SplitChoice>& best) {
    const double lambda = params_.reg_lambda;
    std::vector<acc_t> miss_g(m), miss_h(m), left_g(m), left_h(m);
    std::vector<double> prev(m);
    std::vector<char> has_prev(m);

    for (std::size_t f = 0; f < cols_.size(); ++f) {
      std::fill(miss_g.begin(), miss_g.end(), 0);
      std::fill(miss_h.begin(), miss_h.end(), 0);
      for (std::uint32_t row : missing_[f]) {
        int id = node_of[row];
        if (id < frontier_first) continue;
        auto s = static_cast<std::size_t>(id - frontier_first);
        miss_g[s] += g[row];
        miss_h[s] += h[row];
      }

      std::fill(left_g.begin(), left_g.end(), 0);
      std::fill(left_h.begin(), left_h.end(), 0);
      std::fill(has_prev.begin(), has_prev.end(), 0);
      const std::vector<double>& col = cols_[f];
      for (std::uint32_t row : order_[f]) {
        int id = node_of[row];
        if (id < frontier_first) continue;
        auto s = static_cast<std::size_t>(id - frontier_first);
        double v = col[row];
        if (has_prev[s] && v != prev[s]) {
          double thr = std::midpoint(prev[s], v);
          if (!(thr > prev[s])) thr = v;  // adjacent representable values
          consider(best[s], static_cast<int>(f), thr, left_g[s], left_h[s],
                   miss_g[s], miss_h[s], total_g[s], total_h[s], lambda);
        }
        left_g[s] += g[row];
        left_h[s] += h[row];
        prev[s] = v;
        has_prev[s] = 1;
      }
    }
  }

  void consider(SplitChoice& best, int feature, double threshold, acc_t gl,
                acc_t hl, acc_t gm, acc_t hm, acc_t gt, acc_t ht,
                double lambda) const {
    // Non-missing totals follow from the node totals; missing rows join the
    // left child (variant 0) or the right child (variant 1). Ties prefer the
    // left default because it is evaluated first.
    acc_t gnm = gt - gm;
    acc_t hnm = ht - hm;
    double parent = score_term(gt, ht, lambda);
    for (int variant = 0; variant < 2; ++variant) {
      bool missing_left = variant == 0;
      acc_t gl_eff = missing_left ? gl + gm : gl;
      acc_t hl_eff = missing_left ? hl + hm : hl;
      acc_t gr_eff = gnm - gl + (missing_left ? 0 : gm);
      acc_t hr_eff = hnm - hl + (missing_left ? 0 : hm);
      double hl_real = to_real(hl_eff);
      double hr_real = to_real(hr_eff);
      if (hl_real < params_.min_child_weight ||
          hr_real < params_.min_child_weight)
        continue;
      if (!(hl_real + lambda > 0.0) || !(hr_real + lambda > 0.0)) continue;
      double gain = 0.5 * (score_term(gl_eff, hl_eff, lambda) +
                           score_term(gr_eff, hr_eff, lambda) - parent) -
                    params_.gamma;
      if (gain > best.gain) {
        best.gain = gain;
        best.feature = feature;
        best.threshold = threshold;
        best.default_left = missing_left;
      }
    }
  }

  const std::vector<std::vector<double>>& cols_;
  const std::vector<std::vector<std::uint32_t>>& order_;
  const std::vector<std::vector<std::uint32_t>>& missing_;
  const TrainParams& params_;
};

void format_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

void validate_params(const TrainParams& p) {
  if (!(p.eta > 0.0) || !std::isfinite(p.eta))
    throw config_error("eta must be positive");
  if (p.n_estimators < 1) throw config_error("n_estimators must be >= 1");
  if (p.max_depth < 0) throw config_error("max_depth must be >= 0");
  if (!(p.scale_pos_weight > 0.0) || p.scale_pos_weight >= 2048.0)
    throw config_error("scale_pos_weight out of range");
  if (!(p.reg_lambda >= 0.0)) throw config_error("reg_lambda must be >= 0");
  if (!(p.gamma >= 0.0)) throw config_error("gamma must be >= 0");
  if (!(p.min_child_weight >= 0.0))
    throw config_error("min_child_weight must be >= 0");
  if (!(p.base_score > 0.0) || !(p.base_score < 1.0))
    throw config_error("base_score must be inside (0, 1)");
}

double Tree::value(const std::vector<double>& row) const {
  const TreeNode* node = &nodes[0];
  while (node->feature >= 0) {
    double v = row[static_cast<std::size_t>(node->feature)];
    bool left = std::isnan(v) ? node->default_left : v < node->threshold;
    node = &nodes[static_cast<std::size_t>(left ? node->left : node->right)];
  }
  return node->leaf_value;
}

std::string schema_hash(const std::vector<std::string>& columns) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](unsigned char c) {
    hash ^= c;
    hash *= 1099511628211ull;
  };
  for (const std::string& name : columns) {
    for (char c : name) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

Model train(const std::vector<std::vector<double>>& rows,
            const std::vector<int>& labels,
            const std::vector<std::string>& columns, const TrainParams& params,
            const std::vector<std::vector<double>>* eval_rows,
            const std::vector<int>* eval_labels) {
  validate_params(params);
  if (columns.empty()) throw data_error("train: no feature columns");
  validate_data(rows, labels, columns.size(), "train");
  const bool with_eval = eval_rows != nullptr;
  if (with_eval) {
    if (eval_labels == nullptr) throw data_error("train: eval labels missing");
    validate_data(*eval_rows, *eval_labels, columns.size(), "eval");
  }

  const std::size_t n = rows.size();
  const std::size_t n_features = columns.size();

  std::vector<std::vector<double>> cols(n_features, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < n_features; ++f) cols[f][i] = rows[i][f];

  std::vector<std::vector<std::uint32_t>> order(n_features);
  std::vector<std::vector<std::uint32_t>> missing(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(cols[f][i]))
        missing[f].push_back(static_cast<std::uint32_t>(i));
      else
        order[f].push_back(static_cast<std::uint32_t>(i));
    }
    const std::vector<double>& col = cols[f];
    std::sort(order[f].begin(), order[f].end(),
              [&col](std::uint32_t a, std::uint32_t b) {
                return col[a] != col[b] ? col[a] < col[b] : a < b;
              });
  }

  Model model;
  model.params = params;
  model.columns = columns;
  model.schema_hash = schema_hash(columns);
  model.base_margin =
      std::log(params.base_score / (1.0 - params.base_score));

  std::vector<double> margins(n, model.base_margin);
  std::vector<double> eval_margins;
  if (with_eval) eval_margins.assign(eval_rows->size(), model.base_margin);

  std::vector<fixed_t> g(n), h(n);
  std::vector<int> node_of(n, 0);
  TreeGrower grower(cols, order, missing, params);

  for (int round = 1; round <= params.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margins[i]);
      double gi = p - static_cast<double>(labels[i]);
      double hi = p * (1.0 - p);
      if (labels[i] == 1) {
        gi *= params.scale_pos_weight;
        hi *= params.scale_pos_weight;
      }
      g[i] = to_fixed(gi);
      h[i] = to_fixed(hi);
    }

    Tree tree = grower.grow(g, h, node_of);
    for (std::size_t i = 0; i < n; ++i)
      margins[i] +=
          params.eta * tree.nodes[static_cast<std::size_t>(node_of[i])].leaf_value;

    EvalRecord rec;
    rec.round = round;
    rec.train_logloss = logloss_from_margins(labels, margins);
    if (with_eval) {
      for (std::size_t i = 0; i < eval_margins.size(); ++i)
        eval_margins[i] += params.eta * tree.value((*eval_rows)[i]);
      rec.eval_logloss = logloss_from_margins(*eval_labels, eval_margins);
    } else {
      rec.eval_logloss = std::numeric_limits<double>::quiet_NaN();
    }
    model.history.push_back(rec);
    model.trees.push_back(std::move(tree));
  }

  if (with_eval) {
    int best = 1;
    for (const EvalRecord& rec : model.history)
      if (rec.eval_logloss < model.history[static_cast<std::size_t>(best - 1)]
                                 .eval_logloss)
        best = rec.round;
    model.best_round = best;
  }
  return model;
}

std::vector<double> predict_proba(const Model& model,
                                  const std::vector<std::vector<double>>& rows,
                                  const std::vector<std::string>& columns) {
  if (columns != model.columns ||
      schema_hash(columns) != model.schema_hash)
    throw data_error("predict: feature schema does not match the model");
  std::size_t n_trees = model.trees.size();
  if (model.best_round > 0 &&
      static_cast<std::size_t>(model.best_round) < n_trees)
    n_trees = static_cast<std::size_t>(model.best_round);

  std::vector<double> out;
  out.reserve(rows.size());
  for (const std::vector<double>& row : rows) {
    if (row.size() != model.columns.size())
      throw data_error("predict: row has wrong width");
    double margin = model.base_margin;
    for (std::size_t t = 0; t < n_trees; ++t)
      margin += model.params.eta * model.trees[t].value(row);
    out.push_back(sigmoid(margin));
  }
  return out;
}

double logloss(const std::vector<int>& labels,
               const std::vector<double>& probs) {
  if (labels.empty() || labels.size() != probs.size())
    throw data_error("logloss: bad input sizes");
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::isnan(probs[i])) throw data_error("logloss: NaN probability");
    double p = clamp_prob(probs[i]);
    sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(labels.size());
}

double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  if (labels.empty() || labels.size() != scores.size())
    throw data_error("auc: bad input sizes");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += static_cast<std::size_t>(y == 1);
  std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw data_error("auc: needs both classes present");

  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]] == 1) rank_sum += avg_rank;
    i = j;
  }
  double np = static_cast<double>(n_pos);
  double nn = static_cast<double>(n_neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::string serialize(const Model& model) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["kind"] = "gbdt-logistic";
  nlohmann::json params;
  params["eta"] = model.params.eta;
  params["n_estimators"] = model.params.n_estimators;
  params["max_depth"] = model.params.max_depth;
  params["scale_pos_weight"] = model.params.scale_pos_weight;
  params["seed"] = model.params.seed;
  params["reg_lambda"] = model.params.reg_lambda;
  params["gamma"] = model.params.gamma;
  params["min_child_weight"] = model.params.min_child_weight;
  params["base_score"] = model.params.base_score;
  doc["params"] = std::move(params);
  doc["columns"] = model.columns;
  doc["schema_hash"] = model.schema_hash;
  doc["base_margin"] = model.base_margin;
  doc["best_round"] = model.best_round;

  nlohmann::json history = nlohmann::json::array();
  for (const EvalRecord& rec : model.history) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(rec.round);
    row.push_back(rec.train_logloss);
    if (std::isnan(rec.eval_logloss))
      row.push_back(nullptr);
    else
      row.push_back(rec.eval_logloss);
    history.push_back(std::move(row));
  }
  doc["history"] = std::move(history);

  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
      nlohmann::json row = nlohmann::json::array();
      row.push_back(node.feature);
      row.push_back(node.threshold);
      row.push_back(node.default_left);
      row.push_back(node.left);
      row.push_back(node.right);
      row.push_back(node.leaf_value);
      nodes.push_back(std::move(row));
    }
    trees.push_back(nlohmann::json{{"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

Model deserialize(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("model document: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1)
      throw data_error("model document: unsupported format_version");
    if (doc.at("kind").get<std::string>() != "gbdt-logistic")
      throw data_error("model document: unsupported kind");
    Model model;
    const nlohmann::json& params = doc.at("params");
    model.params.eta = params.at("eta").get<double>();
    model.params.n_estimators = params.at("n_estimators").get<int>();
    model.params.max_depth = params.at("max_depth").get<int>();
    model.params.scale_pos_weight = params.at("scale_pos_weight").get<double>();
    model.params.seed = params.at("seed").get<std::uint64_t>();
    model.params.reg_lambda = params.at("reg_lambda").get<double>();
    model.params.gamma = params.at("gamma").get<double>();
    model.params.min_child_weight = params.at("min_child_weight").get<double>();
    model.params.base_score = params.at("base_score").get<double>();
    model.columns = doc.at("columns").get<std::vector<std::string>>();
    model.schema_hash = doc.at("schema_hash").get<std::string>();
    if (model.schema_hash != schema_hash(model.columns))
      throw data_error("model document: schema hash mismatch");
    model.base_margin = doc.at("base_margin").get<double>();
    model.best_round = doc.at("best_round").get<int>();
    for (const nlohmann::json& row : doc.at("history")) {
      EvalRecord rec;
      rec.round = row.at(0).get<int>();
      rec.train_logloss = row.at(1).get<double>();
      rec.eval_logloss = row.at(2).is_null()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : row.at(2).get<double>();
      model.history.push_back(rec);
    }
    for (const nlohmann::json& tree_doc : doc.at("trees")) {
      Tree tree;
      for (const nlohmann::json& row : tree_doc.at("nodes")) {
        TreeNode node;
        node.feature = row.at(0).get<int>();
        node.threshold = row.at(1).get<double>();
        node.default_left = row.at(2).get<bool>();
        node.left = row.at(3).get<int>();
        node.right = row.at(4).get<int>();
        node.leaf_value = row.at(5).get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) throw data_error("model document: empty tree");
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("model document: ") + e.what());
  }
}

std::string history_csv(const Model& model, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "round,train_logloss,eval_logloss\n";
  for (const EvalRecord& rec : model.history) {
    out += std::to_string(rec.round);
    out += ',';
    format_double(out, rec.train_logloss);
    out += ',';
    if (!std::isnan(rec.eval_logloss)) format_double(out, rec.eval_logloss);
    out += '\n';
  }
  return out;
}

}  // namespace tweetalpha::gbdt
