#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

namespace tweetalpha::testing {

namespace {

using fixed_t = long long;
using acc_t = __int128;

fixed_t to_fixed(double v) { return llround(std::ldexp(v, 52)); }
double to_real(acc_t v) { return std::ldexp(static_cast<double>(v), -52); }

double score_term(acc_t g, acc_t h, double lambda) {
  double gr = to_real(g), hr = to_real(h);
  double denom = hr + lambda;
  if (!(denom > 0.0)) return 0.0;
  return gr * gr / denom;
}

struct Candidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
  std::vector<std::size_t> left_rows, right_rows;
};

struct Builder {
  const std::vector<std::vector<double>>& rows;
  std::vector<fixed_t> g, h;
  const gbdt::TrainParams& params;
  OracleTree tree;

  int build(const std::vector<std::size_t>& idx, int depth) {
    acc_t gt = 0, ht = 0;
    for (std::size_t i : idx) {
      gt += g[i];
      ht += h[i];
    }

    Candidate best;
    if (!idx.empty() && depth < params.max_depth)
      best = best_split(idx, gt, ht);

    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (!best.found) {
      double denom = to_real(ht) + params.reg_lambda;
      tree.nodes[id].leaf_value =
          denom > 0.0 ? -to_real(gt) / denom : 0.0;
      return id;
    }
    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = best.threshold;
    tree.nodes[id].default_left = best.default_left;
    int left = build(best.left_rows, depth + 1);
    int right = build(best.right_rows, depth + 1);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
  }

  Candidate best_split(const std::vector<std::size_t>& idx, acc_t gt,
                       acc_t ht) {
    const double lambda = params.reg_lambda;
    const double parent = score_term(gt, ht, lambda);
    Candidate best;
    double best_gain = 0.0;

    std::size_t n_features = rows[idx[0]].size();
    for (std::size_t f = 0; f < n_features; ++f) {
      std::vector<std::pair<double, std::size_t>> present;
      std::vector<std::size_t> missing;
      acc_t gm = 0, hm = 0;
      for (std::size_t i : idx) {
        double v = rows[i][f];
        if (std::isnan(v)) {
          missing.push_back(i);
          gm += g[i];
          hm += h[i];
        } else {
          present.emplace_back(v, i);
        }
      }
      std::sort(present.begin(), present.end());

      acc_t gl = 0, hl = 0;
      for (std::size_t k = 1; k < present.size(); ++k) {
        gl += g[present[k - 1].second];
        hl += h[present[k - 1].second];
        double lo = present[k - 1].first, hi = present[k].first;
        if (lo == hi) continue;
        double thr = std::midpoint(lo, hi);
        if (!(thr > lo)) thr = hi;

        for (int variant = 0; variant < 2; ++variant) {
          bool missing_left = variant == 0;
          acc_t gl_eff = missing_left ? gl + gm : gl;
          acc_t hl_eff = missing_left ? hl + hm : hl;
          acc_t gr_eff = gt - gl_eff;
          acc_t hr_eff = ht - hl_eff;
          double hl_real = to_real(hl_eff), hr_real = to_real(hr_eff);
          if (hl_real < params.min_child_weight ||
              hr_real < params.min_child_weight)
            continue;
          if (!(hl_real + lambda > 0.0) || !(hr_real + lambda > 0.0)) continue;
          double gain = 0.5 * (score_term(gl_eff, hl_eff, lambda) +
                               score_term(gr_eff, hr_eff, lambda) - parent) -
                        params.gamma;
          if (gain > best_gain) {
            best_gain = gain;
            best.found = true;
            best.feature = static_cast<int>(f);
            best.threshold = thr;
            best.default_left = missing_left;
          }
        }
      }
    }

    if (best.found) {
      for (std::size_t i : idx) {
        double v = rows[i][static_cast<std::size_t>(best.feature)];
        bool left = std::isnan(v) ? best.default_left : v < best.threshold;
        (left ? best.left_rows : best.right_rows).push_back(i);
      }
    }
    return best;
  }
};

bool nodes_match(const gbdt::Tree& tree, int ti, const OracleTree& oracle,
                 int oi, double tol) {
  const gbdt::TreeNode& a = tree.nodes[static_cast<std::size_t>(ti)];
  const OracleNode& b = oracle.nodes[static_cast<std::size_t>(oi)];
  if ((a.feature < 0) != (b.feature < 0)) return false;
  if (a.feature < 0) return std::abs(a.leaf_value - b.leaf_value) <= tol;
  if (a.feature != b.feature) return false;
  if (std::abs(a.threshold - b.threshold) > tol) return false;
  if (a.default_left != b.default_left) return false;
  return nodes_match(tree, a.left, oracle, b.left, tol) &&
         nodes_match(tree, a.right, oracle, b.right, tol);
}

}  // namespace

OracleTree oracle_first_tree(const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& labels,
                             const gbdt::TrainParams& params) {
  double p = params.base_score;
  Builder builder{rows, {}, {}, params, {}};
  builder.g.resize(rows.size());
  builder.h.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double w = labels[i] == 1 ? params.scale_pos_weight : 1.0;
    builder.g[i] = to_fixed((p - labels[i]) * w);
    builder.h[i] = to_fixed(p * (1.0 - p) * w);
  }
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  builder.build(idx, 0);
  return builder.tree;
}

bool trees_match(const gbdt::Tree& tree, const OracleTree& oracle,
                 double tol) {
  if (tree.nodes.empty() || oracle.nodes.empty()) return false;
  if (tree.nodes.size() != oracle.nodes.size()) return false;
  return nodes_match(tree, 0, oracle, 0, tol);
}

double pairwise_auc(const std::vector<int>& labels,
                    const std::vector<double>& scores) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] == 1) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace tweetalpha::testing
