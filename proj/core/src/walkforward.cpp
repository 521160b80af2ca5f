#include "tweetalpha/walkforward.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "tweetalpha/dsv.hpp"
#include "tweetalpha/error.hpp"

namespace tweetalpha::walkforward {
namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

struct ClassStats {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

ClassStats class_stats(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassStats s;
  std::size_t predicted = tp + fp;
  std::size_t actual = tp + fn;
  s.precision =
      predicted == 0 ? 0.0
                     : static_cast<double>(tp) / static_cast<double>(predicted);
  s.recall =
      actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
  double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

}  // namespace

std::vector<FoldSpec> make_folds(const std::vector<std::int64_t>& trading_days,
                                 int train_n, int val_n, int test_n) {
  if (train_n < 1) throw config_error("walk-forward: train_n must be >= 1");
  if (val_n != 1 || test_n != 1)
    throw config_error("walk-forward: only val_n=1, test_n=1 is supported");
  for (std::size_t i = 1; i < trading_days.size(); ++i)
    if (trading_days[i] <= trading_days[i - 1])
      throw data_error("walk-forward: trading days must be ascending");

  std::vector<FoldSpec> folds;
  const std::size_t need = static_cast<std::size_t>(train_n) + 2;
  if (trading_days.size() < need) return folds;
  for (std::size_t t = need - 1; t < trading_days.size(); ++t) {
    FoldSpec fold;
    fold.train_days.assign(
        trading_days.begin() + static_cast<std::ptrdiff_t>(t + 1 - need),
        trading_days.begin() + static_cast<std::ptrdiff_t>(t - 1));
    fold.val_day = trading_days[t - 1];
    fold.test_day = trading_days[t];
    folds.push_back(std::move(fold));
  }
  return folds;
}

namespace {

/// Replays the stage-1 model round by round over the validation rows and
/// returns the round with the highest AUC (earliest on ties). Margins are
/// monotone in probability, so they rank identically. Single-class
/// validation days have no AUC; the caller's fallback wins.
int best_round_by_auc(const gbdt::Model& model,
                      const std::vector<std::vector<double>>& rows,
                      const std::vector<int>& labels, int fallback) {
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg || model.trees.empty()) return fallback;

  std::vector<double> margins(rows.size(), model.base_margin);
  int best = 1;
  double best_auc = -1.0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      margins[i] += model.params.eta * model.trees[t].value(rows[i]);
    double a = gbdt::auc(labels, margins);
    if (a > best_auc) {
      best_auc = a;
      best = static_cast<int>(t) + 1;
    }
  }
  return best;
}

}  // namespace

RunResult run(const features::FeatureMatrix& matrix,
              const std::vector<FoldSpec>& folds,
              const gbdt::TrainParams& params, std::int64_t bar_width_sec,
              Selection selection) {
  if (matrix.rows.size() != matrix.windows.size() ||
      matrix.rows.size() != matrix.labels.size())
    throw data_error("walk-forward: inconsistent feature matrix");
  if (bar_width_sec <= 0)
    throw config_error("walk-forward: bar width must be positive");

  std::map<std::int64_t, std::vector<std::size_t>> by_day;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i)
    by_day[day_key(matrix.windows[i])].push_back(i);

  RunResult result;
  for (const FoldSpec& fold : folds) {
    std::vector<std::size_t> train_idx;
    for (std::int64_t day : fold.train_days) {
      auto it = by_day.find(day);
      if (it != by_day.end())
        train_idx.insert(train_idx.end(), it->second.begin(), it->second.end());
    }
    auto val_it = by_day.find(fold.val_day);
    auto test_it = by_day.find(fold.test_day);

    std::string why;
    if (train_idx.empty())
      why = "no training rows";
    else if (val_it == by_day.end() || val_it->second.empty())
      why = "no validation rows";
    else if (test_it == by_day.end() || test_it->second.empty())
      why = "no test rows";
    if (!why.empty()) {
      result.notices.push_back(
          "fold for " + format_date(start_of_day_key(fold.test_day)) +
          " skipped: " + why);
      ++result.folds_skipped;
      continue;
    }

    auto gather = [&matrix](const std::vector<std::size_t>& idx,
                            std::vector<std::vector<double>>& rows,
                            std::vector<int>& labels) {
      rows.clear();
      labels.clear();
      rows.reserve(idx.size());
      labels.reserve(idx.size());
      for (std::size_t i : idx) {
        rows.push_back(matrix.rows[i]);
        labels.push_back(matrix.labels[i]);
      }
    };

    std::vector<std::vector<double>> train_rows, val_rows, test_rows;
    std::vector<int> train_labels, val_labels, test_labels;
    gather(train_idx, train_rows, train_labels);
    gather(val_it->second, val_rows, val_labels);
    gather(test_it->second, test_rows, test_labels);

    gbdt::Model stage1 = gbdt::train(train_rows, train_labels, matrix.columns,
                                     params, &val_rows, &val_labels);
    int chosen_round = stage1.best_round;
    if (selection == Selection::auc)
      chosen_round =
          best_round_by_auc(stage1, val_rows, val_labels, chosen_round);

    std::vector<std::size_t> refit_idx = train_idx;
    refit_idx.insert(refit_idx.end(), val_it->second.begin(),
                     val_it->second.end());
    std::sort(refit_idx.begin(), refit_idx.end());
    std::vector<std::vector<double>> refit_rows;
    std::vector<int> refit_labels;
    gather(refit_idx, refit_rows, refit_labels);

    gbdt::TrainParams refit_params = params;
    refit_params.n_estimators = chosen_round;
    gbdt::Model stage2 =
        gbdt::train(refit_rows, refit_labels, matrix.columns, refit_params);

    std::vector<double> probs =
        gbdt::predict_proba(stage2, test_rows, matrix.columns);
    for (std::size_t k = 0; k < probs.size(); ++k) {
      LedgerRow row;
      row.window = matrix.windows[test_it->second[k]] + bar_width_sec;
      row.probability = probs[k];
      row.prediction = probs[k] >= 0.5 ? 1 : 0;
      row.label = test_labels[k];
      result.ledger.push_back(row);
    }
    result.best_rounds.push_back(chosen_round);
    result.fold_test_days.push_back(fold.test_day);
    ++result.folds_run;
  }
  return result;
}

Metrics compute_metrics(const std::vector<LedgerRow>& rows) {
  if (rows.empty()) throw data_error("metrics: empty prediction ledger");
  Metrics m;
  m.n = rows.size();
  std::vector<int> labels;
  std::vector<double> probs;
  labels.reserve(rows.size());
  probs.reserve(rows.size());
  for (const LedgerRow& row : rows) {
    labels.push_back(row.label);
    probs.push_back(row.probability);
    if (row.prediction == 1)
      row.label == 1 ? ++m.tp : ++m.fp;
    else
      row.label == 0 ? ++m.tn : ++m.fn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.n);

  ClassStats pos = class_stats(m.tp, m.fp, m.fn);
  ClassStats neg = class_stats(m.tn, m.fn, m.fp);
  m.precision_pos = pos.precision;
  m.recall_pos = pos.recall;
  m.f1_pos = pos.f1;
  m.precision_neg = neg.precision;
  m.recall_neg = neg.recall;
  m.f1_neg = neg.f1;
  m.macro_precision = (pos.precision + neg.precision) / 2.0;
  m.macro_recall = (pos.recall + neg.recall) / 2.0;
  m.macro_f1 = (pos.f1 + neg.f1) / 2.0;

  try {
    m.auc = gbdt::auc(labels, probs);
  } catch (const Error&) {
    m.auc = std::numeric_limits<double>::quiet_NaN();
  }
  m.logloss = gbdt::logloss(labels, probs);
  return m;
}

std::string ledger_csv(const std::vector<LedgerRow>& rows,
                       const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "window,probability,prediction,label\n";
  for (const LedgerRow& row : rows) {
    out += format_datetime(row.window);
    out += ',';
    append_double(out, row.probability);
    out += ',';
    out += std::to_string(row.prediction);
    out += ',';
    out += std::to_string(row.label);
    out += '\n';
  }
  return out;
}

std::vector<LedgerRow> parse_ledger_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<LedgerRow> rows;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "window,probability,prediction,label")
        throw data_error("prediction ledger: unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields = split_dsv(line, ',');
    if (fields.size() != 4)
      throw data_error("prediction ledger line " + std::to_string(line_no) +
                       ": expected 4 fields");
    try {
      LedgerRow row;
      if (fields[0].size() != 19 || fields[0][10] != ' ')
        throw data_error("bad window timestamp");
      row.window = parse_timestamp_utc(fields[0]);
      row.probability = parse_double(fields[1]);
      std::int64_t pred = parse_int64(fields[2]);
      std::int64_t label = parse_int64(fields[3]);
      if ((pred != 0 && pred != 1) || (label != 0 && label != 1))
        throw data_error("prediction and label must be 0 or 1");
      if (!(row.probability >= 0.0 && row.probability <= 1.0))
        throw data_error("probability out of [0, 1]");
      row.prediction = static_cast<int>(pred);
      row.label = static_cast<int>(label);
      rows.push_back(row);
    } catch (const Error& e) {
      throw data_error("prediction ledger line " + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
  if (!header_seen) throw data_error("prediction ledger: missing header");
  return rows;
}

}  // namespace tweetalpha::walkforward
