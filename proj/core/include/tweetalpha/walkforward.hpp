#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tweetalpha/features.hpp"
#include "tweetalpha/gbdt.hpp"
#include "tweetalpha/time.hpp"

namespace tweetalpha::walkforward {

/// One rolling fold: a block of training days, one validation day, one test
/// day, all consecutive trading days.
struct FoldSpec {
  std::vector<std::int64_t> train_days;  // day keys, ascending
  std::int64_t val_day = 0;
  std::int64_t test_day = 0;

  friend bool operator==(const FoldSpec&, const FoldSpec&) = default;
};

/// Builds one fold per eligible test day, rolling forward one day at a time.
/// trading_days must be ascending and unique. val_n and test_n only accept 1;
/// they are parameters so the call site documents the scheme.
std::vector<FoldSpec> make_folds(const std::vector<std::int64_t>& trading_days,
                                 int train_n, int val_n, int test_n);

struct LedgerRow {
  /// The bar the prediction is about: one bar after the feature row, since a
  /// row's label is the direction into the next bar. A backtest trades this
  /// bar; labeling guarantees it exists (unlabeled rows never reach a fold).
  Instant window;
  double probability = 0.0;
  int prediction = 0;  // probability >= 0.5
  int label = 0;

  friend bool operator==(const LedgerRow&, const LedgerRow&) = default;
};

struct RunResult {
  std::vector<LedgerRow> ledger;    // chronological over all executed folds
  std::vector<int> best_rounds;     // per executed fold
  std::vector<std::int64_t> fold_test_days;
  std::vector<std::string> notices;  // one line per skipped fold
  std::size_t folds_run = 0;
  std::size_t folds_skipped = 0;
};

/// How stage one picks the boosting-round count from the validation day.
enum class Selection { logloss, auc };

/// Two-stage fit per fold: stage one trains on the train days with the val
/// day as eval set to pick best_round; stage two retrains on train+val with
/// n_estimators = best_round and scores the test day. Folds whose train, val
/// or test day has no rows are skipped with a notice. Selection::auc picks
/// the round maximizing validation AUC (earliest on ties) and falls back to
/// the logloss choice when the validation day is single-class. Ledger windows
/// are feature-row windows advanced by bar_width_sec — the predicted bar.
RunResult run(const features::FeatureMatrix& matrix,
              const std::vector<FoldSpec>& folds,
              const gbdt::TrainParams& params, std::int64_t bar_width_sec,
              Selection selection = Selection::logloss);

struct Metrics {
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision_pos = 0.0, recall_pos = 0.0, f1_pos = 0.0;
  double precision_neg = 0.0, recall_neg = 0.0, f1_neg = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double auc = 0.0;      // NaN when only one label class appears
  double logloss = 0.0;
};

/// Precision of a class nobody predicted is 0; F1 is 0 when P+R is 0; macro
/// values average the two classes.
Metrics compute_metrics(const std::vector<LedgerRow>& rows);

/// "window,probability,prediction,label" CSV; optional leading "# comment".
std::string ledger_csv(const std::vector<LedgerRow>& rows,
                       const std::string& comment = "");
std::vector<LedgerRow> parse_ledger_csv(const std::string& text);

}  // namespace tweetalpha::walkforward
