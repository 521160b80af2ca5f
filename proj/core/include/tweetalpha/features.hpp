#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tweetalpha/bars.hpp"
#include "tweetalpha/corpus.hpp"
#include "tweetalpha/sentiment.hpp"
#include "tweetalpha/time.hpp"

namespace tweetalpha::features {

struct ScoredTweet {
  corpus::CleanTweet tweet;
  sentiment::SentimentVector sentiment;
};

/// Which per-tweet fields get the seven window statistics. Scorer outputs are
/// added automatically from the registry (score and/or polarity per scorer).
struct FeatureConfig {
  std::vector<std::string> numeric_attrs = {
      "like",           "quote",          "reply",       "retweet",
      "user_followers", "user_following", "user_tweets", "user_listed",
      "hour",           "word_count",     "text_length"};
  bool emit_scores = true;
  bool emit_polarities = true;
};

struct LagSpec {
  std::vector<int> lags = {1, 2, 3, 4};
};

/// Feature rows keyed by window start; NaN marks a missing value.
struct WindowTable {
  std::vector<std::string> columns;
  std::vector<Instant> windows;
  std::vector<std::vector<double>> rows;
};

struct FeatureMatrix {
  std::vector<std::string> columns;  // feature columns; label kept separately
  std::vector<Instant> windows;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // 1 iff next-window close > this close

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

struct ColumnInfo {
  std::string name;
  std::string kind;  // bar | tweet_count | stat | lag | label
  std::string attr;  // source attribute for stat/lag columns
  std::string stat;  // mean | std | min | max | sum | var | count
  int lag = 0;
};

struct AssembleResult {
  FeatureMatrix matrix;
  std::vector<ColumnInfo> schema;  // includes the label column, last
  std::size_t rows_dropped_for_lags = 0;
  std::size_t rows_dropped_unlabeled = 0;
};

/// Groups tweets into bar windows by local time; arrival order is preserved
/// inside each group.
std::map<Instant, std::vector<const ScoredTweet*>> bucket_tweets(
    const std::vector<ScoredTweet>& tweets, int bar_width_sec);

struct Aggregates {
  double mean = 0, std_dev = 0, min = 0, max = 0, sum = 0, var = 0;
  std::size_t count = 0;
};

/// Population statistics (variance over n); a singleton window yields
/// std = var = 0. count == 0 leaves the numeric fields unspecified.
Aggregates aggregate_values(const std::vector<double>& values);

/// Bar-driven base table: one row per bar, columns = 6 bar fields,
/// tweet_count, then 7 stats per attribute (scorer outputs first in registry
/// order, then numeric_attrs). Windows with a bar and no tweets keep their
/// row with NaN stats and zero counts.
WindowTable build_base_table(const std::vector<ScoredTweet>& tweets,
                             const bars::BarSeries& series,
                             const sentiment::ScorerRegistry& registry,
                             const FeatureConfig& config);

/// Adds col_lag_k columns for every existing column. Lag k at window t reads
/// the row at grid slot t - k*width of the same session; a slot with no row
/// is a missing value. Rows whose session-grid position is below max(lags)
/// are dropped (their lags would cross the day boundary).
WindowTable add_lags(const WindowTable& table, const LagSpec& spec,
                     int session_start_sec, int bar_width_sec,
                     std::size_t* dropped = nullptr);

/// Labels each row by comparing exact decimal closes of this window and the
/// next; rows with no next-window bar (always the session's last) are
/// dropped.
FeatureMatrix attach_label(const WindowTable& table, const bars::BarSeries& series,
                           std::size_t* dropped = nullptr);

/// Full pipeline: base table, lags, labels, schema manifest.
AssembleResult assemble(const std::vector<ScoredTweet>& tweets,
                        const bars::BarSeries& series,
                        const sentiment::ScorerRegistry& registry,
                        const FeatureConfig& config, const LagSpec& lag_spec);

/// Matrix artifact: CSV with a "window" key column, shortest round-trip
/// float formatting, empty fields for NaN. `comment` (e.g. a config-hash
/// line) is written first when non-empty and skipped by the reader.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix,
                      const std::string& comment = "");
FeatureMatrix read_matrix_csv(std::istream& in);

struct ScorerPolarityCounts {
  std::string scorer_id;
  std::size_t negative = 0, neutral = 0, positive = 0;
};

struct ColumnCorrelation {
  std::string column;
  double value = 0.0;
  bool defined = false;  // false for constant or all-missing columns
};

struct ExploratoryReport {
  std::size_t rows = 0;
  std::size_t label_up = 0;
  std::size_t label_down = 0;
  double up_fraction = 0.0;    // label_up / rows
  double down_fraction = 0.0;
  std::vector<ScorerPolarityCounts> polarity_distribution;
  std::vector<ColumnCorrelation> label_correlations;

  /// "up 56.5% / down 43.5%" style summary with one decimal per fraction.
  std::string to_text() const;
};

/// Class balance and correlations come from the matrix; polarity
/// distributions come from the scored tweets (they are not recoverable from
/// aggregated columns).
ExploratoryReport exploratory_report(const FeatureMatrix& matrix,
                                     const std::vector<ScoredTweet>& tweets,
                                     const sentiment::ScorerRegistry& registry);

}  // namespace tweetalpha::features
