#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tweetalpha/backtest.hpp"
#include "tweetalpha/bars.hpp"
#include "tweetalpha/corpus.hpp"
#include "tweetalpha/features.hpp"
#include "tweetalpha/gbdt.hpp"
#include "tweetalpha/sentiment.hpp"

namespace tweetalpha::config {

/// One scorer entry from the config file. Lexicon/term-set paths are resolved
/// against the config file's directory at load time.
struct ScorerConfig {
  std::string id;
  std::string kind;  // emoticon | mean_valence | signed_sum | polarity_count
                     // | mood | hashtag | heuristic
  sentiment::Stage stage = sentiment::Stage::post_strip;
  std::string lexicon;                 // emoticon (optional), mean_valence,
                                       // signed_sum, hashtag, heuristic
  std::string positive, negative;      // polarity_count term sets
  struct MoodCategoryConfig {
    std::string name;
    int sign = 0;
    std::string path;
  };
  std::vector<MoodCategoryConfig> categories;  // mood
  bool has_band = false;
  double band_lo = 0.0, band_hi = 0.0;  // mean_valence neutral band override
  bool has_scale = false;
  double scale_min = 0.0, scale_max = 0.0;  // mean_valence scale override
  std::vector<std::string> negations;      // heuristic overrides (optional)
  std::vector<std::string> intensifiers;
  bool custom_negations = false;
  bool custom_intensifiers = false;
};

struct WalkForwardConfig {
  int train_days = 200;
  int val_days = 1;
  int test_days = 1;
  std::string selection = "logloss";  // or "auc"
};

struct RunConfig {
  std::string bars_path;
  bars::BarFormatConfig bar_format;
  std::string tweets_path;
  corpus::TweetFormatConfig tweet_format;
  corpus::CleaningConfig cleaning;
  std::vector<ScorerConfig> scorers;
  features::FeatureConfig features;
  features::LagSpec lags;
  gbdt::TrainParams train;
  WalkForwardConfig walk_forward;
  backtest::BacktestConfig backtest;
  std::string artifacts_dir = "out";
  /// FNV-1a over the canonical (sorted-key) JSON dump of the config document;
  /// stamped into every artifact so stages can refuse mismatched inputs.
  std::string config_hash;
};

/// Parses and validates a config document. Unknown keys are rejected. Paths
/// stay relative to base_dir until resolved by the callers below.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir);

/// parse_config over a file, base_dir = the file's directory.
RunConfig load_config(const std::string& path);

/// Canonical JSON for a config (sorted keys, defaults filled in). Hashing
/// this equals the stored config_hash.
std::string canonical_json(const RunConfig& config);

std::string hash_canonical_json(const std::string& canonical);

/// Loads every lexicon/term set and builds the scorer registry. Throws
/// Error(config) for structural problems, Error(data) for unreadable or
/// malformed lexicon files.
sentiment::ScorerRegistry build_registry(const RunConfig& config);

/// Built-in tables used when a scorer entry omits its own.
const std::vector<std::pair<std::string, int>>& default_emoticons();
const std::vector<std::string>& default_negations();
const std::vector<std::string>& default_intensifiers();

}  // namespace tweetalpha::config
