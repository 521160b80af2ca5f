#pragma once

#include <cstdint>
#include <string>

#include "tweetalpha/bars.hpp"
#include "tweetalpha/features.hpp"

namespace tweetalpha::testing {

/// Shape of the synthetic market used by the end-to-end tests.
struct PlantedSpec {
  int n_days = 80;            // consecutive weekdays from 2021-03-01
  int bars_per_day = 75;
  int session_start_sec = 10 * 3600;
  int bar_width_sec = 300;
  double agreement = 0.60;    // P(window sentiment sign == next-bar direction)
  int tz_offset_hours = -3;
  std::uint64_t seed = 97531;
};

struct PlantedData {
  PlantedSpec spec;
  std::string bars_tsv;      // parseable with bar_format below
  std::string tweets_jsonl;
  std::string lexicon_tsv;   // signed word weights the tweets draw from
  bars::BarFormatConfig bar_format;
};

/// Deterministic market-with-a-signal generator. Bar-to-bar moves are +-0.05
/// coin flips reflected inside a [45, 55] price guard; every bar window gets
/// a few short Portuguese tweets whose signal words carry the sign of the
/// NEXT bar's move with probability spec.agreement. Everything derives from
/// spec.seed, so two calls with the same spec produce identical bytes.
PlantedData make_planted(const PlantedSpec& spec = {});

/// Config document wiring the pipeline to the planted files (paths written
/// verbatim; pass absolute paths). One signed-sum scorer, lags {1,2},
/// 60 rounds of depth-3 boosting, rolling train window of `train_days`.
std::string planted_config_json(const PlantedData& data,
                                const std::string& bars_path,
                                const std::string& tweets_path,
                                const std::string& lexicon_path,
                                const std::string& artifacts_dir,
                                int train_days = 20);

/// In-memory featurization of the planted data along the same path the
/// pipeline takes: parse -> dedup -> clean -> filter -> score -> assemble.
features::AssembleResult planted_matrix(const PlantedData& data);

}  // namespace tweetalpha::testing
