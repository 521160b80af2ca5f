#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tweetalpha/config.hpp"

namespace tweetalpha::pipeline {

/// What a stage wrote plus log-worthy notices. Artifact pairs are
/// (label, path).
struct StageResult {
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<std::string> messages;
};

/// Stage artifacts, all under config.artifacts_dir. Every stage stamps the
/// config hash into its summary document and refuses upstream artifacts
/// whose stamp differs (Error(data)).
///
///   ingest    -> bars.tsv, corpus.jsonl, ingest.json
///   featurize -> features.csv, schema.json, explore.txt, featurize.json
///   train     -> predictions.csv, folds.json, model.json, history.csv,
///                train.json
///   backtest  -> equity.csv, equity.svg, backtest.json
///   report    -> metrics.json, report.txt, report.json
StageResult run_ingest(const config::RunConfig& config);
StageResult run_featurize(const config::RunConfig& config);
StageResult run_train(const config::RunConfig& config);
StageResult run_backtest(const config::RunConfig& config);
StageResult run_report(const config::RunConfig& config);

}  // namespace tweetalpha::pipeline
