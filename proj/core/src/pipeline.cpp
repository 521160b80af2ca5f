#include "tweetalpha/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tweetalpha/backtest.hpp"
#include "tweetalpha/error.hpp"
#include "tweetalpha/walkforward.hpp"

namespace tweetalpha::pipeline {
namespace {

using nlohmann::json;

std::string artifact_path(const config::RunConfig& cfg, const char* name) {
  return cfg.artifacts_dir + "/" + name;
}

void ensure_dir(const config::RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.artifacts_dir, ec);
  if (ec)
    throw runtime_error("cannot create artifacts directory " +
                             cfg.artifacts_dir + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw runtime_error("cannot write " + path);
  out << content;
  if (!out) throw runtime_error("short write to " + path);
}

/// Upstream stage summaries carry the config hash; a different hash means the
/// artifact tree mixes runs.
json check_upstream(const config::RunConfig& cfg, const char* name) {
  std::string path = artifact_path(cfg, name);
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
  std::string stamped = doc.value("config_hash", "");
  if (stamped != cfg.config_hash)
    throw data_error(path + ": config hash " + stamped +
                     " does not match the active config (" + cfg.config_hash +
                     "); re-run the earlier stages");
  return doc;
}

/// The bars artifact stores pipeline-local timestamps, so re-parsing must not
/// shift them again.
bars::BarFormatConfig artifact_bar_format(const config::RunConfig& cfg) {
  bars::BarFormatConfig fmt = cfg.bar_format;
  fmt.file_tz_offset_hours = fmt.local_tz_offset_hours;
  return fmt;
}

bars::BarSeries load_bar_artifact(const config::RunConfig& cfg) {
  std::string path = artifact_path(cfg, "bars.tsv");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path + "; run ingest first");
  return bars::parse_bars(in, artifact_bar_format(cfg)).series;
}

std::vector<features::ScoredTweet> load_scored_corpus(
    const config::RunConfig& cfg, const sentiment::ScorerRegistry& registry) {
  std::string path = artifact_path(cfg, "corpus.jsonl");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path + "; run ingest first");
  std::vector<corpus::CleanTweet> tweets = corpus::parse_corpus(in);
  std::vector<features::ScoredTweet> scored;
  scored.reserve(tweets.size());
  for (corpus::CleanTweet& tweet : tweets) {
    features::ScoredTweet st;
    st.sentiment = registry.score_all(tweet.source.text, tweet.clean_text);
    st.tweet = std::move(tweet);
    scored.push_back(std::move(st));
  }
  return scored;
}

features::FeatureMatrix load_matrix(const config::RunConfig& cfg) {
  std::string path = artifact_path(cfg, "features.csv");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path + "; run featurize first");
  return features::read_matrix_csv(in);
}

std::string hash_comment(const config::RunConfig& cfg) {
  return "config_hash=" + cfg.config_hash;
}

std::string format_day(std::int64_t day) {
  return format_date(start_of_day_key(day));
}

void append_double_field(json& obj, const char* key, double v) {
  obj[key] = v;  // NaN serializes as null
}

}  // namespace

StageResult run_ingest(const config::RunConfig& cfg) {
  ensure_dir(cfg);
  StageResult result;

  std::ifstream bars_in(cfg.bars_path, std::ios::binary);
  if (!bars_in) throw data_error("cannot open bars file " + cfg.bars_path);
  bars::BarParseResult parsed = bars::parse_bars(bars_in, cfg.bar_format);
  if (parsed.series.empty()) throw data_error("bars file has no session bars");

  std::ifstream tweets_in(cfg.tweets_path, std::ios::binary);
  if (!tweets_in)
    throw data_error("cannot open tweets file " + cfg.tweets_path);
  std::vector<corpus::RawTweet> raw =
      corpus::parse_tweets(tweets_in, cfg.tweet_format);
  std::size_t read_count = raw.size();
  raw = corpus::dedup(std::move(raw));
  std::size_t after_dedup = raw.size();
  std::vector<corpus::CleanTweet> cleaned = corpus::clean_all(raw, cfg.cleaning);
  cleaned = corpus::filter_short(std::move(cleaned), cfg.cleaning);

  {
    std::ofstream out(artifact_path(cfg, "bars.tsv"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw runtime_error("cannot write bars.tsv");
    bars::serialize_bars(out, parsed.series, artifact_bar_format(cfg));
  }
  {
    std::ofstream out(artifact_path(cfg, "corpus.jsonl"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw runtime_error("cannot write corpus.jsonl");
    corpus::serialize_corpus(out, cleaned);
  }

  json summary;
  summary["stage"] = "ingest";
  summary["config_hash"] = cfg.config_hash;
  summary["bars"] = {
      {"rows", parsed.series.size()},
      {"dropped_outside_session", parsed.dropped_outside_session},
      {"trading_days", parsed.series.trading_days().size()}};
  summary["tweets"] = {{"read", read_count},
                       {"after_dedup", after_dedup},
                       {"kept", cleaned.size()}};
  write_file(artifact_path(cfg, "ingest.json"), summary.dump(2) + "\n");

  result.artifacts = {{"bars", artifact_path(cfg, "bars.tsv")},
                      {"corpus", artifact_path(cfg, "corpus.jsonl")},
                      {"summary", artifact_path(cfg, "ingest.json")}};
  result.messages.push_back(
      "bars: " + std::to_string(parsed.series.size()) + " kept, " +
      std::to_string(parsed.dropped_outside_session) + " outside session");
  result.messages.push_back("tweets: " + std::to_string(cleaned.size()) +
                            " kept of " + std::to_string(read_count));
  return result;
}

StageResult run_featurize(const config::RunConfig& cfg) {
  ensure_dir(cfg);
  check_upstream(cfg, "ingest.json");

  bars::BarSeries series = load_bar_artifact(cfg);
  sentiment::ScorerRegistry registry = config::build_registry(cfg);
  std::vector<features::ScoredTweet> scored = load_scored_corpus(cfg, registry);

  features::AssembleResult assembled =
      features::assemble(scored, series, registry, cfg.features, cfg.lags);

  {
    std::ofstream out(artifact_path(cfg, "features.csv"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw runtime_error("cannot write features.csv");
    features::write_matrix_csv(out, assembled.matrix, hash_comment(cfg));
  }

  json schema;
  schema["config_hash"] = cfg.config_hash;
  schema["schema_hash"] = gbdt::schema_hash(assembled.matrix.columns);
  json columns = json::array();
  for (const features::ColumnInfo& info : assembled.schema) {
    json col;
    col["name"] = info.name;
    col["kind"] = info.kind;
    if (!info.attr.empty()) col["attr"] = info.attr;
    if (!info.stat.empty()) col["stat"] = info.stat;
    if (info.lag != 0) col["lag"] = info.lag;
    columns.push_back(std::move(col));
  }
  schema["columns"] = std::move(columns);
  write_file(artifact_path(cfg, "schema.json"), schema.dump(2) + "\n");

  features::ExploratoryReport report =
      features::exploratory_report(assembled.matrix, scored, registry);
  std::string explore = report.to_text() + "\n";
  for (const features::ScorerPolarityCounts& pc : report.polarity_distribution)
    explore += pc.scorer_id + " polarity: -" + std::to_string(pc.negative) +
               " / 0 " + std::to_string(pc.neutral) + " / +" +
               std::to_string(pc.positive) + "\n";
  explore += "label correlations:\n";
  for (const features::ColumnCorrelation& cc : report.label_correlations) {
    explore += "  " + cc.column + ": ";
    if (cc.defined) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.4f", cc.value);
      explore += buf;
    } else {
      explore += "undefined";
    }
    explore += "\n";
  }
  write_file(artifact_path(cfg, "explore.txt"), explore);

  json summary;
  summary["stage"] = "featurize";
  summary["config_hash"] = cfg.config_hash;
  summary["rows"] = assembled.matrix.rows.size();
  summary["columns"] = assembled.matrix.columns.size();
  summary["rows_dropped_for_lags"] = assembled.rows_dropped_for_lags;
  summary["rows_dropped_unlabeled"] = assembled.rows_dropped_unlabeled;
  summary["schema_hash"] = gbdt::schema_hash(assembled.matrix.columns);
  write_file(artifact_path(cfg, "featurize.json"), summary.dump(2) + "\n");

  StageResult result;
  result.artifacts = {{"features", artifact_path(cfg, "features.csv")},
                      {"schema", artifact_path(cfg, "schema.json")},
                      {"explore", artifact_path(cfg, "explore.txt")},
                      {"summary", artifact_path(cfg, "featurize.json")}};
  result.messages.push_back(
      std::to_string(assembled.matrix.rows.size()) + " rows x " +
      std::to_string(assembled.matrix.columns.size()) + " features");
  return result;
}

StageResult run_train(const config::RunConfig& cfg) {
  ensure_dir(cfg);
  check_upstream(cfg, "featurize.json");

  features::FeatureMatrix matrix = load_matrix(cfg);
  if (matrix.rows.empty()) throw data_error("feature matrix is empty");

  std::vector<std::int64_t> days;
  for (const Instant& w : matrix.windows) {
    std::int64_t d = day_key(w);
    if (days.empty() || days.back() != d) days.push_back(d);
  }
  std::vector<walkforward::FoldSpec> folds = walkforward::make_folds(
      days, cfg.walk_forward.train_days, cfg.walk_forward.val_days,
      cfg.walk_forward.test_days);
  if (folds.empty())
    throw data_error(
        "not enough trading days for walk-forward (need train_days + 2)");

  walkforward::Selection selection = cfg.walk_forward.selection == "auc"
                                         ? walkforward::Selection::auc
                                         : walkforward::Selection::logloss;
  walkforward::RunResult run = walkforward::run(
      matrix, folds, cfg.train, cfg.bar_format.bar_width_sec, selection);
  if (run.folds_run == 0)
    throw data_error("every walk-forward fold was skipped");

  write_file(artifact_path(cfg, "predictions.csv"),
             walkforward::ledger_csv(run.ledger, hash_comment(cfg)));

  json folds_doc;
  folds_doc["stage"] = "train";
  folds_doc["config_hash"] = cfg.config_hash;
  folds_doc["folds_planned"] = folds.size();
  folds_doc["folds_run"] = run.folds_run;
  folds_doc["folds_skipped"] = run.folds_skipped;
  folds_doc["notices"] = run.notices;
  json per_fold = json::array();
  for (std::size_t i = 0; i < run.best_rounds.size(); ++i)
    per_fold.push_back({{"test_day", format_day(run.fold_test_days[i])},
                        {"best_round", run.best_rounds[i]}});
  folds_doc["folds"] = std::move(per_fold);
  write_file(artifact_path(cfg, "folds.json"), folds_doc.dump(2) + "\n");

  // Deployment-style model over the whole matrix; the ledger itself comes
  // from the per-fold models above.
  gbdt::Model full =
      gbdt::train(matrix.rows, matrix.labels, matrix.columns, cfg.train);
  write_file(artifact_path(cfg, "model.json"), gbdt::serialize(full));
  write_file(artifact_path(cfg, "history.csv"),
             gbdt::history_csv(full, hash_comment(cfg)));

  json summary;
  summary["stage"] = "train";
  summary["config_hash"] = cfg.config_hash;
  summary["rows"] = matrix.rows.size();
  summary["folds_run"] = run.folds_run;
  summary["folds_skipped"] = run.folds_skipped;
  summary["ledger_rows"] = run.ledger.size();
  write_file(artifact_path(cfg, "train.json"), summary.dump(2) + "\n");

  StageResult result;
  result.artifacts = {{"predictions", artifact_path(cfg, "predictions.csv")},
                      {"folds", artifact_path(cfg, "folds.json")},
                      {"model", artifact_path(cfg, "model.json")},
                      {"history", artifact_path(cfg, "history.csv")},
                      {"summary", artifact_path(cfg, "train.json")}};
  result.messages.push_back(std::to_string(run.folds_run) + " folds run, " +
                            std::to_string(run.folds_skipped) + " skipped, " +
                            std::to_string(run.ledger.size()) +
                            " predictions");
  for (const std::string& notice : run.notices) result.messages.push_back(notice);
  return result;
}

StageResult run_backtest(const config::RunConfig& cfg) {
  ensure_dir(cfg);
  check_upstream(cfg, "ingest.json");
  check_upstream(cfg, "train.json");

  std::vector<walkforward::LedgerRow> ledger =
      walkforward::parse_ledger_csv(read_file(artifact_path(cfg, "predictions.csv")));
  bars::BarSeries series = load_bar_artifact(cfg);

  backtest::BacktestResult model =
      backtest::simulate(ledger, series, cfg.backtest);
  backtest::BaselineStats baselines =
      backtest::random_baselines(ledger, series, cfg.backtest);
  backtest::Comparison cmp = backtest::compare(model, baselines);
  std::vector<backtest::EquityPoint> equity =
      backtest::equity_curve(model, baselines);

  write_file(artifact_path(cfg, "equity.csv"),
             backtest::equity_csv(equity, hash_comment(cfg)));
  write_file(artifact_path(cfg, "equity.svg"),
             backtest::equity_svg(equity, hash_comment(cfg)));

  json doc;
  doc["stage"] = "backtest";
  doc["config_hash"] = cfg.config_hash;
  doc["lot_size"] = cfg.backtest.lot_size;
  doc["mode"] = cfg.backtest.mode == backtest::TradeMode::per_bar
                    ? "per_bar"
                    : "first_bar_of_day";
  doc["n_trades"] = cmp.n_trades;
  doc["trading_days"] = model.days.size();
  doc["model_total"] = cmp.model_total.to_string();
  doc["baseline_sum"] = cmp.baseline_sum.to_string();
  doc["baseline_mean"] = cmp.baseline_mean.to_string();
  doc["excess"] = cmp.excess.to_string();
  doc["excess_sign"] = cmp.excess_sign;
  doc["days_model_wins"] = cmp.days_model_wins;
  doc["days_model_loses"] = cmp.days_model_loses;
  doc["days_tied"] = cmp.days_tied;
  doc["model_mean_per_trade"] = cmp.model_mean_per_trade.to_string();
  doc["baseline_mean_per_trade"] = cmp.baseline_mean_per_trade.to_string();
  doc["n_baselines"] = cmp.n_baselines;
  doc["base_seed"] = cfg.backtest.base_seed;
  json totals = json::array();
  for (const Decimal& total : baselines.totals) totals.push_back(total.to_string());
  doc["baseline_totals"] = std::move(totals);
  write_file(artifact_path(cfg, "backtest.json"), doc.dump(2) + "\n");

  StageResult result;
  result.artifacts = {{"equity", artifact_path(cfg, "equity.csv")},
                      {"chart", artifact_path(cfg, "equity.svg")},
                      {"summary", artifact_path(cfg, "backtest.json")}};
  result.messages.push_back("model total " + cmp.model_total.to_string() +
                            ", baseline mean " + cmp.baseline_mean.to_string() +
                            ", excess " + cmp.excess.to_string());
  result.messages.push_back(
      "days won/lost/tied: " + std::to_string(cmp.days_model_wins) + "/" +
      std::to_string(cmp.days_model_loses) + "/" +
      std::to_string(cmp.days_tied));
  return result;
}

StageResult run_report(const config::RunConfig& cfg) {
  ensure_dir(cfg);
  check_upstream(cfg, "featurize.json");
  json folds_doc = check_upstream(cfg, "folds.json");
  json backtest_doc = check_upstream(cfg, "backtest.json");

  std::vector<walkforward::LedgerRow> ledger =
      walkforward::parse_ledger_csv(read_file(artifact_path(cfg, "predictions.csv")));
  walkforward::Metrics metrics = walkforward::compute_metrics(ledger);

  json mdoc;
  mdoc["config_hash"] = cfg.config_hash;
  mdoc["n"] = metrics.n;
  mdoc["confusion"] = {{"tp", metrics.tp},
                       {"fp", metrics.fp},
                       {"tn", metrics.tn},
                       {"fn", metrics.fn}};
  append_double_field(mdoc, "accuracy", metrics.accuracy);
  append_double_field(mdoc, "precision_pos", metrics.precision_pos);
  append_double_field(mdoc, "recall_pos", metrics.recall_pos);
  append_double_field(mdoc, "f1_pos", metrics.f1_pos);
  append_double_field(mdoc, "precision_neg", metrics.precision_neg);
  append_double_field(mdoc, "recall_neg", metrics.recall_neg);
  append_double_field(mdoc, "f1_neg", metrics.f1_neg);
  append_double_field(mdoc, "macro_precision", metrics.macro_precision);
  append_double_field(mdoc, "macro_recall", metrics.macro_recall);
  append_double_field(mdoc, "macro_f1", metrics.macro_f1);
  append_double_field(mdoc, "auc", metrics.auc);
  append_double_field(mdoc, "logloss", metrics.logloss);
  write_file(artifact_path(cfg, "metrics.json"), mdoc.dump(2) + "\n");

  auto fmt4 = [](double v) {
    if (std::isnan(v)) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };

  std::string text;
  text += "prediction windows: " + std::to_string(metrics.n) + "\n";
  text += "accuracy: " + fmt4(metrics.accuracy) + "\n";
  text += "macro precision/recall/F1: " + fmt4(metrics.macro_precision) + " / " +
          fmt4(metrics.macro_recall) + " / " + fmt4(metrics.macro_f1) + "\n";
  text += "AUC: " + fmt4(metrics.auc) + "  logloss: " + fmt4(metrics.logloss) +
          "\n";
  text += "confusion: tp=" + std::to_string(metrics.tp) +
          " fp=" + std::to_string(metrics.fp) +
          " tn=" + std::to_string(metrics.tn) +
          " fn=" + std::to_string(metrics.fn) + "\n";
  text += "folds: " + folds_doc.at("folds_run").dump() + " run, " +
          folds_doc.at("folds_skipped").dump() + " skipped\n";
  text += "trades: " + backtest_doc.at("n_trades").dump() + " over " +
          backtest_doc.at("trading_days").dump() + " days (lot " +
          backtest_doc.at("lot_size").dump() + ")\n";
  text += "model total: " + backtest_doc.at("model_total").get<std::string>() +
          "\n";
  text += "baseline mean: " +
          backtest_doc.at("baseline_mean").get<std::string>() + " over " +
          backtest_doc.at("n_baselines").dump() + " coin-flip baselines\n";
  text += "excess: " + backtest_doc.at("excess").get<std::string>() + "\n";
  text += "days won/lost/tied: " + backtest_doc.at("days_model_wins").dump() +
          "/" + backtest_doc.at("days_model_loses").dump() + "/" +
          backtest_doc.at("days_tied").dump() + "\n";
  write_file(artifact_path(cfg, "report.txt"), text);

  json combined;
  combined["config_hash"] = cfg.config_hash;
  combined["metrics"] = mdoc;
  backtest_doc.erase("stage");
  combined["backtest"] = backtest_doc;
  combined["folds"] = {{"run", folds_doc.at("folds_run")},
                       {"skipped", folds_doc.at("folds_skipped")},
                       {"notices", folds_doc.at("notices")}};
  write_file(artifact_path(cfg, "report.json"), combined.dump(2) + "\n");

  StageResult result;
  result.artifacts = {{"metrics", artifact_path(cfg, "metrics.json")},
                      {"text", artifact_path(cfg, "report.txt")},
                      {"report", artifact_path(cfg, "report.json")}};
  result.messages.push_back("accuracy " + fmt4(metrics.accuracy) +
                            ", macro F1 " + fmt4(metrics.macro_f1));
  return result;
}

}  // namespace tweetalpha::pipeline
