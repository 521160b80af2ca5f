#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tweetalpha/config.hpp"
#include "tweetalpha/error.hpp"
#include "tweetalpha/pipeline.hpp"

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel g_level = LogLevel::info;

void log_line(LogLevel level, const char* tag, const std::string& message) {
  if (g_level >= level) std::fprintf(stderr, "%s: %s\n", tag, message.c_str());
}

void info(const std::string& message) { log_line(LogLevel::info, "info", message); }
void debug(const std::string& message) { log_line(LogLevel::debug, "debug", message); }

int exit_code(tweetalpha::ErrorKind kind) {
  switch (kind) {
    case tweetalpha::ErrorKind::config: return 2;
    case tweetalpha::ErrorKind::data: return 3;
    case tweetalpha::ErrorKind::runtime: return 4;
  }
  return 4;
}

using StageFn =
    tweetalpha::pipeline::StageResult (*)(const tweetalpha::config::RunConfig&);

int run_stage(const std::string& stage, StageFn fn,
              const std::string& config_path, const std::string& output_dir) {
  try {
    tweetalpha::config::RunConfig cfg =
        tweetalpha::config::load_config(config_path);
    if (!output_dir.empty()) cfg.artifacts_dir = output_dir;
    info(stage + ": config " + config_path + " (hash " + cfg.config_hash + ")");
    tweetalpha::pipeline::StageResult result = fn(cfg);
    for (const std::string& message : result.messages) info(message);
    for (const auto& [label, path] : result.artifacts)
      debug("wrote " + label + ": " + path);
    info(stage + ": done");
    return 0;
  } catch (const tweetalpha::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tweet-sentiment stock direction pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --config after the subcommand name too

  std::string config_path;
  std::string output_dir;
  std::string log_level = "info";
  app.add_option("-c,--config", config_path, "run configuration (JSON)")
      ->required();
  app.add_option("-o,--output", output_dir,
                 "artifacts directory (overrides the config)");
  app.add_option("--log-level", log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  static const std::map<std::string, std::pair<const char*, StageFn>> kStages = {
      {"ingest",
       {"parse bars and tweets into canonical artifacts",
        &tweetalpha::pipeline::run_ingest}},
      {"featurize",
       {"score sentiment and build the windowed feature matrix",
        &tweetalpha::pipeline::run_featurize}},
      {"train",
       {"walk-forward training and the prediction ledger",
        &tweetalpha::pipeline::run_train}},
      {"backtest",
       {"P&L simulation against coin-flip baselines",
        &tweetalpha::pipeline::run_backtest}},
      {"report",
       {"classification metrics and run summary",
        &tweetalpha::pipeline::run_report}},
  };
  for (const auto& [name, stage] : kStages) app.add_subcommand(name, stage.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  if (log_level == "quiet") g_level = LogLevel::quiet;
  else if (log_level == "debug") g_level = LogLevel::debug;

  const std::string stage = app.get_subcommands().front()->get_name();
  return run_stage(stage, kStages.at(stage).second, config_path, output_dir);
}
