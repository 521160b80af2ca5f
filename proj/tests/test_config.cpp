#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tweetalpha/config.hpp"
#include "tweetalpha/error.hpp"

using namespace tweetalpha;
using namespace tweetalpha::config;

namespace {

constexpr const char* kMinimal =
    R"({"bars": {"path": "b.tsv"}, "tweets": {"path": "t.jsonl"}})";

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("tweetalpha_cfg_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::string file(const std::string& name, const std::string& content) const {
    std::filesystem::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

RunConfig scorer_config(const TempDir& dir, const std::string& scorers_json) {
  std::string text = R"({"bars": {"path": "b.tsv"}, "tweets": {"path": "t.jsonl"},
                         "scorers": )" +
                     scorers_json + "}";
  return parse_config(text, dir.path.string());
}

}  // namespace

TEST_CASE("a minimal config fills every default") {
  RunConfig cfg = parse_config(kMinimal, "base");
  CHECK(cfg.bars_path == "base/b.tsv");
  CHECK(cfg.tweets_path == "base/t.jsonl");
  CHECK(cfg.bar_format.delimiter == '\t');
  CHECK(cfg.bar_format.date_format == "YYYY.MM.DD");
  CHECK(cfg.bar_format.time_format == "HH:MM:SS");
  CHECK(cfg.bar_format.file_tz_offset_hours == -3);
  CHECK(cfg.bar_format.local_tz_offset_hours == -3);
  CHECK(cfg.bar_format.session_start_sec == 10 * 3600 + 30 * 60);
  CHECK(cfg.bar_format.session_end_sec == 16 * 3600 + 50 * 60);
  CHECK(cfg.bar_format.bar_width_sec == 300);
  CHECK(cfg.tweet_format.kind == corpus::TweetFormatConfig::Kind::jsonl);
  CHECK(cfg.cleaning.strip_urls);
  CHECK(cfg.cleaning.min_words == 3);
  CHECK(cfg.cleaning.min_chars == 20);
  CHECK(cfg.cleaning.tz_offset_hours == -3);
  CHECK(cfg.scorers.empty());
  CHECK(cfg.features.emit_scores);
  CHECK(cfg.features.emit_polarities);
  CHECK(cfg.lags.lags == std::vector<int>{1, 2, 3, 4});
  CHECK(cfg.train.eta == 0.01);
  CHECK(cfg.train.n_estimators == 300);
  CHECK(cfg.train.max_depth == 5);
  CHECK(cfg.train.scale_pos_weight == 0.6);
  CHECK(cfg.train.seed == 4321);
  CHECK(cfg.walk_forward.train_days == 200);
  CHECK(cfg.walk_forward.val_days == 1);
  CHECK(cfg.walk_forward.test_days == 1);
  CHECK(cfg.walk_forward.selection == "logloss");
  CHECK(cfg.backtest.lot_size == 100);
  CHECK(cfg.backtest.mode == backtest::TradeMode::per_bar);
  CHECK(cfg.backtest.base_seed == 4321);
  CHECK(cfg.backtest.n_baselines == 100);
  CHECK(cfg.artifacts_dir == "base/out");
  CHECK(cfg.config_hash.size() == 16);
  CHECK(cfg.config_hash == hash_canonical_json(canonical_json(cfg)));
}

TEST_CASE("explicit defaults hash identically to omitted ones") {
  RunConfig minimal = parse_config(kMinimal, "base");
  RunConfig spelled = parse_config(
      R"({"bars": {"path": "b.tsv"}, "tweets": {"path": "t.jsonl"},
          "train": {"eta": 0.01, "n_estimators": 300, "max_depth": 5},
          "walk_forward": {"train_days": 200, "selection": "logloss"},
          "backtest": {"mode": "per_bar", "n_baselines": 100}})",
      "base");
  CHECK(canonical_json(minimal) == canonical_json(spelled));
  CHECK(minimal.config_hash == spelled.config_hash);

  // The canonical dump reparses to the same hash.
  RunConfig again = parse_config(canonical_json(minimal), "");
  CHECK(again.config_hash == minimal.config_hash);
}

TEST_CASE("the artifact directory does not participate in the hash") {
  RunConfig a = parse_config(kMinimal, "base");
  RunConfig b = parse_config(
      R"({"bars": {"path": "b.tsv"}, "tweets": {"path": "t.jsonl"},
          "artifacts_dir": "elsewhere"})",
      "base");
  CHECK(a.artifacts_dir != b.artifacts_dir);
  CHECK(a.config_hash == b.config_hash);

  RunConfig c = parse_config(
      R"({"bars": {"path": "b.tsv"}, "tweets": {"path": "t.jsonl"},
          "train": {"eta": 0.02}})",
      "base");
  CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("unknown keys are rejected with their section") {
  auto rejects = [](const std::string& text, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_config(text, ""), doctest::Contains(needle),
                         Error);
  };
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"}, "bogus": 1})",
          "unknown key \"bogus\"");
  rejects(R"({"bars": {"path": "b", "zzz": 1}, "tweets": {"path": "t"}})",
          "bars: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t", "sep": ";"}})",
          "tweets: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "session": {"opens": "10:00"}})",
          "session: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "cleaning": {"minwords": 1}})",
          "cleaning: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "features": {"lag": [1]}})",
          "features: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "train": {"alpha": 0.1}})",
          "train: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "walk_forward": {"folds": 3}})",
          "walk_forward: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "backtest": {"fees": 0}})",
          "backtest: unknown key");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "scorers": [{"id": "a", "kind": "signed_sum", "lexicon": "l",
                           "window": 3}]})",
          "unknown key \"window\"");
}

TEST_CASE("structural and range validation") {
  auto rejects = [](const std::string& text, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_config(text, ""), doctest::Contains(needle),
                         Error);
  };
  rejects("[]", "top level must be an object");
  rejects("{\"tweets\": {\"path\": \"t\"}}", "bars section is required");
  rejects("{\"bars\": {\"path\": \"b\"}}", "tweets section is required");
  rejects("not json at all", "not valid JSON");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "session": {"bar_minutes": 7}})",
          "bar_minutes must divide 60");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "session": {"open": "17:00", "close": "16:00"}})",
          "open must be before close");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "session": {"open": "10:07", "close": "16:00"}})",
          "align to the bar grid");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t", "format": "xml"}})",
          "format must be \"jsonl\" or \"dsv\"");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "features": {"lags": []}})",
          "non-empty array");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "features": {"lags": [2, 1]}})",
          "positive and ascending");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "features": {"lags": [0]}})",
          "positive and ascending");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "train": {"eta": 0}})",
          "config: train: eta");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "walk_forward": {"selection": "f1"}})",
          "selection must be \"logloss\" or \"auc\"");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "walk_forward": {"train_days": 0}})",
          "train_days must be >= 1");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "walk_forward": {"val_days": 2}})",
          "val_days and test_days");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "backtest": {"mode": "daily"}})",
          "mode must be");
  rejects(R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
              "backtest": {"lot_size": 0}})",
          "lot_size must be >= 1");
  rejects(R"({"bars": 3, "tweets": {"path": "t"}})", "bars section is required");
}

TEST_CASE("walk-forward selection accepts auc") {
  RunConfig cfg = parse_config(
      R"({"bars": {"path": "b"}, "tweets": {"path": "t"},
          "walk_forward": {"selection": "auc"}})",
      "");
  CHECK(cfg.walk_forward.selection == "auc");
  RunConfig other = parse_config(kMinimal, "");
  CHECK(cfg.config_hash != other.config_hash);
}

TEST_CASE("scorer entries are validated field by field") {
  auto rejects = [](const std::string& scorers, const char* needle) {
    std::string text =
        R"({"bars": {"path": "b"}, "tweets": {"path": "t"}, "scorers": )" +
        scorers + "}";
    CHECK_THROWS_WITH_AS(parse_config(text, ""), doctest::Contains(needle),
                         Error);
  };
  rejects(R"([{"id": "Bad", "kind": "signed_sum", "lexicon": "l"}])",
          "id must be lowercase");
  rejects(R"([{"id": "9a", "kind": "signed_sum", "lexicon": "l"}])",
          "id must be lowercase");
  rejects(R"([{"id": "a", "kind": "tfidf"}])", "unknown kind");
  rejects(R"([{"id": "a", "kind": "signed_sum"}])", "lexicon is required");
  rejects(R"([{"id": "a", "kind": "polarity_count", "lexicon": "l",
               "positive": "p", "negative": "n"}])",
          "lexicon does not apply");
  rejects(R"([{"id": "a", "kind": "polarity_count", "negative": "n"}])",
          "positive");
  rejects(R"([{"id": "a", "kind": "signed_sum", "lexicon": "l",
               "neutral_band": [0, 1]}])",
          "neutral_band only applies");
  rejects(R"([{"id": "a", "kind": "mean_valence", "lexicon": "l",
               "neutral_band": [2, 1]}])",
          "low must be <= high");
  rejects(R"([{"id": "a", "kind": "mean_valence", "lexicon": "l",
               "scale": [3, 3]}])",
          "min must be < max");
  rejects(R"([{"id": "a", "kind": "mood"}])", "categories must be a non-empty");
  rejects(R"([{"id": "a", "kind": "mood",
               "categories": [{"name": "joy", "sign": 2, "path": "p"}]}])",
          "sign must be -1, 0 or 1");
  rejects(R"([{"id": "a", "kind": "mood",
               "categories": [{"name": "joy", "sign": 1, "path": "p"},
                              {"name": "joy", "sign": -1, "path": "q"}]}])",
          "duplicate category");
  rejects(R"([{"id": "a", "kind": "signed_sum", "lexicon": "l",
               "negations": ["x"]}])",
          "only apply to heuristic");
  rejects(R"([{"id": "a", "kind": "signed_sum", "lexicon": "l",
               "stage": "both"}])",
          "stage must be");
  rejects(R"([{"id": "dup", "kind": "signed_sum", "lexicon": "l"},
              {"id": "dup", "kind": "hashtag", "lexicon": "m"}])",
          "duplicate scorer id");
}

TEST_CASE("registry construction loads lexicons relative to the config") {
  TempDir dir;
  dir.file("valence.tsv", "bom\t1.0\nruim\t-1.0\n");
  dir.file("tags.tsv", "# cashtag table\n#alta\t1.0\n#queda\t-1.5\n");

  RunConfig cfg = scorer_config(
      dir,
      R"([{"id": "sig", "kind": "signed_sum", "lexicon": "valence.tsv"},
          {"id": "tags", "kind": "hashtag", "lexicon": "tags.tsv"}])");
  REQUIRE(cfg.scorers.size() == 2);
  CHECK(cfg.scorers[0].lexicon == (dir.path / "valence.tsv").string());

  sentiment::ScorerRegistry registry = build_registry(cfg);
  REQUIRE(registry.size() == 2);
  CHECK(registry.scorers()[0].score("dia bom").score == 1.0);
  // '#'-prefixed entries are terms, not comments.
  CHECK(registry.scorers()[1].score("#alta hoje").score == 1.0);
  CHECK(registry.scorers()[1].score("#queda agora").polarity == -1);

  sentiment::SentimentVector v = registry.score_all("dia bom #alta", "dia bom #alta");
  REQUIRE(v.scores.size() == 2);
}

TEST_CASE("emoticon scorers default to the built-in table") {
  TempDir dir;
  RunConfig cfg = scorer_config(dir, R"([{"id": "emo", "kind": "emoticon"}])");
  CHECK(cfg.scorers[0].stage == sentiment::Stage::pre_strip);

  sentiment::ScorerRegistry registry = build_registry(cfg);
  CHECK(registry.scorers()[0].score("alta :)").polarity == 1);
  CHECK(registry.scorers()[0].score("queda :(").polarity == -1);
  CHECK(registry.scorers()[0].score("alta <3 <3 :/").polarity == 1);

  dir.file("emo.tsv", "yay\t2.0\nboo\t-0.5\n");
  RunConfig custom = scorer_config(
      dir, R"([{"id": "emo", "kind": "emoticon", "lexicon": "emo.tsv"}])");
  sentiment::ScorerRegistry reg2 = build_registry(custom);
  CHECK(reg2.scorers()[0].score("yay yay boo").polarity == 1);

  dir.file("zero.tsv", "meh\t0\n");
  RunConfig zero = scorer_config(
      dir, R"([{"id": "emo", "kind": "emoticon", "lexicon": "zero.tsv"}])");
  CHECK_THROWS_WITH_AS(build_registry(zero), doctest::Contains("nonzero"),
                       Error);
}

TEST_CASE("mean valence gets a band around the scale midpoint by default") {
  TempDir dir;
  dir.file("val.tsv", "otimo\t9\npessimo\t1\nmorno\t5\n");

  RunConfig cfg = scorer_config(
      dir, R"([{"id": "mv", "kind": "mean_valence", "lexicon": "val.tsv"}])");
  sentiment::ScorerRegistry registry = build_registry(cfg);
  // Observed scale [1, 9]: the default band is [4, 6].
  CHECK(registry.scorers()[0].score("tudo otimo").polarity == 1);
  CHECK(registry.scorers()[0].score("tudo pessimo").polarity == -1);
  CHECK(registry.scorers()[0].score("meio morno").polarity == 0);
  CHECK(registry.scorers()[0].score("nada casa").score == 5.0);  // midpoint

  RunConfig banded = scorer_config(
      dir,
      R"([{"id": "mv", "kind": "mean_valence", "lexicon": "val.tsv",
           "scale": [0, 10], "neutral_band": [0.5, 9.5]}])");
  sentiment::ScorerRegistry reg2 = build_registry(banded);
  CHECK(reg2.scorers()[0].score("tudo otimo").polarity == 0);  // 9 inside band
  CHECK(reg2.scorers()[0].score("nada casa").score == 5.0);    // (0+10)/2
}

TEST_CASE("heuristic scorers use the built-in modifier lists unless overridden") {
  TempDir dir;
  dir.file("val.tsv", "bom\t2\nruim\t-2\n");

  RunConfig cfg = scorer_config(
      dir, R"([{"id": "h", "kind": "heuristic", "lexicon": "val.tsv"}])");
  sentiment::ScorerRegistry registry = build_registry(cfg);
  CHECK(registry.scorers()[0].score("bom").score == 2.0);
  CHECK(registry.scorers()[0].score("nao bom").score == -2.0);     // default negation
  CHECK(registry.scorers()[0].score("muito bom").score == 3.0);    // default intensifier
  CHECK(registry.scorers()[0].score("n\xC3\xA3o bom").score == -2.0);

  RunConfig custom = scorer_config(
      dir,
      R"([{"id": "h", "kind": "heuristic", "lexicon": "val.tsv",
           "negations": ["zap"], "intensifiers": ["ultra"]}])");
  sentiment::ScorerRegistry reg2 = build_registry(custom);
  CHECK(reg2.scorers()[0].score("zap bom").score == -2.0);
  CHECK(reg2.scorers()[0].score("ultra bom").score == 3.0);
  CHECK(reg2.scorers()[0].score("nao bom").score == 2.0);  // default list replaced
}

TEST_CASE("polarity-count and mood scorers load term sets") {
  TempDir dir;
  dir.file("pos.txt", "alta\nganho\n");
  dir.file("neg.txt", "queda\nperda\n");
  dir.file("joy.txt", "feliz\n");
  dir.file("fear.txt", "medo\n");

  RunConfig cfg = scorer_config(
      dir,
      R"([{"id": "pc", "kind": "polarity_count", "positive": "pos.txt",
           "negative": "neg.txt"},
          {"id": "md", "kind": "mood",
           "categories": [{"name": "joy", "sign": 1, "path": "joy.txt"},
                          {"name": "fear", "sign": -1, "path": "fear.txt"}]}])");
  sentiment::ScorerRegistry registry = build_registry(cfg);
  CHECK(registry.scorers()[0].score("alta e ganho mas queda").polarity == 1);
  CHECK(registry.scorers()[1].score("muito medo hoje").polarity == -1);
  CHECK(registry.scorers()[1].score("feliz mas medo").polarity == 0);
}

TEST_CASE("registry construction surfaces missing files") {
  TempDir dir;
  RunConfig cfg = scorer_config(
      dir, R"([{"id": "sig", "kind": "signed_sum", "lexicon": "absent.tsv"}])");
  CHECK_THROWS_WITH_AS(build_registry(cfg),
                       doctest::Contains("cannot open lexicon"), Error);

  RunConfig pc = scorer_config(
      dir,
      R"([{"id": "pc", "kind": "polarity_count", "positive": "nope.txt",
           "negative": "nope.txt"}])");
  CHECK_THROWS_WITH_AS(build_registry(pc),
                       doctest::Contains("cannot open term set"), Error);
}

TEST_CASE("configs load from disk with paths anchored at the file") {
  TempDir dir;
  std::filesystem::create_directories(dir.path / "data");
  std::string cfg_path = dir.file("run.json", kMinimal);

  RunConfig cfg = load_config(cfg_path);
  CHECK(cfg.bars_path == (dir.path / "b.tsv").string());
  CHECK(cfg.artifacts_dir == (dir.path / "out").string());

  CHECK_THROWS_WITH_AS(load_config((dir.path / "missing.json").string()),
                       doctest::Contains("cannot open"), Error);
}
