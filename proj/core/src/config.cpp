#include "tweetalpha/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tweetalpha/error.hpp"
#include "tweetalpha/time.hpp"

namespace tweetalpha::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& context, const std::string& message) {
  throw config_error("config: " + context + ": " + message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      bad(context, "unknown key \"" + item.key() + "\"");
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& context) {
  const json* v = find(obj, key);
  if (v == nullptr || !v->is_string()) bad(context, key + " must be a string");
  return v->get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& key,
                          const std::string& context, std::string fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) bad(context, key + " must be a string");
  return v->get<std::string>();
}

std::int64_t get_int_or(const json& obj, const std::string& key,
                        const std::string& context, std::int64_t fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) bad(context, key + " must be an integer");
  return v->get<std::int64_t>();
}

double get_double_or(const json& obj, const std::string& key,
                     const std::string& context, double fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) bad(context, key + " must be a number");
  return v->get<double>();
}

bool get_bool_or(const json& obj, const std::string& key,
                 const std::string& context, bool fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) bad(context, key + " must be a boolean");
  return v->get<bool>();
}

char get_delimiter_or(const json& obj, const std::string& key,
                      const std::string& context, char fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string() || v->get<std::string>().size() != 1)
    bad(context, key + " must be a single-character string");
  return v->get<std::string>()[0];
}

int get_session_time(const json& obj, const std::string& key,
                     const std::string& context, int fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) bad(context, key + " must be \"HH:MM\"");
  try {
    return parse_time_of_day(v->get<std::string>());
  } catch (const Error& e) {
    bad(context, key + ": " + e.what());
  }
}

std::string join_path(const std::string& base, const std::string& path) {
  if (path.empty() || path[0] == '/' || base.empty() || base == ".")
    return path;
  return base + "/" + path;
}

sentiment::Stage parse_stage(const std::string& text,
                             const std::string& context) {
  if (text == "pre_strip") return sentiment::Stage::pre_strip;
  if (text == "post_strip") return sentiment::Stage::post_strip;
  bad(context, "stage must be \"pre_strip\" or \"post_strip\"");
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  if (!(id[0] >= 'a' && id[0] <= 'z')) return false;
  for (char c : id)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  return true;
}

std::pair<double, double> get_band(const json& obj, const std::string& key,
                                   const std::string& context) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad(context, key + " must be [low, high]");
  double lo = v[0].get<double>();
  double hi = v[1].get<double>();
  if (!(lo <= hi)) bad(context, key + ": low must be <= high");
  return {lo, hi};
}

ScorerConfig parse_scorer(const json& obj, std::size_t index) {
  std::string context = "scorers[" + std::to_string(index) + "]";
  if (!obj.is_object()) bad(context, "must be an object");
  check_keys(obj,
             {"id", "kind", "stage", "lexicon", "positive", "negative",
              "categories", "neutral_band", "scale", "negations",
              "intensifiers"},
             context);

  ScorerConfig sc;
  sc.id = get_string(obj, "id", context);
  if (!valid_id(sc.id))
    bad(context, "id must be lowercase [a-z0-9_] starting with a letter");
  sc.kind = get_string(obj, "kind", context);
  context += " (" + sc.id + ")";

  static const std::set<std::string> kKinds = {
      "emoticon",       "mean_valence", "signed_sum", "polarity_count",
      "mood",           "hashtag",      "heuristic"};
  if (!kKinds.contains(sc.kind)) bad(context, "unknown kind \"" + sc.kind + "\"");

  std::string default_stage =
      sc.kind == "emoticon" ? "pre_strip" : "post_strip";
  sc.stage = parse_stage(get_string_or(obj, "stage", context, default_stage),
                         context);

  sc.lexicon = get_string_or(obj, "lexicon", context, "");
  bool needs_lexicon = sc.kind == "mean_valence" || sc.kind == "signed_sum" ||
                       sc.kind == "hashtag" || sc.kind == "heuristic";
  if (needs_lexicon && sc.lexicon.empty()) bad(context, "lexicon is required");
  if (!needs_lexicon && sc.kind != "emoticon" && !sc.lexicon.empty())
    bad(context, "lexicon does not apply to kind " + sc.kind);

  if (sc.kind == "polarity_count") {
    sc.positive = get_string(obj, "positive", context);
    sc.negative = get_string(obj, "negative", context);
  } else if (find(obj, "positive") != nullptr ||
             find(obj, "negative") != nullptr) {
    bad(context, "positive/negative only apply to polarity_count");
  }

  if (sc.kind == "mood") {
    const json* cats = find(obj, "categories");
    if (cats == nullptr || !cats->is_array() || cats->empty())
      bad(context, "categories must be a non-empty array");
    std::set<std::string> seen;
    for (const json& cat : *cats) {
      std::string cat_context = context + " categories";
      if (!cat.is_object()) bad(cat_context, "entries must be objects");
      check_keys(cat, {"name", "sign", "path"}, cat_context);
      ScorerConfig::MoodCategoryConfig mc;
      mc.name = get_string(cat, "name", cat_context);
      std::int64_t sign = get_int_or(cat, "sign", cat_context, 2);
      if (sign < -1 || sign > 1) bad(cat_context, "sign must be -1, 0 or 1");
      mc.sign = static_cast<int>(sign);
      mc.path = get_string(cat, "path", cat_context);
      if (!seen.insert(mc.name).second)
        bad(cat_context, "duplicate category " + mc.name);
      sc.categories.push_back(std::move(mc));
    }
  } else if (find(obj, "categories") != nullptr) {
    bad(context, "categories only apply to mood");
  }

  if (find(obj, "neutral_band") != nullptr) {
    if (sc.kind != "mean_valence")
      bad(context, "neutral_band only applies to mean_valence");
    std::tie(sc.band_lo, sc.band_hi) = get_band(obj, "neutral_band", context);
    sc.has_band = true;
  }
  if (find(obj, "scale") != nullptr) {
    if (sc.kind != "mean_valence")
      bad(context, "scale only applies to mean_valence");
    std::tie(sc.scale_min, sc.scale_max) = get_band(obj, "scale", context);
    if (!(sc.scale_min < sc.scale_max))
      bad(context, "scale: min must be < max");
    sc.has_scale = true;
  }

  auto get_word_list = [&obj, &context](const std::string& key,
                                        std::vector<std::string>& out) {
    const json* v = find(obj, key);
    if (v == nullptr) return false;
    if (!v->is_array()) bad(context, key + " must be an array of strings");
    for (const json& w : *v) {
      if (!w.is_string() || w.get<std::string>().empty())
        bad(context, key + " must be an array of non-empty strings");
      out.push_back(w.get<std::string>());
    }
    return true;
  };
  if (sc.kind == "heuristic") {
    sc.custom_negations = get_word_list("negations", sc.negations);
    sc.custom_intensifiers = get_word_list("intensifiers", sc.intensifiers);
  } else if (find(obj, "negations") != nullptr ||
             find(obj, "intensifiers") != nullptr) {
    bad(context, "negations/intensifiers only apply to heuristic");
  }
  return sc;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string session_time_string(int sec) {
  char buf[16];
  if (sec % 60 == 0)
    std::snprintf(buf, sizeof buf, "%02d:%02d", sec / 3600, (sec / 60) % 60);
  else
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", sec / 3600,
                  (sec / 60) % 60, sec % 60);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& json_text,
                       const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config: top level must be an object");
  check_keys(doc,
             {"bars", "session", "tweets", "cleaning", "scorers", "features",
              "train", "walk_forward", "backtest", "artifacts_dir"},
             "top level");

  RunConfig cfg;

  const json* bars_obj = find(doc, "bars");
  if (bars_obj == nullptr || !bars_obj->is_object())
    throw config_error("config: bars section is required");
  check_keys(*bars_obj,
             {"path", "delimiter", "date_format", "time_format",
              "file_tz_offset_hours"},
             "bars");
  cfg.bars_path = join_path(base_dir, get_string(*bars_obj, "path", "bars"));
  cfg.bar_format.delimiter =
      get_delimiter_or(*bars_obj, "delimiter", "bars", '\t');
  cfg.bar_format.date_format =
      get_string_or(*bars_obj, "date_format", "bars", "YYYY.MM.DD");
  cfg.bar_format.time_format =
      get_string_or(*bars_obj, "time_format", "bars", "HH:MM:SS");
  cfg.bar_format.file_tz_offset_hours = static_cast<int>(
      get_int_or(*bars_obj, "file_tz_offset_hours", "bars", -3));

  const json* session = find(doc, "session");
  int bar_minutes = 5;
  if (session != nullptr) {
    if (!session->is_object())
      throw config_error("config: session must be an object");
    check_keys(*session, {"open", "close", "bar_minutes", "tz_offset_hours"},
               "session");
    cfg.bar_format.session_start_sec =
        get_session_time(*session, "open", "session", 10 * 3600 + 30 * 60);
    cfg.bar_format.session_end_sec =
        get_session_time(*session, "close", "session", 16 * 3600 + 50 * 60);
    bar_minutes =
        static_cast<int>(get_int_or(*session, "bar_minutes", "session", 5));
    cfg.bar_format.local_tz_offset_hours = static_cast<int>(
        get_int_or(*session, "tz_offset_hours", "session", -3));
  }
  if (bar_minutes < 1 || bar_minutes > 60 || 60 % bar_minutes != 0)
    throw config_error("config: session: bar_minutes must divide 60");
  cfg.bar_format.bar_width_sec = bar_minutes * 60;
  if (cfg.bar_format.session_start_sec >= cfg.bar_format.session_end_sec)
    throw config_error("config: session: open must be before close");
  if (cfg.bar_format.session_start_sec % cfg.bar_format.bar_width_sec != 0)
    throw config_error("config: session: open must align to the bar grid");
  cfg.cleaning.tz_offset_hours = cfg.bar_format.local_tz_offset_hours;

  const json* tweets_obj = find(doc, "tweets");
  if (tweets_obj == nullptr || !tweets_obj->is_object())
    throw config_error("config: tweets section is required");
  check_keys(*tweets_obj, {"path", "format", "delimiter"}, "tweets");
  cfg.tweets_path =
      join_path(base_dir, get_string(*tweets_obj, "path", "tweets"));
  std::string tweet_format =
      get_string_or(*tweets_obj, "format", "tweets", "jsonl");
  if (tweet_format == "jsonl")
    cfg.tweet_format.kind = corpus::TweetFormatConfig::Kind::jsonl;
  else if (tweet_format == "dsv")
    cfg.tweet_format.kind = corpus::TweetFormatConfig::Kind::dsv;
  else
    throw config_error("config: tweets: format must be \"jsonl\" or \"dsv\"");
  cfg.tweet_format.delimiter =
      get_delimiter_or(*tweets_obj, "delimiter", "tweets", ',');

  if (const json* cleaning = find(doc, "cleaning"); cleaning != nullptr) {
    if (!cleaning->is_object())
      throw config_error("config: cleaning must be an object");
    check_keys(*cleaning,
               {"strip_urls", "strip_mentions", "strip_nonalpha", "strip_emoji",
                "strip_punctuation", "min_words", "min_chars"},
               "cleaning");
    cfg.cleaning.strip_urls =
        get_bool_or(*cleaning, "strip_urls", "cleaning", true);
    cfg.cleaning.strip_mentions =
        get_bool_or(*cleaning, "strip_mentions", "cleaning", true);
    cfg.cleaning.strip_nonalpha =
        get_bool_or(*cleaning, "strip_nonalpha", "cleaning", true);
    cfg.cleaning.strip_emoji =
        get_bool_or(*cleaning, "strip_emoji", "cleaning", true);
    cfg.cleaning.strip_punctuation =
        get_bool_or(*cleaning, "strip_punctuation", "cleaning", true);
    cfg.cleaning.min_words = static_cast<int>(
        get_int_or(*cleaning, "min_words", "cleaning", 3));
    cfg.cleaning.min_chars = static_cast<int>(
        get_int_or(*cleaning, "min_chars", "cleaning", 20));
    if (cfg.cleaning.min_words < 0 || cfg.cleaning.min_chars < 0)
      throw config_error("config: cleaning: thresholds must be >= 0");
  }

  const json* scorers = find(doc, "scorers");
  if (scorers != nullptr) {
    if (!scorers->is_array())
      throw config_error("config: scorers must be an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < scorers->size(); ++i) {
      ScorerConfig sc = parse_scorer((*scorers)[i], i);
      if (!ids.insert(sc.id).second)
        throw config_error("config: duplicate scorer id \"" + sc.id + "\"");
      sc.lexicon = join_path(base_dir, sc.lexicon);
      sc.positive = join_path(base_dir, sc.positive);
      sc.negative = join_path(base_dir, sc.negative);
      for (auto& cat : sc.categories) cat.path = join_path(base_dir, cat.path);
      cfg.scorers.push_back(std::move(sc));
    }
  }

  if (const json* feats = find(doc, "features"); feats != nullptr) {
    if (!feats->is_object())
      throw config_error("config: features must be an object");
    check_keys(*feats, {"lags", "emit_scores", "emit_polarities"}, "features");
    cfg.features.emit_scores =
        get_bool_or(*feats, "emit_scores", "features", true);
    cfg.features.emit_polarities =
        get_bool_or(*feats, "emit_polarities", "features", true);
    if (const json* lags = find(*feats, "lags"); lags != nullptr) {
      if (!lags->is_array() || lags->empty())
        throw config_error("config: features: lags must be a non-empty array");
      cfg.lags.lags.clear();
      int prev = 0;
      for (const json& lag : *lags) {
        if (!lag.is_number_integer())
          throw config_error("config: features: lags must be integers");
        int k = lag.get<int>();
        if (k <= prev)
          throw config_error(
              "config: features: lags must be positive and ascending");
        cfg.lags.lags.push_back(k);
        prev = k;
      }
    }
  }

  if (const json* train = find(doc, "train"); train != nullptr) {
    if (!train->is_object())
      throw config_error("config: train must be an object");
    check_keys(*train,
               {"eta", "n_estimators", "max_depth", "scale_pos_weight", "seed",
                "reg_lambda", "gamma", "min_child_weight", "base_score"},
               "train");
    gbdt::TrainParams& p = cfg.train;
    p.eta = get_double_or(*train, "eta", "train", p.eta);
    p.n_estimators = static_cast<int>(
        get_int_or(*train, "n_estimators", "train", p.n_estimators));
    p.max_depth =
        static_cast<int>(get_int_or(*train, "max_depth", "train", p.max_depth));
    p.scale_pos_weight =
        get_double_or(*train, "scale_pos_weight", "train", p.scale_pos_weight);
    p.seed = static_cast<std::uint64_t>(get_int_or(
        *train, "seed", "train", static_cast<std::int64_t>(p.seed)));
    p.reg_lambda = get_double_or(*train, "reg_lambda", "train", p.reg_lambda);
    p.gamma = get_double_or(*train, "gamma", "train", p.gamma);
    p.min_child_weight =
        get_double_or(*train, "min_child_weight", "train", p.min_child_weight);
    p.base_score = get_double_or(*train, "base_score", "train", p.base_score);
  }
  try {
    gbdt::validate_params(cfg.train);
  } catch (const Error& e) {
    throw config_error(std::string("config: train: ") + e.what());
  }

  if (const json* wf = find(doc, "walk_forward"); wf != nullptr) {
    if (!wf->is_object())
      throw config_error("config: walk_forward must be an object");
    check_keys(*wf, {"train_days", "val_days", "test_days", "selection"},
               "walk_forward");
    cfg.walk_forward.train_days = static_cast<int>(
        get_int_or(*wf, "train_days", "walk_forward", 200));
    cfg.walk_forward.val_days =
        static_cast<int>(get_int_or(*wf, "val_days", "walk_forward", 1));
    cfg.walk_forward.test_days =
        static_cast<int>(get_int_or(*wf, "test_days", "walk_forward", 1));
    cfg.walk_forward.selection =
        get_string_or(*wf, "selection", "walk_forward", "logloss");
  }
  if (cfg.walk_forward.selection != "logloss" &&
      cfg.walk_forward.selection != "auc")
    throw config_error(
        "config: walk_forward: selection must be \"logloss\" or \"auc\"");
  if (cfg.walk_forward.train_days < 1)
    throw config_error("config: walk_forward: train_days must be >= 1");
  if (cfg.walk_forward.val_days != 1 || cfg.walk_forward.test_days != 1)
    throw config_error(
        "config: walk_forward: val_days and test_days must both be 1");

  if (const json* bt = find(doc, "backtest"); bt != nullptr) {
    if (!bt->is_object())
      throw config_error("config: backtest must be an object");
    check_keys(*bt, {"lot_size", "mode", "base_seed", "n_baselines"},
               "backtest");
    cfg.backtest.lot_size = get_int_or(*bt, "lot_size", "backtest", 100);
    std::string mode = get_string_or(*bt, "mode", "backtest", "per_bar");
    if (mode == "per_bar")
      cfg.backtest.mode = backtest::TradeMode::per_bar;
    else if (mode == "first_bar_of_day")
      cfg.backtest.mode = backtest::TradeMode::first_bar_of_day;
    else
      throw config_error(
          "config: backtest: mode must be \"per_bar\" or \"first_bar_of_day\"");
    cfg.backtest.base_seed = static_cast<std::uint64_t>(
        get_int_or(*bt, "base_seed", "backtest", 4321));
    cfg.backtest.n_baselines =
        static_cast<int>(get_int_or(*bt, "n_baselines", "backtest", 100));
  }
  if (cfg.backtest.lot_size < 1)
    throw config_error("config: backtest: lot_size must be >= 1");
  if (cfg.backtest.n_baselines < 1)
    throw config_error("config: backtest: n_baselines must be >= 1");

  cfg.artifacts_dir = join_path(
      base_dir, get_string_or(doc, "artifacts_dir", "top level", "out"));

  cfg.config_hash = hash_canonical_json(canonical_json(cfg));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string::size_type slash = path.find_last_of('/');
  std::string base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
  return parse_config(buffer.str(), base_dir);
}

std::string canonical_json(const RunConfig& cfg) {
  json doc;
  doc["bars"] = {
      {"path", cfg.bars_path},
      {"delimiter", std::string(1, cfg.bar_format.delimiter)},
      {"date_format", cfg.bar_format.date_format},
      {"time_format", cfg.bar_format.time_format},
      {"file_tz_offset_hours", cfg.bar_format.file_tz_offset_hours}};
  doc["session"] = {
      {"open", session_time_string(cfg.bar_format.session_start_sec)},
      {"close", session_time_string(cfg.bar_format.session_end_sec)},
      {"bar_minutes", cfg.bar_format.bar_width_sec / 60},
      {"tz_offset_hours", cfg.bar_format.local_tz_offset_hours}};
  doc["tweets"] = {
      {"path", cfg.tweets_path},
      {"format", cfg.tweet_format.kind == corpus::TweetFormatConfig::Kind::jsonl
                     ? "jsonl"
                     : "dsv"},
      {"delimiter", std::string(1, cfg.tweet_format.delimiter)}};
  doc["cleaning"] = {{"strip_urls", cfg.cleaning.strip_urls},
                     {"strip_mentions", cfg.cleaning.strip_mentions},
                     {"strip_nonalpha", cfg.cleaning.strip_nonalpha},
                     {"strip_emoji", cfg.cleaning.strip_emoji},
                     {"strip_punctuation", cfg.cleaning.strip_punctuation},
                     {"min_words", cfg.cleaning.min_words},
                     {"min_chars", cfg.cleaning.min_chars}};
  json scorers = json::array();
  for (const ScorerConfig& sc : cfg.scorers) {
    json s;
    s["id"] = sc.id;
    s["kind"] = sc.kind;
    s["stage"] =
        sc.stage == sentiment::Stage::pre_strip ? "pre_strip" : "post_strip";
    if (!sc.lexicon.empty()) s["lexicon"] = sc.lexicon;
    if (sc.kind == "polarity_count") {
      s["positive"] = sc.positive;
      s["negative"] = sc.negative;
    }
    if (!sc.categories.empty()) {
      json cats = json::array();
      for (const auto& cat : sc.categories)
        cats.push_back(
            {{"name", cat.name}, {"sign", cat.sign}, {"path", cat.path}});
      s["categories"] = std::move(cats);
    }
    if (sc.has_band) s["neutral_band"] = {sc.band_lo, sc.band_hi};
    if (sc.has_scale) s["scale"] = {sc.scale_min, sc.scale_max};
    if (sc.custom_negations) s["negations"] = sc.negations;
    if (sc.custom_intensifiers) s["intensifiers"] = sc.intensifiers;
    scorers.push_back(std::move(s));
  }
  doc["scorers"] = std::move(scorers);
  doc["features"] = {{"lags", cfg.lags.lags},
                     {"emit_scores", cfg.features.emit_scores},
                     {"emit_polarities", cfg.features.emit_polarities}};
  doc["train"] = {{"eta", cfg.train.eta},
                  {"n_estimators", cfg.train.n_estimators},
                  {"max_depth", cfg.train.max_depth},
                  {"scale_pos_weight", cfg.train.scale_pos_weight},
                  {"seed", cfg.train.seed},
                  {"reg_lambda", cfg.train.reg_lambda},
                  {"gamma", cfg.train.gamma},
                  {"min_child_weight", cfg.train.min_child_weight},
                  {"base_score", cfg.train.base_score}};
  doc["walk_forward"] = {{"train_days", cfg.walk_forward.train_days},
                         {"val_days", cfg.walk_forward.val_days},
                         {"test_days", cfg.walk_forward.test_days},
                         {"selection", cfg.walk_forward.selection}};
  doc["backtest"] = {
      {"lot_size", cfg.backtest.lot_size},
      {"mode", cfg.backtest.mode == backtest::TradeMode::per_bar
                   ? "per_bar"
                   : "first_bar_of_day"},
      {"base_seed", cfg.backtest.base_seed},
      {"n_baselines", cfg.backtest.n_baselines}};
  // artifacts_dir is deliberately not hashed: it chooses where artifacts go,
  // not what gets computed.
  return doc.dump();
}

std::string hash_canonical_json(const std::string& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

const std::vector<std::pair<std::string, int>>& default_emoticons() {
  static const std::vector<std::pair<std::string, int>> kTable = {
      {":)", 1},  {":-)", 1},  {":D", 1},  {":-D", 1}, {"=)", 1},
      {";)", 1},  {";-)", 1},  {"<3", 1},  {":p", 1},  {":P", 1},
      {":(", -1}, {":-(", -1}, {":'(", -1}, {"=(", -1}, {"D:", -1},
      {":/", -1}, {":-/", -1}, {":|", -1}};
  return kTable;
}

const std::vector<std::string>& default_negations() {
  static const std::vector<std::string> kWords = {
      "não", "nao", "nunca", "jamais", "nem", "sem"};
  return kWords;
}

const std::vector<std::string>& default_intensifiers() {
  static const std::vector<std::string> kWords = {
      "muito",  "muita", "demais",       "bem",  "super",
      "mega",   "tão",   "tao",          "mais", "bastante",
      "extremamente"};
  return kWords;
}

namespace {

sentiment::Lexicon load_lexicon_file(const std::string& path,
                                     const std::string& id) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open lexicon " + path);
  return sentiment::load_lexicon(in, id).lexicon;
}

std::unordered_set<std::string> load_terms_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open term set " + path);
  return sentiment::load_term_set(in);
}

}  // namespace

sentiment::ScorerRegistry build_registry(const RunConfig& cfg) {
  std::vector<sentiment::Scorer> scorers;
  for (const ScorerConfig& sc : cfg.scorers) {
    sentiment::Scorer scorer;
    scorer.id = sc.id;
    scorer.stage = sc.stage;
    if (sc.kind == "emoticon") {
      sentiment::EmoticonScorer impl;
      if (sc.lexicon.empty()) {
        for (const auto& [key, sign] : default_emoticons())
          impl.table.emplace(key, sign);
      } else {
        sentiment::Lexicon lex = load_lexicon_file(sc.lexicon, sc.id);
        for (const auto& [term, score] : lex.entries) {
          if (score == 0.0)
            throw config_error("scorer " + sc.id +
                               ": emoticon scores must be nonzero");
          impl.table.emplace(term, score > 0 ? 1 : -1);
        }
      }
      scorer.impl = std::move(impl);
    } else if (sc.kind == "mean_valence") {
      sentiment::MeanValenceScorer impl;
      impl.lexicon = load_lexicon_file(sc.lexicon, sc.id);
      if (sc.has_scale)
        sentiment::set_scale(impl.lexicon, sc.scale_min, sc.scale_max);
      if (sc.has_band) {
        impl.lexicon.neutral_band = {sc.band_lo, sc.band_hi};
      } else {
        double mid = impl.lexicon.midpoint();
        impl.lexicon.neutral_band = {mid - 1.0, mid + 1.0};
      }
      scorer.impl = std::move(impl);
    } else if (sc.kind == "signed_sum") {
      sentiment::SignedSumScorer impl;
      impl.lexicon = load_lexicon_file(sc.lexicon, sc.id);
      scorer.impl = std::move(impl);
    } else if (sc.kind == "polarity_count") {
      sentiment::PolarityCountScorer impl;
      impl.positive = load_terms_file(sc.positive);
      impl.negative = load_terms_file(sc.negative);
      scorer.impl = std::move(impl);
    } else if (sc.kind == "mood") {
      sentiment::MoodScorer impl;
      for (const auto& cat : sc.categories) {
        sentiment::MoodCategory mc;
        mc.name = cat.name;
        mc.sign = cat.sign;
        mc.terms = load_terms_file(cat.path);
        impl.categories.push_back(std::move(mc));
      }
      scorer.impl = std::move(impl);
    } else if (sc.kind == "hashtag") {
      sentiment::HashtagScorer impl;
      sentiment::Lexicon lex = load_lexicon_file(sc.lexicon, sc.id);
      impl.tags = std::move(lex.entries);
      scorer.impl = std::move(impl);
    } else if (sc.kind == "heuristic") {
      sentiment::HeuristicScorer impl;
      impl.lexicon = load_lexicon_file(sc.lexicon, sc.id);
      const std::vector<std::string>& negs =
          sc.custom_negations ? sc.negations : default_negations();
      const std::vector<std::string>& ints =
          sc.custom_intensifiers ? sc.intensifiers : default_intensifiers();
      impl.rules.negations.insert(negs.begin(), negs.end());
      impl.rules.intensifiers.insert(ints.begin(), ints.end());
      scorer.impl = std::move(impl);
    } else {
      throw config_error("scorer " + sc.id + ": unknown kind " + sc.kind);
    }
    scorers.push_back(std::move(scorer));
  }
  return sentiment::ScorerRegistry(std::move(scorers));
}

}  // namespace tweetalpha::config
