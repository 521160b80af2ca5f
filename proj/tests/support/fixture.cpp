#include "support/fixture.hpp"

#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "tweetalpha/corpus.hpp"
#include "tweetalpha/sentiment.hpp"
#include "tweetalpha/time.hpp"

namespace tweetalpha::testing {

namespace {

const char* kPositive[] = {"alta",     "lucro",  "ganho", "sobe",
                           "otimista", "compra", "forte"};
const char* kNegative[] = {"queda",      "perda", "baixa", "desce",
                           "pessimista", "venda", "fraco"};
const char* kFiller[] = {"mercado", "bolsa",  "hoje",   "papel", "indice",
                         "pregao",  "volume", "sessao", "giro",  "fluxo"};

template <std::size_t N>
const char* pick(const char* (&words)[N], std::mt19937_64& rng) {
  return words[rng() % N];
}

void append_price(std::string& out, std::int64_t cents) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld",
                static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  out += buf;
}

}  // namespace

PlantedData make_planted(const PlantedSpec& spec) {
  PlantedData data;
  data.spec = spec;

  data.bar_format.delimiter = '\t';
  data.bar_format.date_format = "YYYY.MM.DD";
  data.bar_format.time_format = "HH:MM:SS";
  data.bar_format.file_tz_offset_hours = spec.tz_offset_hours;
  data.bar_format.local_tz_offset_hours = spec.tz_offset_hours;
  data.bar_format.session_start_sec = spec.session_start_sec;
  data.bar_format.session_end_sec =
      spec.session_start_sec + spec.bars_per_day * spec.bar_width_sec;
  data.bar_format.bar_width_sec = spec.bar_width_sec;

  for (const char* w : kPositive) {
    data.lexicon_tsv += w;
    data.lexicon_tsv += "\t1.0\n";
  }
  for (const char* w : kNegative) {
    data.lexicon_tsv += w;
    data.lexicon_tsv += "\t-1.0\n";
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Consecutive weekdays, as day keys.
  std::vector<std::int64_t> days;
  std::int64_t key = days_from_civil(2021, 3, 1);
  while (static_cast<int>(days.size()) < spec.n_days) {
    int wd = weekday(start_of_day_key(key));
    if (wd >= 1 && wd <= 5) days.push_back(key);
    ++key;
  }

  data.bars_tsv =
      "<DATE>\t<TIME>\t<OPEN>\t<HIGH>\t<LOW>\t<CLOSE>\t<TICKVOL>\t<VOL>\t"
      "<SPREAD>\n";

  std::int64_t close_cents = 5000;  // 50.00
  for (std::int64_t day : days) {
    // Directions first: the tweets for bar t reference direction[t + 1].
    std::vector<int> direction(spec.bars_per_day);
    std::int64_t c = close_cents;
    for (int t = 0; t < spec.bars_per_day; ++t) {
      int d = (rng() & 1) ? 1 : -1;
      if (c + 5 * d > 5500 || c + 5 * d < 4500) d = -d;
      direction[t] = d;
      c += 5 * d;
    }

    for (int t = 0; t < spec.bars_per_day; ++t) {
      std::int64_t open_c = close_cents;
      close_cents += 5 * direction[t];
      std::int64_t hi = std::max(open_c, close_cents) + 1;
      std::int64_t lo = std::min(open_c, close_cents) - 1;

      Instant local = start_of_day_key(day) +
                      (spec.session_start_sec + t * spec.bar_width_sec);
      std::string& out = data.bars_tsv;
      std::string date = format_date(local);
      for (char& ch : date)
        if (ch == '-') ch = '.';
      out += date;
      out += '\t';
      out += format_time(local);
      out += '\t';
      append_price(out, open_c);
      out += '\t';
      append_price(out, hi);
      out += '\t';
      append_price(out, lo);
      out += '\t';
      append_price(out, close_cents);
      out += '\t';
      out += std::to_string(50 + rng() % 200);
      out += '\t';
      out += std::to_string(10000 + rng() % 5000);
      out += '\t';
      out += std::to_string(1 + rng() % 10);
      out += '\n';

      // Tweets for this window. The last bar of the day has no next bar; its
      // tweets carry an uninformative random sign.
      int sign;
      if (t + 1 < spec.bars_per_day) {
        sign = unit(rng) < spec.agreement ? direction[t + 1] : -direction[t + 1];
      } else {
        sign = (rng() & 1) ? 1 : -1;
      }
      int n_tweets = 2 + static_cast<int>(rng() % 3);
      for (int k = 0; k < n_tweets; ++k) {
        std::string text = pick(kFiller, rng);
        text += ' ';
        text += sign > 0 ? pick(kPositive, rng) : pick(kNegative, rng);
        text += ' ';
        text += pick(kFiller, rng);
        while (text.size() < 22) {
          text += ' ';
          text += pick(kFiller, rng);
        }
        Instant utc = local - spec.tz_offset_hours * 3600 +
                      static_cast<std::int64_t>(rng() % spec.bar_width_sec);
        std::string& tj = data.tweets_jsonl;
        tj += "{\"created_at\":\"";
        tj += format_date(utc);
        tj += 'T';
        tj += format_time(utc);
        tj += "Z\",\"text\":\"";
        tj += text;
        tj += "\",\"like\":";
        tj += std::to_string(rng() % 50);
        tj += ",\"quote\":";
        tj += std::to_string(rng() % 5);
        tj += ",\"reply\":";
        tj += std::to_string(rng() % 10);
        tj += ",\"retweet\":";
        tj += std::to_string(rng() % 20);
        tj += ",\"user_followers\":";
        tj += std::to_string(100 + rng() % 10000);
        tj += ",\"user_following\":";
        tj += std::to_string(50 + rng() % 2000);
        tj += ",\"user_tweets\":";
        tj += std::to_string(200 + rng() % 50000);
        tj += ",\"user_listed\":";
        tj += std::to_string(rng() % 100);
        tj += "}\n";
      }
    }
  }
  return data;
}

std::string planted_config_json(const PlantedData& data,
                                const std::string& bars_path,
                                const std::string& tweets_path,
                                const std::string& lexicon_path,
                                const std::string& artifacts_dir,
                                int train_days) {
  const PlantedSpec& spec = data.spec;
  char open_buf[8], close_buf[8];
  std::snprintf(open_buf, sizeof(open_buf), "%02d:%02d",
                spec.session_start_sec / 3600,
                spec.session_start_sec % 3600 / 60);
  int end_sec = data.bar_format.session_end_sec;
  std::snprintf(close_buf, sizeof(close_buf), "%02d:%02d", end_sec / 3600,
                end_sec % 3600 / 60);

  nlohmann::json doc;
  doc["bars"] = {{"path", bars_path},
                 {"delimiter", "\t"},
                 {"file_tz_offset_hours", spec.tz_offset_hours}};
  doc["session"] = {{"open", open_buf},
                    {"close", close_buf},
                    {"bar_minutes", spec.bar_width_sec / 60},
                    {"tz_offset_hours", spec.tz_offset_hours}};
  doc["tweets"] = {{"path", tweets_path}, {"format", "jsonl"}};
  doc["scorers"] = nlohmann::json::array(
      {{{"id", "signal"}, {"kind", "signed_sum"}, {"lexicon", lexicon_path}}});
  doc["features"] = {{"lags", {1, 2}}};
  doc["train"] = {{"eta", 0.05},
                  {"n_estimators", 60},
                  {"max_depth", 3},
                  {"scale_pos_weight", 1.0}};
  doc["walk_forward"] = {{"train_days", train_days}};
  doc["backtest"] = {{"lot_size", 100}, {"n_baselines", 100}};
  doc["artifacts_dir"] = artifacts_dir;
  return doc.dump(2) + "\n";
}

features::AssembleResult planted_matrix(const PlantedData& data) {
  std::istringstream bars_in(data.bars_tsv);
  bars::BarParseResult parsed = bars::parse_bars(bars_in, data.bar_format);

  std::istringstream tweets_in(data.tweets_jsonl);
  corpus::TweetFormatConfig tweet_format;
  std::vector<corpus::RawTweet> raw =
      corpus::parse_tweets(tweets_in, tweet_format);

  corpus::CleaningConfig cleaning;
  cleaning.tz_offset_hours = data.spec.tz_offset_hours;
  std::vector<corpus::CleanTweet> cleaned =
      corpus::filter_short(corpus::clean_all(corpus::dedup(std::move(raw)),
                                             cleaning),
                           cleaning);

  std::istringstream lex_in(data.lexicon_tsv);
  sentiment::Lexicon lexicon =
      sentiment::load_lexicon(lex_in, "signal").lexicon;
  sentiment::Scorer scorer;
  scorer.id = "signal";
  scorer.stage = sentiment::Stage::post_strip;
  scorer.impl = sentiment::SignedSumScorer{std::move(lexicon)};
  sentiment::ScorerRegistry registry({std::move(scorer)});

  std::vector<features::ScoredTweet> scored;
  scored.reserve(cleaned.size());
  for (corpus::CleanTweet& t : cleaned) {
    features::ScoredTweet st;
    st.sentiment = registry.score_all(t.source.text, t.clean_text);
    st.tweet = std::move(t);
    scored.push_back(std::move(st));
  }

  features::FeatureConfig feature_config;
  features::LagSpec lag_spec;
  lag_spec.lags = {1, 2};
  return features::assemble(scored, parsed.series, registry, feature_config,
                            lag_spec);
}

}  // namespace tweetalpha::testing
