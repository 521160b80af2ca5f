#include "tweetalpha/corpus.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <regex>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tweetalpha/dsv.hpp"
#include "tweetalpha/error.hpp"
#include "tweetalpha/utf8.hpp"

namespace tweetalpha::corpus {

namespace {

using json = nlohmann::json;

constexpr const char* kCountFields[] = {
    "like",           "quote",          "reply",       "retweet",
    "user_followers", "user_following", "user_tweets", "user_listed"};

std::int64_t* count_slot(RawTweet& t, int i) {
  std::int64_t* slots[] = {&t.like,           &t.quote,
                           &t.reply,          &t.retweet,
                           &t.user_followers, &t.user_following,
                           &t.user_tweets,    &t.user_listed};
  return slots[i];
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string at_line(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::int64_t count_from_json(const json& v, const char* field, std::size_t line_no) {
  std::int64_t out;
  if (v.is_number_integer()) {
    out = v.get<std::int64_t>();
  } else if (v.is_string()) {
    try {
      out = parse_int64(v.get<std::string>());
    } catch (const Error& e) {
      throw data_error(at_line(line_no) + std::string(field) + ": " + e.what());
    }
  } else {
    throw data_error(at_line(line_no) + std::string(field) + " must be an integer");
  }
  if (out < 0) {
    throw data_error(at_line(line_no) + std::string(field) + " is negative");
  }
  return out;
}

std::vector<RawTweet> parse_tweets_jsonl(std::istream& in) {
  std::vector<RawTweet> out;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw data_error(at_line(line_no) + "invalid record: " + e.what());
    }
    if (!record.is_object()) {
      throw data_error(at_line(line_no) + "record is not an object");
    }

    std::unordered_map<std::string, const json*> by_name;
    for (auto it = record.begin(); it != record.end(); ++it) {
      by_name[lower_ascii(it.key())] = &it.value();
    }
    auto field = [&](const char* name) -> const json* {
      auto it = by_name.find(name);
      return it == by_name.end() ? nullptr : it->second;
    };

    RawTweet t;
    const json* created = field("created_at");
    if (!created || !created->is_string()) {
      throw data_error(at_line(line_no) + "missing created_at");
    }
    try {
      t.created_at = parse_timestamp_utc(created->get<std::string>());
    } catch (const Error& e) {
      throw data_error(at_line(line_no) + e.what());
    }
    const json* text = field("text");
    if (!text || !text->is_string() || text->get<std::string>().empty()) {
      throw data_error(at_line(line_no) + "missing or empty text");
    }
    t.text = text->get<std::string>();
    for (int i = 0; i < 8; ++i) {
      const json* v = field(kCountFields[i]);
      if (!v) {
        throw data_error(at_line(line_no) + "missing field " + kCountFields[i]);
      }
      *count_slot(t, i) = count_from_json(*v, kCountFields[i], line_no);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<RawTweet> parse_tweets_dsv(std::istream& in, char delimiter) {
  std::string line;
  std::size_t line_no = 0;
  if (!read_line(in, line)) {
    throw data_error("tweet file is empty (header row required)");
  }
  ++line_no;

  std::vector<std::string> header = split_dsv(line, delimiter);
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    index[normalize_header_name(header[i])] = static_cast<int>(i);
  }
  auto column = [&](const char* name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw data_error(std::string("tweet header is missing column \"") + name + "\"");
    }
    return it->second;
  };
  int created_col = column("created_at");
  int text_col = column("text");
  int count_cols[8];
  for (int i = 0; i < 8; ++i) count_cols[i] = column(kCountFields[i]);

  std::vector<RawTweet> out;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_dsv(line, delimiter);
    if (fields.size() != header.size()) {
      throw data_error(at_line(line_no) + "expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    RawTweet t;
    try {
      t.created_at = parse_timestamp_utc(fields[created_col]);
      for (int i = 0; i < 8; ++i) {
        std::int64_t v = parse_int64(fields[count_cols[i]]);
        if (v < 0) {
          throw data_error(std::string(kCountFields[i]) + " is negative");
        }
        *count_slot(t, i) = v;
      }
    } catch (const Error& e) {
      throw data_error(at_line(line_no) + e.what());
    }
    t.text = fields[text_col];
    if (t.text.empty()) {
      throw data_error(at_line(line_no) + "missing or empty text");
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v' || cp == 0xA0;
}

bool is_letter_cp(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;  // Latin-1
  if (cp >= 0x100 && cp <= 0x24F) return true;    // Latin Extended-A/B
  if (cp >= 0x1E00 && cp <= 0x1EFF) return true;  // Latin Extended Additional
  return false;
}

// Approximate: the common emoji and pictograph blocks plus joiners.
bool is_emoji_cp(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         cp == 0xFE0F || cp == 0x200D || cp == 0x2B50 || cp == 0x2B55 ||
         (cp >= 0x1F1E6 && cp <= 0x1F1FF);
}

bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<int>(cp)) != 0;
  }
  return (cp >= 0xA1 && cp <= 0xBF) || (cp >= 0x2000 && cp <= 0x206F) ||
         (cp >= 0x2E00 && cp <= 0x2E7F);
}

std::string strip_url_matches(const std::string& text) {
  static const std::regex kUrl(
      R"(\b(?:https?://|ftp://|www\.)[^ \t\r\n\f\v]+)",
      std::regex::ECMAScript | std::regex::icase);
  return std::regex_replace(text, kUrl, " ");
}

std::string drop_mention_tokens(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (text[start] != '@') out.append(text, start, i - start);
  }
  return out;
}

}  // namespace

std::vector<RawTweet> parse_tweets(std::istream& in, const TweetFormatConfig& config) {
  if (config.kind == TweetFormatConfig::Kind::jsonl) {
    return parse_tweets_jsonl(in);
  }
  return parse_tweets_dsv(in, config.delimiter);
}

namespace {

std::string clean_pass(const std::string& text, const CleaningConfig& config) {
  std::string work = text;
  if (config.strip_urls) work = strip_url_matches(work);
  if (config.strip_mentions) work = drop_mention_tokens(work);

  std::vector<char32_t> cps = utf8_decode(work);
  std::vector<char32_t> kept;
  kept.reserve(cps.size());
  for (char32_t cp : cps) {
    if (is_space_cp(cp)) {
      kept.push_back(U' ');
      continue;
    }
    if (config.strip_nonalpha) {
      if (is_letter_cp(cp)) kept.push_back(cp);
      continue;
    }
    if (config.strip_emoji && is_emoji_cp(cp)) continue;
    if (config.strip_punctuation && is_punct_cp(cp)) continue;
    kept.push_back(cp);
  }

  std::vector<char32_t> collapsed;
  collapsed.reserve(kept.size());
  for (char32_t cp : kept) {
    if (cp == U' ' && (collapsed.empty() || collapsed.back() == U' ')) continue;
    collapsed.push_back(cp);
  }
  while (!collapsed.empty() && collapsed.back() == U' ') collapsed.pop_back();

  return utf8_encode(collapsed);
}

}  // namespace

std::string clean_text(const std::string& text, const CleaningConfig& config) {
  // One strip can expose another ("😀@user" sheds the emoji and bares the
  // mention), so the pass runs to a fixpoint. Every change shrinks the
  // string, so this terminates.
  std::string work = clean_pass(text, config);
  for (;;) {
    std::string next = clean_pass(work, config);
    if (next == work) return work;
    work = std::move(next);
  }
}

std::pair<Instant, int> normalize_time(Instant utc, int tz_offset_hours) {
  Instant local = utc + static_cast<std::int64_t>(tz_offset_hours) * 3600;
  return {local, civil_from(local).hour};
}

std::vector<RawTweet> dedup(std::vector<RawTweet> tweets) {
  std::unordered_set<std::string> seen;
  std::vector<RawTweet> out;
  out.reserve(tweets.size());
  for (RawTweet& t : tweets) {
    std::string key = std::to_string(t.created_at.sec) + '\n' + t.text;
    if (seen.insert(std::move(key)).second) out.push_back(std::move(t));
  }
  return out;
}

CleanTweet make_clean(const RawTweet& raw, const CleaningConfig& config,
                      const TextTransform& hook) {
  CleanTweet c;
  c.source = raw;
  c.clean_text = clean_text(raw.text, config);
  if (hook) c.clean_text = hook(c.clean_text);
  auto [local, hour] = normalize_time(raw.created_at, config.tz_offset_hours);
  c.local_time = local;
  c.hour = hour;
  c.text_length = utf8_length(c.clean_text);
  c.word_count = 0;
  bool in_token = false;
  for (char ch : c.clean_text) {
    bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_token) ++c.word_count;
    in_token = !space;
  }
  return c;
}

std::vector<CleanTweet> clean_all(const std::vector<RawTweet>& tweets,
                                  const CleaningConfig& config,
                                  const TextTransform& hook) {
  std::vector<CleanTweet> out;
  out.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    try {
      out.push_back(make_clean(tweets[i], config, hook));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw runtime_error("text transform failed at record " + std::to_string(i) +
                          ": " + e.what());
    }
  }
  return out;
}

std::vector<CleanTweet> filter_short(std::vector<CleanTweet> tweets,
                                     const CleaningConfig& config) {
  std::vector<CleanTweet> out;
  out.reserve(tweets.size());
  for (CleanTweet& t : tweets) {
    if (t.word_count >= config.min_words && t.text_length >= config.min_chars) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

void serialize_corpus(std::ostream& out, const std::vector<CleanTweet>& tweets) {
  for (const CleanTweet& t : tweets) {
    json record;
    record["created_at"] = format_date(t.source.created_at) + "T" +
                           format_time(t.source.created_at) + "Z";
    record["text"] = t.source.text;
    const RawTweet& s = t.source;
    const std::int64_t counts[] = {s.like,           s.quote,
                                   s.reply,          s.retweet,
                                   s.user_followers, s.user_following,
                                   s.user_tweets,    s.user_listed};
    for (int i = 0; i < 8; ++i) record[kCountFields[i]] = counts[i];
    record["clean_text"] = t.clean_text;
    record["local_time"] = format_datetime(t.local_time);
    record["hour"] = t.hour;
    record["word_count"] = t.word_count;
    record["text_length"] = t.text_length;
    out << record.dump() << "\n";
  }
}

std::vector<CleanTweet> parse_corpus(std::istream& in) {
  std::vector<CleanTweet> out;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw data_error(at_line(line_no) + "invalid corpus record: " + e.what());
    }
    try {
      CleanTweet t;
      t.source.created_at = parse_timestamp_utc(record.at("created_at").get<std::string>());
      t.source.text = record.at("text").get<std::string>();
      for (int i = 0; i < 8; ++i) {
        *count_slot(t.source, i) = record.at(kCountFields[i]).get<std::int64_t>();
      }
      t.clean_text = record.at("clean_text").get<std::string>();
      std::string local = record.at("local_time").get<std::string>();
      int y, mo, d, h, mi, s;
      parse_date_fields(local.substr(0, 10), "YYYY-MM-DD", y, mo, d);
      parse_time_fields(local.substr(11), "HH:MM:SS", h, mi, s);
      t.local_time = make_instant({y, mo, d, h, mi, s});
      t.hour = record.at("hour").get<int>();
      t.word_count = record.at("word_count").get<int>();
      t.text_length = record.at("text_length").get<int>();
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw data_error(at_line(line_no) + "corpus record missing field: " + e.what());
    }
  }
  return out;
}

}  // namespace tweetalpha::corpus
