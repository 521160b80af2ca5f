#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tweetalpha/time.hpp"

namespace tweetalpha::corpus {

/// One acquired tweet, timestamps in UTC, text exactly as acquired.
struct RawTweet {
  Instant created_at;
  std::string text;
  std::int64_t like = 0;
  std::int64_t quote = 0;
  std::int64_t reply = 0;
  std::int64_t retweet = 0;
  std::int64_t user_followers = 0;
  std::int64_t user_following = 0;
  std::int64_t user_tweets = 0;
  std::int64_t user_listed = 0;

  friend bool operator==(const RawTweet&, const RawTweet&) = default;
};

struct CleaningConfig {
  bool strip_urls = true;
  bool strip_mentions = true;
  bool strip_nonalpha = true;   // keep letters (diacritics included) and spaces only
  bool strip_emoji = true;      // effective when strip_nonalpha is off
  bool strip_punctuation = true;  // effective when strip_nonalpha is off
  int min_words = 3;
  int min_chars = 20;
  int tz_offset_hours = -3;
};

struct CleanTweet {
  RawTweet source;            // raw text retained for pre-strip scorers
  std::string clean_text;
  Instant local_time;
  int hour = 0;
  int word_count = 0;         // whitespace tokens of clean_text
  int text_length = 0;        // codepoints of clean_text

  friend bool operator==(const CleanTweet&, const CleanTweet&) = default;
};

struct TweetFormatConfig {
  enum class Kind { jsonl, dsv };
  Kind kind = Kind::jsonl;
  char delimiter = ',';
};

/// Reads the ten-field tweet records, one per line. JSONL keys and DSV header
/// names are matched case-insensitively. Malformed records, missing fields and
/// negative counts fail with the line number.
std::vector<RawTweet> parse_tweets(std::istream& in, const TweetFormatConfig& config);

/// Strip pipeline, in order: URLs, @-mentions (whole whitespace tokens),
/// character filtering (emoji / punctuation / everything outside letters and
/// spaces, per flags), whitespace collapse, trim; repeated until nothing
/// changes, so one strip exposing another still converges. Idempotent for
/// any fixed config.
std::string clean_text(const std::string& text, const CleaningConfig& config);

/// UTC -> fixed-offset local time plus local hour of day.
std::pair<Instant, int> normalize_time(Instant utc, int tz_offset_hours);

/// Removes exact (created_at, text) duplicates, keeping the first occurrence;
/// order otherwise preserved.
std::vector<RawTweet> dedup(std::vector<RawTweet> tweets);

/// Optional text transform applied after cleaning (e.g. a translation shim).
using TextTransform = std::function<std::string(const std::string&)>;

CleanTweet make_clean(const RawTweet& raw, const CleaningConfig& config,
                      const TextTransform& hook = nullptr);

/// make_clean over a batch; a throwing hook fails with the record index.
std::vector<CleanTweet> clean_all(const std::vector<RawTweet>& tweets,
                                  const CleaningConfig& config,
                                  const TextTransform& hook = nullptr);

/// Keeps tweets with word_count >= min_words AND text_length >= min_chars.
std::vector<CleanTweet> filter_short(std::vector<CleanTweet> tweets,
                                     const CleaningConfig& config);

/// Writers/readers for the clean-corpus artifact (JSONL, one record per line).
void serialize_corpus(std::ostream& out, const std::vector<CleanTweet>& tweets);
std::vector<CleanTweet> parse_corpus(std::istream& in);

}  // namespace tweetalpha::corpus
