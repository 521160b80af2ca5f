#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace tweetalpha::sentiment {

/// Term table loaded from "term<TAB>score" lines. Terms are lowercased;
/// bigram terms contain one inner space.
struct Lexicon {
  std::string id;
  std::unordered_map<std::string, double> entries;
  double scale_min = 0.0;
  double scale_max = 0.0;
  std::pair<double, double> neutral_band{0.0, 0.0};
  bool has_bigrams = false;

  double midpoint() const { return (scale_min + scale_max) / 2.0; }
};

struct LexiconLoadResult {
  Lexicon lexicon;
  std::size_t duplicate_terms = 0;  // later entry won each time
};

/// Blank lines and comments ('#' followed by whitespace or end of line) are
/// skipped; "#term<TAB>score" is an entry, so hashtag tables need no escape.
/// Anything else must be term<TAB>score. Scale bounds default to the
/// observed score range (widened by 1 on each side if the range is
/// degenerate).
LexiconLoadResult load_lexicon(std::istream& in, std::string id);

/// Overrides the scale; every entry must fall inside it.
void set_scale(Lexicon& lexicon, double scale_min, double scale_max);

/// One term per line, same comment rule as load_lexicon; lowercased.
std::unordered_set<std::string> load_term_set(std::istream& in);

/// Lowercases ASCII and Latin-1 letters ("Ótimo" -> "ótimo") and splits on
/// whitespace.
std::vector<std::string> tokenize_lower(std::string_view text);

struct Scored {
  double score = 0.0;
  int polarity = 0;  // -1, 0, +1
};

/// Sign-sum over an emoticon table; keys are matched as raw byte substrings
/// (non-overlapping per key), so this runs on pre-strip text. Score and
/// polarity are both the sign of the sum.
Scored score_emoticon(std::string_view text, const std::map<std::string, int>& table);

/// Mean entry valence over matched tokens; no match yields the scale
/// midpoint. Polarity via the lexicon's neutral band.
Scored score_mean_valence(std::string_view text, const Lexicon& lexicon);

/// Sum of matched term scores with bigram-first token consumption: at each
/// position the two-token term is tried before the single token and consumes
/// both tokens on a hit.
Scored score_signed_sum(std::string_view text, const Lexicon& lexicon);

/// Sign of (positive matches - negative matches), counted with multiplicity.
Scored score_polarity_count(std::string_view text,
                            const std::unordered_set<std::string>& positive,
                            const std::unordered_set<std::string>& negative);

struct MoodCategory {
  std::string name;
  int sign = 0;  // -1, 0, +1
  std::unordered_set<std::string> terms;
};

/// Sign of the category with the strictly highest match count; any tie
/// (including zero matches everywhere) is neutral.
Scored score_mood_categories(std::string_view text,
                             const std::vector<MoodCategory>& categories);

/// Sum of tag weight x occurrence count over whitespace tokens ("#bullish").
Scored score_hashtag_freq(std::string_view text,
                          const std::unordered_map<std::string, double>& tags);

struct HeuristicRules {
  std::unordered_set<std::string> negations;
  std::unordered_set<std::string> intensifiers;
  double intensifier_factor = 1.5;
  double elongation_factor = 1.25;
  int window = 3;  // tokens a pending modifier stays alive
};

/// Lexicon sum with three rewrites: a negation flips the next matched term
/// within `window` tokens; an intensifier scales it; a token with a letter
/// repeated >= 3 times (matched directly or after collapsing the run) gets
/// the elongation boost. Negation/intensifier terms are consumed as
/// modifiers even when they also appear in the lexicon.
Scored score_heuristic_valence(std::string_view text, const Lexicon& lexicon,
                               const HeuristicRules& rules);

enum class Stage { pre_strip, post_strip };

struct EmoticonScorer {
  std::map<std::string, int> table;
};
struct MeanValenceScorer {
  Lexicon lexicon;
};
struct SignedSumScorer {
  Lexicon lexicon;
};
struct PolarityCountScorer {
  std::unordered_set<std::string> positive, negative;
};
struct MoodScorer {
  std::vector<MoodCategory> categories;
};
struct HashtagScorer {
  std::unordered_map<std::string, double> tags;
};
struct HeuristicScorer {
  Lexicon lexicon;
  HeuristicRules rules;
};

struct Scorer {
  std::string id;
  Stage stage = Stage::post_strip;
  std::variant<EmoticonScorer, MeanValenceScorer, SignedSumScorer,
               PolarityCountScorer, MoodScorer, HashtagScorer, HeuristicScorer>
      impl;

  Scored score(std::string_view text) const;
};

/// Per-tweet output, aligned with the registry's scorer order.
struct SentimentVector {
  std::vector<double> scores;
  std::vector<int> polarities;

  friend bool operator==(const SentimentVector&, const SentimentVector&) = default;
};

class ScorerRegistry {
 public:
  ScorerRegistry() = default;
  /// Validates: unique non-empty ids, non-empty tables/lexicons, disjoint
  /// polarity sets, positive factors. Throws Error(config).
  explicit ScorerRegistry(std::vector<Scorer> scorers);

  const std::vector<Scorer>& scorers() const { return scorers_; }
  std::size_t size() const { return scorers_.size(); }

  /// Applies every scorer; pre-strip scorers see raw_text, post-strip ones
  /// see clean text.
  SentimentVector score_all(std::string_view raw_text,
                            std::string_view clean_text) const;

 private:
  std::vector<Scorer> scorers_;
};

}  // namespace tweetalpha::sentiment
