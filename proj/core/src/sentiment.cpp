#include "tweetalpha/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include "tweetalpha/dsv.hpp"
#include "tweetalpha/error.hpp"
#include "tweetalpha/utf8.hpp"

namespace tweetalpha::sentiment {

namespace {

char32_t lower_cp(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  // Latin-1 uppercase block, skipping the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

std::string lower_utf8(std::string_view text) {
  std::vector<char32_t> cps = utf8_decode(text);
  for (char32_t& cp : cps) cp = lower_cp(cp);
  return utf8_encode(cps);
}

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

/// Comment lines start with '#' followed by whitespace (or nothing).  A bare
/// "#word" is a term: hashtag lexicons store their entries with the prefix.
bool is_comment(const std::string& trimmed) {
  if (trimmed.empty() || trimmed[0] != '#') return false;
  return trimmed.size() == 1 || trimmed[1] == ' ' || trimmed[1] == '\t';
}

int polarity_from_band(double score, const std::pair<double, double>& band) {
  if (score > band.second) return 1;
  if (score < band.first) return -1;
  return 0;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space_byte(s[b])) ++b;
  while (e > b && is_space_byte(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

/// True when any codepoint repeats >= 3 times in a row.
bool is_elongated(const std::vector<char32_t>& cps) {
  std::size_t run = 1;
  for (std::size_t i = 1; i < cps.size(); ++i) {
    run = cps[i] == cps[i - 1] ? run + 1 : 1;
    if (run >= 3) return true;
  }
  return false;
}

/// Collapses runs of >= 3 identical codepoints to a single one.
std::string collapse_elongation(const std::vector<char32_t>& cps) {
  std::vector<char32_t> out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    std::size_t run = j - i;
    std::size_t keep = run >= 3 ? 1 : run;
    for (std::size_t k = 0; k < keep; ++k) out.push_back(cps[i]);
    i = j;
  }
  return utf8_encode(out);
}

}  // namespace

LexiconLoadResult load_lexicon(std::istream& in, std::string id) {
  LexiconLoadResult result;
  result.lexicon.id = std::move(id);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  double lo = 0.0, hi = 0.0;
  while (read_line(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || is_comment(t)) continue;
    std::size_t tab = t.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= t.size()) {
      throw data_error("lexicon " + result.lexicon.id + " line " +
                       std::to_string(line_no) + ": expected term<TAB>score");
    }
    std::string term = lower_utf8(trim(t.substr(0, tab)));
    double score;
    try {
      score = parse_double(trim(t.substr(tab + 1)));
    } catch (const Error& e) {
      throw data_error("lexicon " + result.lexicon.id + " line " +
                       std::to_string(line_no) + ": " + e.what());
    }
    if (term.empty()) {
      throw data_error("lexicon " + result.lexicon.id + " line " +
                       std::to_string(line_no) + ": empty term");
    }
    if (!result.lexicon.entries.emplace(term, score).second) {
      result.lexicon.entries[term] = score;
      ++result.duplicate_terms;
    }
    if (term.find(' ') != std::string::npos) result.lexicon.has_bigrams = true;
    if (first) {
      lo = hi = score;
      first = false;
    } else {
      lo = std::min(lo, score);
      hi = std::max(hi, score);
    }
  }
  if (result.lexicon.entries.empty()) {
    throw data_error("lexicon " + result.lexicon.id + " has no entries");
  }
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  result.lexicon.scale_min = lo;
  result.lexicon.scale_max = hi;
  return result;
}

void set_scale(Lexicon& lexicon, double scale_min, double scale_max) {
  if (!(scale_min < scale_max)) {
    throw config_error("lexicon " + lexicon.id + ": scale_min must be below scale_max");
  }
  for (const auto& [term, score] : lexicon.entries) {
    if (score < scale_min || score > scale_max) {
      throw config_error("lexicon " + lexicon.id + ": entry \"" + term +
                         "\" = " + std::to_string(score) +
                         " falls outside the declared scale");
    }
  }
  lexicon.scale_min = scale_min;
  lexicon.scale_max = scale_max;
}

std::unordered_set<std::string> load_term_set(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (read_line(in, line)) {
    std::string t = trim(line);
    if (t.empty() || is_comment(t)) continue;
    out.insert(lower_utf8(t));
  }
  return out;
}

std::vector<std::string> tokenize_lower(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space_byte(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !is_space_byte(text[i])) ++i;
    tokens.push_back(lower_utf8(text.substr(start, i - start)));
  }
  return tokens;
}

Scored score_emoticon(std::string_view text, const std::map<std::string, int>& table) {
  long long sum = 0;
  for (const auto& [emoticon, value] : table) {
    if (emoticon.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(emoticon, pos)) != std::string_view::npos) {
      sum += value;
      pos += emoticon.size();
    }
  }
  int polarity = sum > 0 ? 1 : (sum < 0 ? -1 : 0);
  return {static_cast<double>(polarity), polarity};
}

Scored score_mean_valence(std::string_view text, const Lexicon& lexicon) {
  std::vector<std::string> tokens = tokenize_lower(text);
  double sum = 0.0;
  std::size_t matched = 0;
  for (const std::string& tok : tokens) {
    auto it = lexicon.entries.find(tok);
    if (it != lexicon.entries.end()) {
      sum += it->second;
      ++matched;
    }
  }
  double score = matched == 0 ? lexicon.midpoint() : sum / static_cast<double>(matched);
  return {score, polarity_from_band(score, lexicon.neutral_band)};
}

Scored score_signed_sum(std::string_view text, const Lexicon& lexicon) {
  std::vector<std::string> tokens = tokenize_lower(text);
  double sum = 0.0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (lexicon.has_bigrams && i + 1 < tokens.size()) {
      auto it = lexicon.entries.find(tokens[i] + " " + tokens[i + 1]);
      if (it != lexicon.entries.end()) {
        sum += it->second;
        i += 2;
        continue;
      }
    }
    auto it = lexicon.entries.find(tokens[i]);
    if (it != lexicon.entries.end()) sum += it->second;
    ++i;
  }
  return {sum, sign_of(sum)};
}

Scored score_polarity_count(std::string_view text,
                            const std::unordered_set<std::string>& positive,
                            const std::unordered_set<std::string>& negative) {
  std::vector<std::string> tokens = tokenize_lower(text);
  long long pos_n = 0, neg_n = 0;
  for (const std::string& tok : tokens) {
    if (positive.count(tok)) ++pos_n;
    if (negative.count(tok)) ++neg_n;
  }
  int polarity = pos_n > neg_n ? 1 : (pos_n < neg_n ? -1 : 0);
  return {static_cast<double>(polarity), polarity};
}

Scored score_mood_categories(std::string_view text,
                             const std::vector<MoodCategory>& categories) {
  std::vector<std::string> tokens = tokenize_lower(text);
  std::vector<long long> counts(categories.size(), 0);
  for (const std::string& tok : tokens) {
    for (std::size_t c = 0; c < categories.size(); ++c) {
      if (categories[c].terms.count(tok)) ++counts[c];
    }
  }
  long long best = 0;
  std::size_t best_idx = 0;
  bool tie = true;  // zero matches everywhere is neutral
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > best) {
      best = counts[c];
      best_idx = c;
      tie = false;
    } else if (counts[c] == best && best > 0) {
      tie = true;
    }
  }
  int polarity = (tie || best == 0) ? 0 : categories[best_idx].sign;
  return {static_cast<double>(polarity), polarity};
}

Scored score_hashtag_freq(std::string_view text,
                          const std::unordered_map<std::string, double>& tags) {
  std::vector<std::string> tokens = tokenize_lower(text);
  double sum = 0.0;
  for (const std::string& tok : tokens) {
    auto it = tags.find(tok);
    if (it != tags.end()) sum += it->second;
  }
  return {sum, sign_of(sum)};
}

Scored score_heuristic_valence(std::string_view text, const Lexicon& lexicon,
                               const HeuristicRules& rules) {
  std::vector<std::string> tokens = tokenize_lower(text);
  double sum = 0.0;
  // Pending modifiers: (token position, multiplier).
  std::vector<std::pair<std::size_t, double>> pending;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (rules.negations.count(tok)) {
      pending.emplace_back(i, -1.0);
      continue;
    }
    if (rules.intensifiers.count(tok)) {
      pending.emplace_back(i, rules.intensifier_factor);
      continue;
    }

    std::vector<char32_t> cps = utf8_decode(tok);
    bool elongated = is_elongated(cps);
    auto it = lexicon.entries.find(tok);
    if (it == lexicon.entries.end() && elongated) {
      it = lexicon.entries.find(collapse_elongation(cps));
    }
    if (it == lexicon.entries.end()) continue;

    double value = it->second;
    if (elongated) value *= rules.elongation_factor;
    for (const auto& [pos, mult] : pending) {
      if (i - pos <= static_cast<std::size_t>(rules.window)) value *= mult;
    }
    pending.clear();
    sum += value;
  }
  return {sum, sign_of(sum)};
}

Scored Scorer::score(std::string_view text) const {
  return std::visit(
      [&](const auto& s) -> Scored {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EmoticonScorer>) {
          return score_emoticon(text, s.table);
        } else if constexpr (std::is_same_v<T, MeanValenceScorer>) {
          return score_mean_valence(text, s.lexicon);
        } else if constexpr (std::is_same_v<T, SignedSumScorer>) {
          return score_signed_sum(text, s.lexicon);
        } else if constexpr (std::is_same_v<T, PolarityCountScorer>) {
          return score_polarity_count(text, s.positive, s.negative);
        } else if constexpr (std::is_same_v<T, MoodScorer>) {
          return score_mood_categories(text, s.categories);
        } else if constexpr (std::is_same_v<T, HashtagScorer>) {
          return score_hashtag_freq(text, s.tags);
        } else {
          return score_heuristic_valence(text, s.lexicon, s.rules);
        }
      },
      impl);
}

ScorerRegistry::ScorerRegistry(std::vector<Scorer> scorers)
    : scorers_(std::move(scorers)) {
  std::unordered_set<std::string> ids;
  for (const Scorer& s : scorers_) {
    if (s.id.empty()) throw config_error("scorer with empty id");
    if (!ids.insert(s.id).second) {
      throw config_error("duplicate scorer id \"" + s.id + "\"");
    }
    std::visit(
        [&](const auto& impl) {
          using T = std::decay_t<decltype(impl)>;
          if constexpr (std::is_same_v<T, EmoticonScorer>) {
            if (impl.table.empty()) {
              throw config_error("scorer \"" + s.id + "\": empty emoticon table");
            }
          } else if constexpr (std::is_same_v<T, PolarityCountScorer>) {
            if (impl.positive.empty() || impl.negative.empty()) {
              throw config_error("scorer \"" + s.id + "\": empty polarity set");
            }
            for (const std::string& term : impl.positive) {
              if (impl.negative.count(term)) {
                throw config_error("scorer \"" + s.id + "\": term \"" + term +
                                   "\" is in both polarity sets");
              }
            }
          } else if constexpr (std::is_same_v<T, MoodScorer>) {
            if (impl.categories.empty()) {
              throw config_error("scorer \"" + s.id + "\": no mood categories");
            }
            for (const MoodCategory& cat : impl.categories) {
              if (cat.terms.empty()) {
                throw config_error("scorer \"" + s.id + "\": category \"" +
                                   cat.name + "\" has no terms");
              }
            }
          } else if constexpr (std::is_same_v<T, HashtagScorer>) {
            if (impl.tags.empty()) {
              throw config_error("scorer \"" + s.id + "\": empty tag table");
            }
          } else if constexpr (std::is_same_v<T, HeuristicScorer>) {
            if (impl.lexicon.entries.empty()) {
              throw config_error("scorer \"" + s.id + "\": empty lexicon");
            }
            if (impl.rules.intensifier_factor <= 0 || impl.rules.elongation_factor <= 0) {
              throw config_error("scorer \"" + s.id + "\": factors must be positive");
            }
            if (impl.rules.window < 0) {
              throw config_error("scorer \"" + s.id + "\": negative window");
            }
          } else {
            if (impl.lexicon.entries.empty()) {
              throw config_error("scorer \"" + s.id + "\": empty lexicon");
            }
            if (!(impl.lexicon.scale_min < impl.lexicon.scale_max)) {
              throw config_error("scorer \"" + s.id + "\": degenerate lexicon scale");
            }
          }
        },
        s.impl);
  }
}

SentimentVector ScorerRegistry::score_all(std::string_view raw_text,
                                          std::string_view clean_text) const {
  SentimentVector out;
  out.scores.reserve(scorers_.size());
  out.polarities.reserve(scorers_.size());
  for (const Scorer& s : scorers_) {
    Scored r = s.score(s.stage == Stage::pre_strip ? raw_text : clean_text);
    out.scores.push_back(r.score);
    out.polarities.push_back(r.polarity);
  }
  return out;
}

}  // namespace tweetalpha::sentiment
