#include "tweetalpha/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "tweetalpha/dsv.hpp"
#include "tweetalpha/error.hpp"

namespace tweetalpha::features {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr const char* kStatNames[] = {"mean", "std", "min", "max",
                                      "sum",  "var", "count"};

/// Attribute accessor: scorer outputs are indexed, numeric fields named.
struct AttrSpec {
  std::string name;
  enum class Source { scorer_score, scorer_polarity, numeric } source;
  std::size_t scorer_index = 0;
  std::int64_t corpus::RawTweet::* raw_field = nullptr;
  int corpus::CleanTweet::* clean_field = nullptr;
};

double attr_value(const AttrSpec& spec, const ScoredTweet& t) {
  switch (spec.source) {
    case AttrSpec::Source::scorer_score:
      return t.sentiment.scores[spec.scorer_index];
    case AttrSpec::Source::scorer_polarity:
      return static_cast<double>(t.sentiment.polarities[spec.scorer_index]);
    case AttrSpec::Source::numeric:
      if (spec.raw_field) return static_cast<double>(t.tweet.source.*spec.raw_field);
      return static_cast<double>(t.tweet.*spec.clean_field);
  }
  return kNaN;
}

std::vector<AttrSpec> resolve_attrs(const sentiment::ScorerRegistry& registry,
                                    const FeatureConfig& config) {
  std::vector<AttrSpec> attrs;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const std::string& id = registry.scorers()[i].id;
    if (config.emit_scores) {
      attrs.push_back({id + "_score", AttrSpec::Source::scorer_score, i, nullptr, nullptr});
    }
    if (config.emit_polarities) {
      attrs.push_back({id + "_polarity", AttrSpec::Source::scorer_polarity, i, nullptr, nullptr});
    }
  }

  static const std::unordered_map<std::string, std::int64_t corpus::RawTweet::*>
      kRawFields = {{"like", &corpus::RawTweet::like},
                    {"quote", &corpus::RawTweet::quote},
                    {"reply", &corpus::RawTweet::reply},
                    {"retweet", &corpus::RawTweet::retweet},
                    {"user_followers", &corpus::RawTweet::user_followers},
                    {"user_following", &corpus::RawTweet::user_following},
                    {"user_tweets", &corpus::RawTweet::user_tweets},
                    {"user_listed", &corpus::RawTweet::user_listed}};
  static const std::unordered_map<std::string, int corpus::CleanTweet::*>
      kCleanFields = {{"hour", &corpus::CleanTweet::hour},
                      {"word_count", &corpus::CleanTweet::word_count},
                      {"text_length", &corpus::CleanTweet::text_length}};

  for (const std::string& name : config.numeric_attrs) {
    AttrSpec spec;
    spec.name = name;
    spec.source = AttrSpec::Source::numeric;
    if (auto it = kRawFields.find(name); it != kRawFields.end()) {
      spec.raw_field = it->second;
    } else if (auto it2 = kCleanFields.find(name); it2 != kCleanFields.end()) {
      spec.clean_field = it2->second;
    } else {
      throw config_error("unknown aggregate attribute \"" + name + "\"");
    }
    attrs.push_back(std::move(spec));
  }
  return attrs;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::map<Instant, std::vector<const ScoredTweet*>> bucket_tweets(
    const std::vector<ScoredTweet>& tweets, int bar_width_sec) {
  std::map<Instant, std::vector<const ScoredTweet*>> buckets;
  for (const ScoredTweet& t : tweets) {
    buckets[bars::floor_to_window(t.tweet.local_time, bar_width_sec)].push_back(&t);
  }
  return buckets;
}

Aggregates aggregate_values(const std::vector<double>& values) {
  Aggregates a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  double lo = values[0], hi = values[0];
  for (double v : values) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    double d = v - mean;
    sq += d * d;
  }
  a.mean = mean;
  a.sum = sum;
  a.min = lo;
  a.max = hi;
  a.var = sq / static_cast<double>(values.size());
  a.std_dev = std::sqrt(a.var);
  return a;
}

WindowTable build_base_table(const std::vector<ScoredTweet>& tweets,
                             const bars::BarSeries& series,
                             const sentiment::ScorerRegistry& registry,
                             const FeatureConfig& config) {
  std::vector<AttrSpec> attrs = resolve_attrs(registry, config);

  WindowTable table;
  table.columns = {"open", "high", "low", "close", "tickvol", "vol", "tweet_count"};
  for (const AttrSpec& attr : attrs) {
    for (const char* stat : kStatNames) {
      table.columns.push_back(attr.name + "_" + stat);
    }
  }

  auto buckets = bucket_tweets(tweets, series.bar_width_sec());

  for (const bars::Bar& bar : series.bars()) {
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(bar.open.to_double());
    row.push_back(bar.high.to_double());
    row.push_back(bar.low.to_double());
    row.push_back(bar.close.to_double());
    row.push_back(static_cast<double>(bar.tickvol));
    row.push_back(static_cast<double>(bar.vol));

    auto it = buckets.find(bar.timestamp);
    const std::vector<const ScoredTweet*>* group =
        it == buckets.end() ? nullptr : &it->second;
    row.push_back(group ? static_cast<double>(group->size()) : 0.0);

    std::vector<double> values;
    for (const AttrSpec& attr : attrs) {
      values.clear();
      if (group) {
        values.reserve(group->size());
        for (const ScoredTweet* t : *group) values.push_back(attr_value(attr, *t));
      }
      Aggregates a = aggregate_values(values);
      if (a.count == 0) {
        for (int k = 0; k < 6; ++k) row.push_back(kNaN);
        row.push_back(0.0);
      } else {
        row.push_back(a.mean);
        row.push_back(a.std_dev);
        row.push_back(a.min);
        row.push_back(a.max);
        row.push_back(a.sum);
        row.push_back(a.var);
        row.push_back(static_cast<double>(a.count));
      }
    }

    table.windows.push_back(bar.timestamp);
    table.rows.push_back(std::move(row));
  }
  return table;
}

WindowTable add_lags(const WindowTable& table, const LagSpec& spec,
                     int session_start_sec, int bar_width_sec,
                     std::size_t* dropped) {
  for (int lag : spec.lags) {
    if (lag <= 0) throw config_error("lags must be positive, got " + std::to_string(lag));
  }

  WindowTable out;
  out.columns = table.columns;
  for (int lag : spec.lags) {
    for (const std::string& col : table.columns) {
      out.columns.push_back(col + "_lag_" + std::to_string(lag));
    }
  }
  if (dropped) *dropped = 0;
  if (spec.lags.empty()) {
    out.windows = table.windows;
    out.rows = table.rows;
    return out;
  }

  int max_lag = *std::max_element(spec.lags.begin(), spec.lags.end());

  std::map<Instant, std::size_t> row_at;
  for (std::size_t i = 0; i < table.windows.size(); ++i) {
    row_at[table.windows[i]] = i;
  }

  for (std::size_t i = 0; i < table.windows.size(); ++i) {
    Instant w = table.windows[i];
    std::int64_t session_open = day_key(w) * 86400 + session_start_sec;
    std::int64_t grid_pos = (w.sec - session_open) / bar_width_sec;
    if (grid_pos < max_lag) {
      if (dropped) ++*dropped;
      continue;
    }

    std::vector<double> row = table.rows[i];
    row.reserve(out.columns.size());
    for (int lag : spec.lags) {
      Instant past = w - static_cast<std::int64_t>(lag) * bar_width_sec;
      auto it = row_at.find(past);
      if (it == row_at.end()) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) row.push_back(kNaN);
      } else {
        const std::vector<double>& src = table.rows[it->second];
        row.insert(row.end(), src.begin(), src.end());
      }
    }
    out.windows.push_back(w);
    out.rows.push_back(std::move(row));
  }
  return out;
}

FeatureMatrix attach_label(const WindowTable& table, const bars::BarSeries& series,
                           std::size_t* dropped) {
  FeatureMatrix matrix;
  matrix.columns = table.columns;
  if (dropped) *dropped = 0;
  for (std::size_t i = 0; i < table.windows.size(); ++i) {
    Instant w = table.windows[i];
    const bars::Bar* here = series.find(w);
    if (here == nullptr) {
      throw data_error("feature row at " + format_datetime(w) + " has no matching bar");
    }
    const bars::Bar* next = series.find(w + series.bar_width_sec());
    if (next == nullptr) {
      if (dropped) ++*dropped;
      continue;
    }
    matrix.windows.push_back(w);
    matrix.rows.push_back(table.rows[i]);
    matrix.labels.push_back(next->close > here->close ? 1 : 0);
  }
  return matrix;
}

AssembleResult assemble(const std::vector<ScoredTweet>& tweets,
                        const bars::BarSeries& series,
                        const sentiment::ScorerRegistry& registry,
                        const FeatureConfig& config, const LagSpec& lag_spec) {
  AssembleResult result;
  WindowTable base = build_base_table(tweets, series, registry, config);
  WindowTable lagged = add_lags(base, lag_spec, series.session_start_sec(),
                                series.bar_width_sec(), &result.rows_dropped_for_lags);
  result.matrix = attach_label(lagged, series, &result.rows_dropped_unlabeled);

  for (const std::string& col : result.matrix.columns) {
    ColumnInfo info;
    info.name = col;

    std::string base_name = col;
    std::size_t lag_pos = col.find("_lag_");
    if (lag_pos != std::string::npos) {
      info.kind = "lag";
      info.lag = std::stoi(col.substr(lag_pos + 5));
      base_name = col.substr(0, lag_pos);
    }

    static const char* kBarCols[] = {"open", "high", "low", "close", "tickvol", "vol"};
    bool matched = false;
    for (const char* b : kBarCols) {
      if (base_name == b) {
        if (info.kind.empty()) info.kind = "bar";
        info.attr = b;
        matched = true;
        break;
      }
    }
    if (!matched && base_name == "tweet_count") {
      if (info.kind.empty()) info.kind = "tweet_count";
      info.attr = "tweet_count";
      matched = true;
    }
    if (!matched) {
      for (const char* stat : kStatNames) {
        std::string suffix = std::string("_") + stat;
        if (base_name.size() > suffix.size() &&
            base_name.compare(base_name.size() - suffix.size(), suffix.size(), suffix) == 0) {
          if (info.kind.empty()) info.kind = "stat";
          info.attr = base_name.substr(0, base_name.size() - suffix.size());
          info.stat = stat;
          break;
        }
      }
    }
    result.schema.push_back(std::move(info));
  }
  result.schema.push_back({"label", "label", "", "", 0});
  return result;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix,
                      const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "window";
  for (const std::string& col : matrix.columns) out << "," << col;
  out << ",label\n";
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    out << format_datetime(matrix.windows[i]);
    for (double v : matrix.rows[i]) {
      out << ",";
      if (!std::isnan(v)) out << format_double(v);
    }
    out << "," << matrix.labels[i] << "\n";
  }
}

FeatureMatrix read_matrix_csv(std::istream& in) {
  FeatureMatrix matrix;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_dsv(line, ',');
    if (!have_header) {
      if (fields.size() < 2 || fields.front() != "window" || fields.back() != "label") {
        throw data_error("matrix header must run from \"window\" to \"label\"");
      }
      matrix.columns.assign(fields.begin() + 1, fields.end() - 1);
      have_header = true;
      continue;
    }
    if (fields.size() != matrix.columns.size() + 2) {
      throw data_error("matrix line " + std::to_string(line_no) + ": expected " +
                       std::to_string(matrix.columns.size() + 2) + " fields, got " +
                       std::to_string(fields.size()));
    }
    int y, mo, d, h, mi, s;
    parse_date_fields(fields[0].substr(0, 10), "YYYY-MM-DD", y, mo, d);
    parse_time_fields(fields[0].size() > 11 ? fields[0].substr(11) : "", "HH:MM:SS",
                      h, mi, s);
    matrix.windows.push_back(make_instant({y, mo, d, h, mi, s}));

    std::vector<double> row;
    row.reserve(matrix.columns.size());
    for (std::size_t c = 1; c + 1 < fields.size(); ++c) {
      row.push_back(fields[c].empty() ? kNaN : parse_double(fields[c]));
    }
    matrix.rows.push_back(std::move(row));

    std::int64_t label = parse_int64(fields.back());
    if (label != 0 && label != 1) {
      throw data_error("matrix line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    matrix.labels.push_back(static_cast<int>(label));
  }
  if (!have_header) throw data_error("matrix file has no header");
  return matrix;
}

std::string ExploratoryReport::to_text() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu rows: up %zu (%.1f%%) / down %zu (%.1f%%)", rows, label_up,
                up_fraction * 100.0, label_down, down_fraction * 100.0);
  return buf;
}

ExploratoryReport exploratory_report(const FeatureMatrix& matrix,
                                     const std::vector<ScoredTweet>& tweets,
                                     const sentiment::ScorerRegistry& registry) {
  ExploratoryReport report;
  report.rows = matrix.labels.size();
  for (int label : matrix.labels) {
    if (label == 1) ++report.label_up;
    else ++report.label_down;
  }
  if (report.rows > 0) {
    report.up_fraction = static_cast<double>(report.label_up) / static_cast<double>(report.rows);
    report.down_fraction = static_cast<double>(report.label_down) / static_cast<double>(report.rows);
  }

  for (std::size_t i = 0; i < registry.size(); ++i) {
    ScorerPolarityCounts counts;
    counts.scorer_id = registry.scorers()[i].id;
    for (const ScoredTweet& t : tweets) {
      int p = t.sentiment.polarities[i];
      if (p < 0) ++counts.negative;
      else if (p > 0) ++counts.positive;
      else ++counts.neutral;
    }
    report.polarity_distribution.push_back(counts);
  }

  for (std::size_t c = 0; c < matrix.columns.size(); ++c) {
    ColumnCorrelation corr;
    corr.column = matrix.columns[c];
    double sum_x = 0, sum_y = 0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
      double x = matrix.rows[r][c];
      if (std::isnan(x)) continue;
      sum_x += x;
      sum_y += matrix.labels[r];
      ++n;
    }
    if (n >= 2) {
      double mean_x = sum_x / static_cast<double>(n);
      double mean_y = sum_y / static_cast<double>(n);
      double sxx = 0, syy = 0, sxy = 0;
      for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        double x = matrix.rows[r][c];
        if (std::isnan(x)) continue;
        double dx = x - mean_x;
        double dy = matrix.labels[r] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
      }
      if (sxx > 0 && syy > 0) {
        corr.value = sxy / std::sqrt(sxx * syy);
        corr.defined = true;
      }
    }
    report.label_correlations.push_back(std::move(corr));
  }
  return report;
}

}  // namespace tweetalpha::features
