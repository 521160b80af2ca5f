#include "tweetalpha/bars.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "tweetalpha/dsv.hpp"
#include "tweetalpha/error.hpp"

namespace tweetalpha::bars {

namespace {

constexpr const char* kColumns[] = {"date", "time",    "open", "high",
                                    "low",  "close",   "tickvol", "vol",
                                    "spread"};
constexpr int kDate = 0, kTime = 1, kOpen = 2, kHigh = 3, kLow = 4, kClose = 5,
              kTickvol = 6, kVol = 7, kSpread = 8;

void check_width(int width_sec) {
  if (width_sec <= 0 || 3600 % width_sec != 0) {
    throw config_error("bar width must divide one hour evenly, got " +
                       std::to_string(width_sec) + "s");
  }
}

std::string line_context(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

/// Inverse of parse_by_format: field letters expand to zero-padded digits.
std::string format_fields(std::string_view format, std::string_view letters,
                          const int values[]) {
  std::string out;
  std::size_t fi = 0;
  while (fi < format.size()) {
    char f = format[fi];
    std::size_t letter = letters.find(f);
    if (letter == std::string_view::npos) {
      out.push_back(f);
      ++fi;
      continue;
    }
    std::size_t run = 0;
    while (fi + run < format.size() && format[fi + run] == f) ++run;
    std::string digits = std::to_string(values[letter]);
    while (digits.size() < run) digits.insert(digits.begin(), '0');
    out += digits;
    fi += run;
  }
  return out;
}

}  // namespace

Instant floor_to_window(Instant t, int width_sec) {
  check_width(width_sec);
  std::int64_t rem = t.sec % width_sec;
  if (rem < 0) rem += width_sec;
  return Instant{t.sec - rem};
}

BarSeries::BarSeries(std::vector<Bar> sorted, int session_start_sec,
                     int session_end_sec, int bar_width_sec)
    : bars_(std::move(sorted)),
      session_start_(session_start_sec),
      session_end_(session_end_sec),
      width_(bar_width_sec) {
  check_width(width_);
}

const Bar* BarSeries::find(Instant window) const {
  if (window.sec % width_ != 0) {
    throw data_error("bar lookup at unaligned instant " + format_datetime(window));
  }
  auto it = std::lower_bound(
      bars_.begin(), bars_.end(), window,
      [](const Bar& b, Instant w) { return b.timestamp < w; });
  if (it == bars_.end() || it->timestamp != window) return nullptr;
  return &*it;
}

std::vector<std::int64_t> BarSeries::trading_days() const {
  std::vector<std::int64_t> days;
  for (const Bar& b : bars_) {
    std::int64_t key = day_key(b.timestamp);
    if (days.empty() || days.back() != key) days.push_back(key);
  }
  return days;
}

BarParseResult parse_bars(std::istream& in, const BarFormatConfig& config) {
  check_width(config.bar_width_sec);
  if (config.session_start_sec < 0 || config.session_end_sec > 86400 ||
      config.session_start_sec >= config.session_end_sec) {
    throw config_error("invalid session bounds");
  }

  std::string line;
  std::size_t line_no = 0;
  if (!read_line(in, line)) {
    throw data_error("bar file is empty (header row required)");
  }
  ++line_no;

  std::vector<std::string> header = split_dsv(line, config.delimiter);
  int column_index[9];
  std::fill(std::begin(column_index), std::end(column_index), -1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = normalize_header_name(header[i]);
    for (int c = 0; c < 9; ++c) {
      if (name == kColumns[c]) {
        if (column_index[c] != -1) {
          throw data_error("duplicate column \"" + name + "\" in bar header");
        }
        column_index[c] = static_cast<int>(i);
      }
    }
  }
  for (int c = 0; c < 9; ++c) {
    if (column_index[c] == -1) {
      throw data_error(std::string("bar header is missing column \"") +
                       kColumns[c] + "\"");
    }
  }

  const std::int64_t tz_shift =
      static_cast<std::int64_t>(config.local_tz_offset_hours -
                                config.file_tz_offset_hours) *
      3600;

  std::vector<Bar> out;
  std::size_t dropped = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_dsv(line, config.delimiter);
    if (fields.size() != header.size()) {
      throw data_error(line_context(line_no) + "expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }

    Bar bar;
    try {
      int y, mo, d, h, mi, s;
      parse_date_fields(fields[column_index[kDate]], config.date_format, y, mo, d);
      parse_time_fields(fields[column_index[kTime]], config.time_format, h, mi, s);
      bar.timestamp = make_instant({y, mo, d, h, mi, s}) + tz_shift;
      bar.open = Decimal::parse(fields[column_index[kOpen]]);
      bar.high = Decimal::parse(fields[column_index[kHigh]]);
      bar.low = Decimal::parse(fields[column_index[kLow]]);
      bar.close = Decimal::parse(fields[column_index[kClose]]);
      bar.tickvol = parse_int64(fields[column_index[kTickvol]]);
      bar.vol = parse_int64(fields[column_index[kVol]]);
      bar.spread = static_cast<int>(parse_int64(fields[column_index[kSpread]]));
    } catch (const Error& e) {
      throw data_error(line_context(line_no) + e.what());
    }

    if (bar.timestamp.sec % config.bar_width_sec != 0) {
      throw data_error(line_context(line_no) + "timestamp " +
                       format_datetime(bar.timestamp) +
                       " is not aligned to the " +
                       std::to_string(config.bar_width_sec) + "s grid");
    }
    Decimal zero;
    if (bar.open <= zero || bar.high <= zero || bar.low <= zero || bar.close <= zero) {
      throw data_error(line_context(line_no) + "non-positive price");
    }
    Decimal oc_min = std::min(bar.open, bar.close);
    Decimal oc_max = std::max(bar.open, bar.close);
    if (bar.low > oc_min || bar.high < oc_max || bar.low > bar.high) {
      throw data_error(line_context(line_no) +
                       "OHLC range violation (low " + bar.low.to_string() +
                       ", high " + bar.high.to_string() + ", open " +
                       bar.open.to_string() + ", close " + bar.close.to_string() + ")");
    }
    if (bar.tickvol < 0 || bar.vol < 0) {
      throw data_error(line_context(line_no) + "negative volume");
    }

    int sod = second_of_day(bar.timestamp);
    if (sod < config.session_start_sec || sod >= config.session_end_sec) {
      ++dropped;
      continue;
    }
    out.push_back(bar);
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Bar& a, const Bar& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].timestamp == out[i - 1].timestamp) {
      throw data_error("duplicate bar timestamp " +
                       format_datetime(out[i].timestamp));
    }
  }

  return BarParseResult{
      BarSeries(std::move(out), config.session_start_sec,
                config.session_end_sec, config.bar_width_sec),
      dropped};
}

void serialize_bars(std::ostream& out, const BarSeries& series,
                    const BarFormatConfig& config) {
  const char d = config.delimiter;
  out << "<DATE>" << d << "<TIME>" << d << "<OPEN>" << d << "<HIGH>" << d
      << "<LOW>" << d << "<CLOSE>" << d << "<TICKVOL>" << d << "<VOL>" << d
      << "<SPREAD>\n";
  const std::int64_t tz_shift =
      static_cast<std::int64_t>(config.local_tz_offset_hours -
                                config.file_tz_offset_hours) *
      3600;
  for (const Bar& b : series.bars()) {
    Instant file_time = b.timestamp - tz_shift;
    CivilDateTime c = civil_from(file_time);
    const int date_vals[] = {c.year, c.month, c.day};
    const int time_vals[] = {c.hour, c.minute, c.second};
    out << format_fields(config.date_format, "YMD", date_vals) << d
        << format_fields(config.time_format, "HMS", time_vals) << d
        << b.open.to_string() << d
        << b.high.to_string() << d << b.low.to_string() << d
        << b.close.to_string() << d << b.tickvol << d << b.vol << d
        << b.spread << "\n";
  }
}

}  // namespace tweetalpha::bars
