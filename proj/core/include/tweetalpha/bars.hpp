#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tweetalpha/decimal.hpp"
#include "tweetalpha/time.hpp"

namespace tweetalpha::bars {

/// One intraday OHLCV bar. Timestamp marks the bar's window start and is
/// aligned to the window grid (second 0, minute a multiple of width/60).
struct Bar {
  Instant timestamp;
  Decimal open, high, low, close;
  std::int64_t tickvol = 0;
  std::int64_t vol = 0;
  int spread = 0;  // carried through, unused by any computation

  friend bool operator==(const Bar&, const Bar&) = default;
};

struct BarFormatConfig {
  char delimiter = '\t';
  std::string date_format = "YYYY.MM.DD";
  std::string time_format = "HH:MM:SS";
  /// Offset of the timestamps in the file; bars are shifted into the
  /// pipeline-local offset at parse time.
  int file_tz_offset_hours = -3;
  int local_tz_offset_hours = -3;
  int session_start_sec = 10 * 3600 + 30 * 60;  // 10:30 local
  int session_end_sec = 16 * 3600 + 50 * 60;    // 16:50 local, exclusive
  int bar_width_sec = 300;
};

/// Largest grid instant <= t, where the grid is width-second slots counted
/// from midnight. Width must divide one hour evenly.
Instant floor_to_window(Instant t, int width_sec = 300);

class BarSeries {
 public:
  BarSeries() = default;
  /// Takes bars already validated and sorted strictly ascending.
  BarSeries(std::vector<Bar> sorted, int session_start_sec, int session_end_sec,
            int bar_width_sec);

  const std::vector<Bar>& bars() const { return bars_; }
  bool empty() const { return bars_.empty(); }
  std::size_t size() const { return bars_.size(); }

  int session_start_sec() const { return session_start_; }
  int session_end_sec() const { return session_end_; }
  int bar_width_sec() const { return width_; }

  /// Bar whose timestamp equals the window start, or nullptr. Throws
  /// Error(data) if `window` is not grid-aligned.
  const Bar* find(Instant window) const;

  /// Distinct day keys carrying at least one bar, ascending.
  std::vector<std::int64_t> trading_days() const;

  friend bool operator==(const BarSeries&, const BarSeries&) = default;

 private:
  std::vector<Bar> bars_;
  int session_start_ = 10 * 3600 + 30 * 60;
  int session_end_ = 16 * 3600 + 50 * 60;
  int width_ = 300;
};

struct BarParseResult {
  BarSeries series;
  std::size_t dropped_outside_session = 0;
};

/// Reads a delimiter-separated bar file. The header must name date, time,
/// open, high, low, close, tickvol, vol and spread (case-insensitive,
/// "<OPEN>"-style decorations stripped); extra columns are ignored. Every
/// malformed row fails with its line number. Out-of-session rows are dropped
/// and counted; duplicate timestamps are an error.
BarParseResult parse_bars(std::istream& in, const BarFormatConfig& config);

/// Canonical writer for the ingest artifact; parse_bars() inverts it.
void serialize_bars(std::ostream& out, const BarSeries& series,
                    const BarFormatConfig& config);

}  // namespace tweetalpha::bars
