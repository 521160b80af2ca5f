#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tweetalpha {

/// Seconds on a civil timeline with a fixed UTC offset. There is no DST
/// handling anywhere in the pipeline: an Instant is "seconds since
/// 1970-01-01 00:00:00" interpreted in whatever offset the surrounding code
/// established. Shifting between offsets is plain arithmetic.
struct Instant {
  std::int64_t sec = 0;

  friend constexpr auto operator<=>(const Instant&, const Instant&) = default;
};

constexpr Instant operator+(Instant t, std::int64_t seconds) { return Instant{t.sec + seconds}; }
constexpr Instant operator-(Instant t, std::int64_t seconds) { return Instant{t.sec - seconds}; }
constexpr std::int64_t operator-(Instant a, Instant b) { return a.sec - b.sec; }

struct CivilDateTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

/// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

Instant make_instant(const CivilDateTime& c);
CivilDateTime civil_from(Instant t);

/// Calendar day index: floor(sec / 86400). Used as the trading-day key.
std::int64_t day_key(Instant t);
/// Seconds past local midnight, in [0, 86400).
int second_of_day(Instant t);
/// 0 = Sunday .. 6 = Saturday.
int weekday(Instant t);

Instant start_of_day_key(std::int64_t key);

std::string format_date(Instant t);       // "2021-10-27"
std::string format_time(Instant t);       // "13:30:00"
std::string format_datetime(Instant t);   // "2021-10-27 13:30:00"

/// Parses digits against a literal format where runs of Y/M/D/H/S letters
/// mark fields ("YYYY.MM.DD", "HH:MM:SS", "YYYY-MM-DD"). Every non-field
/// character must match exactly; every field must have exactly as many
/// digits as letters. Throws Error(data) with the offending text otherwise.
void parse_date_fields(std::string_view text, std::string_view format,
                       int& year, int& month, int& day);
void parse_time_fields(std::string_view text, std::string_view format,
                       int& hour, int& minute, int& second);

/// "HH:MM" or "HH:MM:SS" -> seconds past midnight.
int parse_time_of_day(std::string_view text);

/// RFC-3339 ("2021-10-27T13:30:05Z", fractional seconds ignored, offset
/// applied) or "YYYY-MM-DD HH:MM:SS" (taken as UTC). Result is a UTC instant.
Instant parse_timestamp_utc(std::string_view text);

}  // namespace tweetalpha
