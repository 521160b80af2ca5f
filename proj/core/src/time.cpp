#include "tweetalpha/time.hpp"

#include <cctype>
#include <cstdio>

#include "tweetalpha/error.hpp"

namespace tweetalpha {

namespace {

constexpr std::int64_t kDaySeconds = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

void check_date(std::string_view text, int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    throw data_error("invalid calendar date: \"" + std::string(text) + "\"");
  }
}

void check_time(std::string_view text, int h, int mi, int s) {
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) {
    throw data_error("invalid time of day: \"" + std::string(text) + "\"");
  }
}

}  // namespace

std::int64_t days_from_civil(int year, int month, int day) {
  year -= month <= 2;
  const std::int64_t era = floor_div(year, 400);
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, int& month, int& day) {
  days += 719468;
  const std::int64_t era = floor_div(days, 146097);
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

Instant make_instant(const CivilDateTime& c) {
  std::int64_t days = days_from_civil(c.year, c.month, c.day);
  return Instant{days * kDaySeconds + c.hour * 3600 + c.minute * 60 + c.second};
}

CivilDateTime civil_from(Instant t) {
  CivilDateTime c;
  std::int64_t days = floor_div(t.sec, kDaySeconds);
  int sod = static_cast<int>(t.sec - days * kDaySeconds);
  civil_from_days(days, c.year, c.month, c.day);
  c.hour = sod / 3600;
  c.minute = (sod % 3600) / 60;
  c.second = sod % 60;
  return c;
}

std::int64_t day_key(Instant t) { return floor_div(t.sec, kDaySeconds); }

int second_of_day(Instant t) {
  return static_cast<int>(t.sec - day_key(t) * kDaySeconds);
}

int weekday(Instant t) {
  std::int64_t days = day_key(t);
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days % 7) + 7 + 4) % 7);
}

Instant start_of_day_key(std::int64_t key) { return Instant{key * kDaySeconds}; }

std::string format_date(Instant t) {
  CivilDateTime c = civil_from(t);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

std::string format_time(Instant t) {
  CivilDateTime c = civil_from(t);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", c.hour, c.minute, c.second);
  return buf;
}

std::string format_datetime(Instant t) {
  return format_date(t) + " " + format_time(t);
}

namespace {

/// Walks `format`, collecting each run of an identical field letter as one
/// integer field with exactly run-length digits.
void parse_by_format(std::string_view text, std::string_view format,
                     std::string_view field_letters, int* out[]) {
  std::size_t ti = 0;
  std::size_t fi = 0;
  while (fi < format.size()) {
    char f = format[fi];
    std::size_t letter = field_letters.find(f);
    if (letter != std::string_view::npos) {
      std::size_t run = 0;
      while (fi + run < format.size() && format[fi + run] == f) ++run;
      int value = 0;
      for (std::size_t k = 0; k < run; ++k, ++ti) {
        if (ti >= text.size() || !std::isdigit(static_cast<unsigned char>(text[ti]))) {
          throw data_error("text \"" + std::string(text) +
                           "\" does not match format \"" + std::string(format) + "\"");
        }
        value = value * 10 + (text[ti] - '0');
      }
      *out[letter] = value;
      fi += run;
    } else {
      if (ti >= text.size() || text[ti] != f) {
        throw data_error("text \"" + std::string(text) +
                         "\" does not match format \"" + std::string(format) + "\"");
      }
      ++ti;
      ++fi;
    }
  }
  if (ti != text.size()) {
    throw data_error("trailing characters in \"" + std::string(text) +
                     "\" for format \"" + std::string(format) + "\"");
  }
}

}  // namespace

void parse_date_fields(std::string_view text, std::string_view format,
                       int& year, int& month, int& day) {
  int* out[] = {&year, &month, &day};
  parse_by_format(text, format, "YMD", out);
  check_date(text, year, month, day);
}

void parse_time_fields(std::string_view text, std::string_view format,
                       int& hour, int& minute, int& second) {
  hour = minute = second = 0;
  int* out[] = {&hour, &minute, &second};
  parse_by_format(text, format, "HMS", out);
  check_time(text, hour, minute, second);
}

int parse_time_of_day(std::string_view text) {
  int h = 0, m = 0, s = 0;
  if (text.size() == 5) {
    parse_time_fields(text, "HH:MM", h, m, s);
  } else {
    parse_time_fields(text, "HH:MM:SS", h, m, s);
  }
  return h * 3600 + m * 60 + s;
}

Instant parse_timestamp_utc(std::string_view text) {
  std::size_t t_pos = text.find_first_of("Tt");
  bool rfc = t_pos != std::string_view::npos && t_pos == 10;

  if (!rfc) {
    int y, mo, d, h, mi, s;
    if (text.size() != 19 || text[10] != ' ') {
      throw data_error("unrecognized timestamp: \"" + std::string(text) + "\"");
    }
    parse_date_fields(text.substr(0, 10), "YYYY-MM-DD", y, mo, d);
    parse_time_fields(text.substr(11), "HH:MM:SS", h, mi, s);
    return make_instant({y, mo, d, h, mi, s});
  }

  int y, mo, d, h, mi, s;
  parse_date_fields(text.substr(0, 10), "YYYY-MM-DD", y, mo, d);
  if (text.size() < 19) {
    throw data_error("unrecognized timestamp: \"" + std::string(text) + "\"");
  }
  parse_time_fields(text.substr(11, 8), "HH:MM:SS", h, mi, s);

  std::size_t i = 19;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      ++digits;
    }
    if (digits == 0) {
      throw data_error("unrecognized timestamp: \"" + std::string(text) + "\"");
    }
  }

  int offset_sec = 0;
  if (i < text.size()) {
    char c = text[i];
    if (c == 'Z' || c == 'z') {
      ++i;
    } else if (c == '+' || c == '-') {
      if (i + 6 > text.size() || text[i + 3] != ':') {
        throw data_error("unrecognized timestamp offset: \"" + std::string(text) + "\"");
      }
      int oh = 0, om = 0, dummy = 0;
      parse_time_fields(text.substr(i + 1, 5), "HH:MM", oh, om, dummy);
      offset_sec = oh * 3600 + om * 60;
      if (c == '-') offset_sec = -offset_sec;
      i += 6;
    }
  }
  if (i != text.size()) {
    throw data_error("trailing characters in timestamp: \"" + std::string(text) + "\"");
  }

  Instant local = make_instant({y, mo, d, h, mi, s});
  return local - offset_sec;
}

}  // namespace tweetalpha
