#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace tweetalpha {

/// Exact fixed-point decimal with 6 fractional digits (micro-units).
///
/// Prices and P&L never touch binary floating point: parsing keeps the
/// written digits, arithmetic is checked int64, and formatting reproduces
/// the value exactly (at least two fractional digits, trailing zeros past
/// the second trimmed). to_double() exists only for feature columns where
/// approximation is acceptable.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000;  // 10^6
  static constexpr int kFracDigits = 6;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }

  static constexpr Decimal from_int(std::int64_t whole) {
    return from_units(whole * kScale);
  }

  /// Parses "123", "-4.56", "+0.000001". Throws Error(data) on anything else,
  /// on more than 6 fractional digits, or on overflow.
  static Decimal parse(std::string_view text);

  constexpr std::int64_t units() const { return units_; }

  double to_double() const { return static_cast<double>(units_) / kScale; }

  /// "88.82", "-0.05", "28.105"; at least two fractional digits.
  std::string to_string() const;

  Decimal operator-() const;
  Decimal operator+(Decimal rhs) const;
  Decimal operator-(Decimal rhs) const;
  Decimal& operator+=(Decimal rhs);
  Decimal& operator-=(Decimal rhs);

  /// Scale by an integer count (e.g. lot size). Checked.
  Decimal operator*(std::int64_t count) const;

  /// True when this value divided by n leaves no remainder in micro-units.
  bool divides_evenly(std::int64_t n) const;

  /// Exact division when divides_evenly(n); otherwise rounds half to even.
  Decimal divided_by(std::int64_t n) const;

  constexpr auto operator<=>(const Decimal&) const = default;

 private:
  std::int64_t units_ = 0;
};

std::ostream& operator<<(std::ostream& os, Decimal d);

}  // namespace tweetalpha
