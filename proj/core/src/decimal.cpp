#include "tweetalpha/decimal.hpp"

#include <cctype>
#include <cstdlib>
#include <ostream>

#include "tweetalpha/error.hpp"

namespace tweetalpha {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw runtime_error("decimal overflow in addition");
  }
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw runtime_error("decimal overflow in multiplication");
  }
  return out;
}

}  // namespace

Decimal Decimal::parse(std::string_view text) {
  std::string_view rest = text;
  bool negative = false;
  if (!rest.empty() && (rest.front() == '+' || rest.front() == '-')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  if (rest.empty()) {
    throw data_error("malformed decimal: \"" + std::string(text) + "\"");
  }

  std::int64_t whole = 0;
  std::size_t i = 0;
  if (rest[0] == '.') {
    throw data_error("malformed decimal: \"" + std::string(text) + "\"");
  }
  for (; i < rest.size() && rest[i] != '.'; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(rest[i]))) {
      throw data_error("malformed decimal: \"" + std::string(text) + "\"");
    }
    whole = checked_add(checked_mul(whole, 10), rest[i] - '0');
  }

  std::int64_t frac = 0;
  int frac_digits = 0;
  if (i < rest.size()) {
    ++i;  // skip '.'
    if (i == rest.size()) {
      throw data_error("malformed decimal: \"" + std::string(text) + "\"");
    }
    for (; i < rest.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(rest[i]))) {
        throw data_error("malformed decimal: \"" + std::string(text) + "\"");
      }
      if (++frac_digits > kFracDigits) {
        throw data_error("decimal has more than 6 fractional digits: \"" +
                         std::string(text) + "\"");
      }
      frac = frac * 10 + (rest[i] - '0');
    }
  }
  for (int d = frac_digits; d < kFracDigits; ++d) frac *= 10;

  std::int64_t units = checked_add(checked_mul(whole, kScale), frac);
  return from_units(negative ? -units : units);
}

std::string Decimal::to_string() const {
  std::int64_t u = units_;
  std::string sign;
  if (u < 0) {
    sign = "-";
    u = -u;
  }
  std::int64_t whole = u / kScale;
  std::int64_t frac = u % kScale;

  char frac_buf[kFracDigits + 1];
  for (int d = kFracDigits - 1; d >= 0; --d) {
    frac_buf[d] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  frac_buf[kFracDigits] = '\0';

  int keep = kFracDigits;
  while (keep > 2 && frac_buf[keep - 1] == '0') --keep;

  return sign + std::to_string(whole) + "." + std::string(frac_buf, frac_buf + keep);
}

Decimal Decimal::operator-() const {
  if (units_ == INT64_MIN) throw runtime_error("decimal overflow in negation");
  return from_units(-units_);
}

Decimal Decimal::operator+(Decimal rhs) const {
  return from_units(checked_add(units_, rhs.units_));
}

Decimal Decimal::operator-(Decimal rhs) const {
  return *this + (-rhs);
}

Decimal& Decimal::operator+=(Decimal rhs) {
  units_ = checked_add(units_, rhs.units_);
  return *this;
}

Decimal& Decimal::operator-=(Decimal rhs) {
  units_ = checked_add(units_, (-rhs).units_);
  return *this;
}

Decimal Decimal::operator*(std::int64_t count) const {
  return from_units(checked_mul(units_, count));
}

bool Decimal::divides_evenly(std::int64_t n) const {
  return n != 0 && units_ % n == 0;
}

Decimal Decimal::divided_by(std::int64_t n) const {
  if (n == 0) throw runtime_error("decimal division by zero");
  std::int64_t q = units_ / n;
  std::int64_t r = units_ % n;
  if (r == 0) return from_units(q);

  // Round half to even on the magnitude.
  std::int64_t abs_r = r < 0 ? -r : r;
  std::int64_t abs_n = n < 0 ? -n : n;
  bool result_negative = (units_ < 0) != (n < 0);
  std::int64_t abs_q = q < 0 ? -q : q;
  std::int64_t twice = abs_r * 2;
  if (twice > abs_n || (twice == abs_n && (abs_q % 2) == 1)) ++abs_q;
  return from_units(result_negative ? -abs_q : abs_q);
}

std::ostream& operator<<(std::ostream& os, Decimal d) {
  return os << d.to_string();
}

}  // namespace tweetalpha
