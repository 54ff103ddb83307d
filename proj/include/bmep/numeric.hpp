#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bmep {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline Rational pow2(std::int64_t e) {
  if (e >= 0) return Rational(BigInt(1) << static_cast<unsigned>(e));
  return Rational(BigInt(1), BigInt(1) << static_cast<unsigned>(-e));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses a decimal literal ("3", "-2.50", "1e-3", "4.") into an exact rational.
inline Rational parse_decimal(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("malformed number '" + std::string(text) + "'"); };
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
  BigInt digits = 0;
  std::int64_t scale = 0;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits = digits * 10 + (text[pos++] - '0');
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits = digits * 10 + (text[pos++] - '0');
      --scale;
      any_digit = true;
    }
  }
  if (!any_digit) fail();
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) exp_negative = text[pos++] == '-';
    std::int64_t exponent = 0;
    bool exp_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      exponent = exponent * 10 + (text[pos++] - '0');
      exp_digit = true;
      if (exponent > 100000) fail();
    }
    if (!exp_digit) fail();
    scale += exp_negative ? -exponent : exponent;
  }
  if (pos != text.size()) fail();
  Rational value(digits);
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  value = scale < 0 ? value / Rational(ten_pow) : value * Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

/// Exact decimal text when the denominator has only factors 2 and 5, "p/q" otherwise.
inline std::string to_exact_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  BigInt rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();
  unsigned places = std::max(twos, fives);
  BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
  bool negative = scaled < 0;
  std::string digits = (negative ? BigInt(-scaled) : scaled).str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return (negative ? "-" : "") + digits;
}

/// Exact value mantissa * 2^exponent, normalized so the mantissa is odd (or zero with exponent 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(BigInt mantissa, std::int64_t exponent = 0) : mantissa_(std::move(mantissa)), exponent_(exponent) {
    normalize();
  }
  Dyadic(long long value) : Dyadic(BigInt(value)) {}

  static Dyadic power_of_two(std::int64_t e) { return Dyadic(BigInt(1), e); }

  const BigInt& mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }
  bool is_zero() const { return mantissa_ == 0; }

  Rational to_rational() const {
    return Rational(mantissa_) * pow2(exponent_);
  }
  double to_double() const {
    if (mantissa_ == 0) return 0.0;
    // Keep the leading 64 bits so huge mantissas do not overflow the conversion.
    unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(mantissa_))) + 1;
    unsigned drop = bits > 64 ? bits - 64 : 0;
    double head = BigInt(mantissa_ >> drop).convert_to<double>();
    return std::ldexp(head, static_cast<int>(exponent_ + drop));
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.exponent_ <= b.exponent_) {
      return Dyadic(a.mantissa_ + (b.mantissa_ << static_cast<unsigned>(b.exponent_ - a.exponent_)), a.exponent_);
    }
    return b + a;
  }
  friend Dyadic operator-(const Dyadic& a) {
    Dyadic r = a;
    r.mantissa_ = -r.mantissa_;
    return r;
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
  }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    Dyadic d = a - b;
    if (d.mantissa_ < 0) return std::strong_ordering::less;
    if (d.mantissa_ > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  void normalize() {
    if (mantissa_ == 0) {
      exponent_ = 0;
      return;
    }
    auto shift = boost::multiprecision::lsb(boost::multiprecision::abs(mantissa_));
    if (shift > 0) {
      mantissa_ >>= shift;  // exact: the low bits are zero
      exponent_ += static_cast<std::int64_t>(shift);
    }
  }

  BigInt mantissa_ = 0;
  std::int64_t exponent_ = 0;
};

}  // namespace bmep
