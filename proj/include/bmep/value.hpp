#pragma once

#include "bmep/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace bmep {

/// Exact: rational arithmetic, integer-valued matrices only. Float: binary64.
enum class ValueMode { Exact, Float };

/// Relative tolerance for comparisons that involve a Float value.
inline constexpr double kFloatRelativeTolerance = 1e-9;

inline const char* to_string(ValueMode mode) { return mode == ValueMode::Exact ? "exact" : "float"; }

inline ValueMode parse_value_mode(const std::string& text) {
  if (text == "exact") return ValueMode::Exact;
  if (text == "float") return ValueMode::Float;
  throw std::invalid_argument("unknown value mode '" + text + "' (expected exact or float)");
}

/// A cost or weight that is either an exact rational or a binary64 approximation.
class Value {
 public:
  Value() : repr_(Rational(0)) {}
  Value(Rational exact) : repr_(std::move(exact)) {}
  Value(double approx) : repr_(approx) {}

  static Value zero(ValueMode mode) { return mode == ValueMode::Exact ? Value(Rational(0)) : Value(0.0); }

  ValueMode mode() const { return std::holds_alternative<Rational>(repr_) ? ValueMode::Exact : ValueMode::Float; }
  bool is_exact() const { return mode() == ValueMode::Exact; }

  const Rational& exact() const {
    if (auto* r = std::get_if<Rational>(&repr_)) return *r;
    throw std::logic_error("value is not exact");
  }
  double to_double() const {
    if (auto* r = std::get_if<Rational>(&repr_)) return bmep::to_double(*r);
    return std::get<double>(repr_);
  }

  /// Exact values print as terminating decimals or p/q; float values with 17 significant digits.
  std::string str() const {
    if (auto* r = std::get_if<Rational>(&repr_)) return to_exact_string(*r);
    std::ostringstream os;
    os.precision(17);
    os << std::get<double>(repr_);
    return os.str();
  }

  friend Value operator+(const Value& a, const Value& b) {
    if (a.is_exact() && b.is_exact()) return Value(Rational(a.exact() + b.exact()));
    return Value(a.to_double() + b.to_double());
  }
  friend Value operator-(const Value& a, const Value& b) {
    if (a.is_exact() && b.is_exact()) return Value(Rational(a.exact() - b.exact()));
    return Value(a.to_double() - b.to_double());
  }
  friend Value operator*(const Value& a, const Value& b) {
    if (a.is_exact() && b.is_exact()) return Value(Rational(a.exact() * b.exact()));
    return Value(a.to_double() * b.to_double());
  }

  /// Three-way comparison; exact when both sides are exact, tolerance-aware otherwise.
  friend int compare(const Value& a, const Value& b) {
    if (a.is_exact() && b.is_exact()) {
      if (a.exact() < b.exact()) return -1;
      return a.exact() > b.exact() ? 1 : 0;
    }
    double x = a.to_double(), y = b.to_double();
    double scale = std::max(std::abs(x), std::abs(y));
    if (std::abs(x - y) <= kFloatRelativeTolerance * scale) return 0;
    return x < y ? -1 : 1;
  }
  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Value& a, const Value& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Value& a, const Value& b) { return compare(a, b) > 0; }
  friend bool operator>=(const Value& a, const Value& b) { return compare(a, b) >= 0; }

 private:
  std::variant<Rational, double> repr_;
};

}  // namespace bmep
