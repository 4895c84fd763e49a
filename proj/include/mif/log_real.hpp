#pragma once

#include <cmath>
#include <limits>
#include <span>

#include <gmpxx.h>

namespace mif {

// Agreement tolerances used across the numeric modules, as relative
// differences |a/b - 1|.
namespace tolerance {
// Exact-rational vs log-space evaluation of the same quantity (12 digits).
inline constexpr double kExactVsLog = 5e-12;
// Two algebraically identical log-space routes (10 digits).
inline constexpr double kTwoRoutes = 5e-10;
}  // namespace tolerance

// A non-negative real stored as its natural logarithm, for quantities such as
// k^(k-2) or C(n,K) p^(K-1) that leave double range. Zero is a flag rather
// than -infinity so that products with zero stay exact.
class LogReal {
 public:
  LogReal() = default;  // zero

  static LogReal zero() { return {}; }
  static LogReal one() { return from_log(0.0); }
  static LogReal from_log(double log_value);
  // Throws ParameterError for negative or non-finite input.
  static LogReal from_value(double value);
  static LogReal from_integer(const mpz_class& value);
  static LogReal from_rational(const mpq_class& value);

  bool is_zero() const { return is_zero_; }
  // -infinity for zero.
  double log_value() const {
    return is_zero_ ? -std::numeric_limits<double>::infinity() : log_value_;
  }
  // exp(log_value); overflows to +inf / underflows to 0 outside double range.
  double value() const { return is_zero_ ? 0.0 : std::exp(log_value_); }

  LogReal pow(double exponent) const;

  friend LogReal operator*(LogReal a, LogReal b);
  friend LogReal operator/(LogReal a, LogReal b);  // throws on division by zero
  friend LogReal operator+(LogReal a, LogReal b);
  LogReal& operator*=(LogReal b) { return *this = *this * b; }
  LogReal& operator/=(LogReal b) { return *this = *this / b; }
  LogReal& operator+=(LogReal b) { return *this = *this + b; }

  friend bool operator==(LogReal a, LogReal b) {
    return a.is_zero_ == b.is_zero_ && (a.is_zero_ || a.log_value_ == b.log_value_);
  }
  friend bool operator<(LogReal a, LogReal b) {
    if (b.is_zero_) return false;
    return a.is_zero_ || a.log_value_ < b.log_value_;
  }
  friend bool operator>(LogReal a, LogReal b) { return b < a; }
  friend bool operator<=(LogReal a, LogReal b) { return !(b < a); }
  friend bool operator>=(LogReal a, LogReal b) { return !(a < b); }

 private:
  double log_value_ = 0.0;
  bool is_zero_ = true;
};

// Sum by log-sum-exp around the largest term.
LogReal log_sum(std::span<const LogReal> terms);

// |a/b - 1|, computed from the log difference; 0 when both are zero and
// +inf when exactly one is.
double relative_gap(LogReal a, LogReal b);

// Natural log of a positive big integer, accurate to a few ulps.
long double log_of(const mpz_class& value);

}  // namespace mif
