#include "mif/log_real.hpp"

#include <algorithm>
#include <numbers>

#include "mif/error.hpp"

namespace mif {

LogReal LogReal::from_log(double log_value) {
  if (std::isnan(log_value) || log_value == std::numeric_limits<double>::infinity())
    throw ParameterError("LogReal needs a finite logarithm");
  LogReal r;
  if (log_value == -std::numeric_limits<double>::infinity()) return r;
  r.log_value_ = log_value;
  r.is_zero_ = false;
  return r;
}

LogReal LogReal::from_value(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ParameterError("LogReal needs a finite non-negative value");
  if (value == 0.0) return zero();
  return from_log(std::log(value));
}

long double log_of(const mpz_class& value) {
  if (sgn(value) <= 0) throw ParameterError("log of a non-positive integer");
  long exp2 = 0;
  double mantissa = mpz_get_d_2exp(&exp2, value.get_mpz_t());
  return std::log(static_cast<long double>(mantissa)) +
         static_cast<long double>(exp2) * std::numbers::ln2_v<long double>;
}

LogReal LogReal::from_integer(const mpz_class& value) {
  if (sgn(value) < 0) throw ParameterError("LogReal needs a non-negative integer");
  if (sgn(value) == 0) return zero();
  return from_log(static_cast<double>(log_of(value)));
}

LogReal LogReal::from_rational(const mpq_class& value) {
  if (sgn(value) < 0) throw ParameterError("LogReal needs a non-negative rational");
  if (sgn(value) == 0) return zero();
  return from_log(static_cast<double>(log_of(value.get_num()) - log_of(value.get_den())));
}

LogReal LogReal::pow(double exponent) const {
  if (is_zero_) {
    if (exponent > 0) return zero();
    if (exponent == 0) return one();
    throw ParameterError("zero raised to a negative power");
  }
  return from_log(log_value_ * exponent);
}

LogReal operator*(LogReal a, LogReal b) {
  if (a.is_zero_ || b.is_zero_) return LogReal::zero();
  return LogReal::from_log(a.log_value_ + b.log_value_);
}

LogReal operator/(LogReal a, LogReal b) {
  if (b.is_zero_) throw ParameterError("LogReal division by zero");
  if (a.is_zero_) return LogReal::zero();
  return LogReal::from_log(a.log_value_ - b.log_value_);
}

LogReal operator+(LogReal a, LogReal b) {
  if (a.is_zero_) return b;
  if (b.is_zero_) return a;
  double hi = std::max(a.log_value_, b.log_value_), lo = std::min(a.log_value_, b.log_value_);
  return LogReal::from_log(hi + std::log1p(std::exp(lo - hi)));
}

LogReal log_sum(std::span<const LogReal> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const LogReal& t : terms)
    if (!t.is_zero()) hi = std::max(hi, t.log_value());
  if (hi == -std::numeric_limits<double>::infinity()) return LogReal::zero();
  long double acc = 0.0L;
  for (const LogReal& t : terms)
    if (!t.is_zero()) acc += std::exp(static_cast<long double>(t.log_value()) - hi);
  return LogReal::from_log(static_cast<double>(hi + std::log(acc)));
}

double relative_gap(LogReal a, LogReal b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.is_zero() || b.is_zero()) return std::numeric_limits<double>::infinity();
  return std::abs(std::expm1(a.log_value() - b.log_value()));
}

}  // namespace mif
