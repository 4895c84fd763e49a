#include "mif/probability.hpp"

#include <cctype>
#include <utility>

#include "mif/error.hpp"

namespace mif {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

mpq_class parse_decimal(std::string_view s, std::string_view original) {
  auto bad = [&] { return ParameterError("malformed probability '" + std::string(original) + "'"); };
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool neg = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      neg = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (exp_part.empty() || exp_part.size() > 6 || !all_digits(exp_part)) throw bad();
    exponent = std::stol(std::string(exp_part));
    if (neg) exponent = -exponent;
  }
  std::string_view int_part = s, frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || !all_digits(int_part) || !all_digits(frac_part))
    throw bad();
  std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  mpq_class q;
  if (exponent >= 0) {
    q = mpq_class(mantissa * pow10(static_cast<unsigned long>(exponent)));
  } else {
    q = mpq_class(mantissa, pow10(static_cast<unsigned long>(-exponent)));
  }
  q.canonicalize();
  return q;
}

}  // namespace

Probability::Probability(mpq_class q, std::string text)
    : exact_(std::move(q)), value_(exact_.get_d()), text_(std::move(text)) {
  if (exact_ <= 0 || exact_ >= 1)
    throw ParameterError("probability must lie strictly between 0 and 1, got '" + text_ + "'");
}

Probability Probability::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParameterError("empty probability");
  mpq_class q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = trim(s.substr(0, slash)), den = trim(s.substr(slash + 1));
    if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den))
      throw ParameterError("malformed probability '" + std::string(text) + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParameterError("zero denominator in probability '" + std::string(text) + "'");
    q = mpq_class(mpz_class(std::string(num), 10), d);
    q.canonicalize();
  } else {
    q = parse_decimal(s, text);
  }
  return Probability(std::move(q), std::string(s));
}

Probability Probability::from_rational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return Probability(c, c.get_str());
}

mpq_class Probability::odds_against() const {
  mpq_class r = (1 - exact_) / exact_;
  r.canonicalize();
  return r;
}

std::uint64_t Probability::threshold64() const {
  mpz_class scaled = exact_.get_num();
  scaled <<= 64;
  scaled /= exact_.get_den();  // floor, both positive
  // p < 1 keeps this below 2^64.
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, scaled.get_mpz_t());
  return out;
}

}  // namespace mif
