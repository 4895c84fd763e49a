#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mif {

// An edge probability in the open interval (0,1), kept both as the exact
// rational it was written as and as a double.
//
// Accepted spellings: plain decimals ("0.5", ".25"), decimals with an
// exponent ("1e-3", "2.5E-1") and fractions ("1/3").
class Probability {
 public:
  static Probability parse(std::string_view text);
  static Probability from_rational(const mpq_class& q);

  const mpq_class& exact() const { return exact_; }
  double value() const { return value_; }
  // Text as given by the caller (whitespace trimmed). Seeds hash this string.
  const std::string& text() const { return text_; }

  // (1-p)/p exactly.
  mpq_class odds_against() const;
  // floor(p * 2^64): a uniform 64-bit draw below this value succeeds with
  // probability p up to 2^-64.
  std::uint64_t threshold64() const;

  friend bool operator==(const Probability& a, const Probability& b) {
    return a.exact_ == b.exact_;
  }

 private:
  Probability(mpq_class q, std::string text);

  mpq_class exact_;
  double value_ = 0.0;
  std::string text_;
};

}  // namespace mif
