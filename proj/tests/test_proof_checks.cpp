#include <doctest.h>

#include <cmath>

#include "mif/error.hpp"
#include "mif/forest_counts.hpp"
#include "mif/proof_checks.hpp"
#include "oracles.hpp"

using namespace mif;

namespace {

const ClaimStatus& claim(const BoundCheckReport& r, const std::string& name) {
  for (const auto& c : r.claims)
    if (c.name == name) return c;
  FAIL("no claim " << name);
  throw;
}

}  // namespace

TEST_CASE("f values") {
  CHECK(f_exact(3, 4) == mpq_class(3, 16));
  CHECK(f_exact(1, 2) == 1);
  CHECK(f_exact(2, 3) == mpq_class(1, 3));
  for (int k = 3; k <= 40; ++k) {
    mpz_class num, den;
    mpz_ui_pow_ui(num.get_mpz_t(), k - 1, k - 3);
    mpz_ui_pow_ui(den.get_mpz_t(), k, k - 2);
    mpq_class expected(num, den);
    expected.canonicalize();
    CHECK(f_exact(k - 1, k) == expected);
    for (int m = 1; m < k; ++m)
      CHECK(f_value(m, k) == doctest::Approx(f_exact(m, k).get_d()).epsilon(1e-13));
  }
  CHECK_THROWS_AS(f_exact(0, 3), ParameterError);
  CHECK_THROWS_AS(f_value(3, 3), ParameterError);
}

TEST_CASE("recursion identity in exact arithmetic") {
  for (const char* ptext : {"0.3", "0.5", "0.7"}) {
    const Probability p = Probability::parse(ptext);
    const auto r = check_recursion_identity(30, p);
    CHECK(r.total_violations == 0);
    CHECK(r.claims.front().cases == 29 * 30 / 2);
  }
}

TEST_CASE("Stirling sandwich") {
  const auto one = stirling_values(1);
  CHECK(one.lower == doctest::Approx(0.9221370088957891));
  CHECK(one.exact == 1.0);
  CHECK(one.upper == doctest::Approx(0.9221370088957891 * std::exp(1.0 / 12.0)));
  CHECK(one.upper == doctest::Approx(1.00227).epsilon(1e-5));
  const auto ten = stirling_values(10);
  CHECK(ten.lower == doctest::Approx(3598695.6187).epsilon(1e-10));
  CHECK(ten.exact == 3628800.0);
  CHECK(ten.upper == doctest::Approx(3628810.0516).epsilon(1e-10));
  const auto r = check_stirling_sandwich(1, 300);
  CHECK(r.total_violations == 0);
  CHECK(claim(r, "stirling_lower").outcome() == ClaimOutcome::Holds);
  CHECK(claim(r, "stirling_upper").outcome() == ClaimOutcome::Holds);
  CHECK(claim(r, "stirling_upper").cases == 300);
}

TEST_CASE("f upper bound") {
  const auto r50 = check_f_upper_bound(50);
  const auto r200 = check_f_upper_bound(200);
  REQUIRE(r50.c_empirical);
  REQUIRE(r200.c_empirical);
  CHECK(std::isfinite(*r200.c_empirical));
  CHECK(*r200.c_empirical > 0);
  CHECK(std::abs(*r200.c_empirical / *r50.c_empirical - 1) < 0.01);
  const auto& last = claim(r200, "last_term");
  CHECK(last.outcome() == ClaimOutcome::Equality);
  CHECK(last.equalities == 1);
  REQUIRE(last.equality_cases.size() == 1);
  CHECK(last.equality_cases[0].k == 3);
  CHECK(claim(r200, "stirling_step").outcome() == ClaimOutcome::Holds);
  CHECK(claim(r200, "stirling_simplification").outcome() == ClaimOutcome::Holds);
  CHECK(r200.total_violations == 0);
}

TEST_CASE("envelope v and its antiderivative") {
  // convexity at k=10, x=5
  const double h = 1e-2;
  CHECK(v_envelope(5 - h, 10) - 2 * v_envelope(5, 10) + v_envelope(5 + h, 10) > 0);
  for (int k : {3, 7, 20, 100, 200})
    for (int ell = 2; ell <= k; ell += std::max(1, k / 7)) {
      const double a = ell - 1, b = k - 1;
      if (a == b) continue;
      const long double quad = oracle::integrate_v(k, a, b);
      const double closed = v_antiderivative(b, k) - v_antiderivative(a, k);
      CHECK_MESSAGE(std::abs(closed / static_cast<double>(quad) - 1) < 1e-8, "k=" << k << " l=" << ell);
    }
  // l = 2, k = 100: sum of v(m) against endpoints plus integral
  double sum = 0;
  for (int m = 1; m <= 99; ++m) sum += v_envelope(m, 100);
  const double bound =
      v_envelope(99, 100) + v_envelope(1, 100) + v_antiderivative(99, 100) - v_antiderivative(1, 100);
  CHECK(sum <= bound);
}

TEST_CASE("convexity and tail estimates") {
  const auto r = check_convexity_integral_bound(200);
  for (const char* name : {"convexity", "sum_vs_integral", "endpoint_k", "endpoint_l", "k_tail_step1",
                           "k_tail_step3", "l_tail_step3", "l_tail_overall", "final_bound"})
    CHECK_MESSAGE(claim(r, name).outcome() == ClaimOutcome::Holds, name);
  // Steps of the displayed chains that do not hold pointwise.
  CHECK(claim(r, "k_tail_step2").outcome() == ClaimOutcome::Fails);
  CHECK(claim(r, "k_tail_step2").first_failure->at.k == 4);
  CHECK(claim(r, "k_tail_overall").outcome() == ClaimOutcome::Fails);
  CHECK(claim(r, "k_tail_overall").first_failure->at.k == 5);
  CHECK(claim(r, "l_tail_step1").failures == claim(r, "l_tail_step1").cases);
  CHECK(claim(r, "l_tail_step2").outcome() == ClaimOutcome::Fails);
  CHECK(r.total_violations > 0);
  CHECK(r.violations.size() == kViolationSampleCap);
}

TEST_CASE("sum of f bound") {
  const auto r100 = check_sum_f_bound(100);
  const auto r200 = check_sum_f_bound(200);
  REQUIRE(r200.C_empirical);
  CHECK(*r200.C_empirical == doctest::Approx(2.0));
  CHECK(r200.worst_case.k == 3);
  CHECK(r200.worst_case.ell == 2);
  CHECK(std::abs(*r200.C_empirical / *r100.C_empirical - 1) < 0.01);
  CHECK(*r200.C_empirical >= 1.0);
  CHECK(claim(r200, "single_term").outcome() == ClaimOutcome::Equality);
}

TEST_CASE("M_l estimates") {
  const Probability half = Probability::parse("0.5");
  const auto m1 = estimate_M_ell(1, half, 100);
  CHECK(m1.m_ell == doctest::Approx(1.0));
  const auto m2 = estimate_M_ell(2, half, 100);
  CHECK(m2.m_ell >= g_limit(2, 0.5));
  CHECK(std::isfinite(m2.m_ell));
  const auto series = estimate_M_series(40, half, 120);
  for (const auto& e : series) CHECK(e.m_ell >= e.limit);
  // ratio test: successive ratios eventually stay below 1
  for (std::size_t i = 10; i < series.size(); ++i) CHECK(series[i].m_ell / series[i - 1].m_ell < 1.0);
  double total = 0;
  for (const auto& e : series) total += e.m_ell;
  CHECK(std::isfinite(total));
}
