#include "mif/proof_checks.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mif/error.hpp"
#include "mif/forest_counts.hpp"

namespace mif {
namespace {

using ld = long double;
constexpr ld kPi = std::numbers::pi_v<long double>;

void check_f_range(int m, int k) {
  if (k < 2 || m < 1 || m > k - 1)
    throw ParameterError("f needs k >= 2 and 1 <= m <= k-1, got m=" + std::to_string(m) +
                         ", k=" + std::to_string(k));
}

void check_k_max(int k_max) {
  if (k_max < 3) throw ParameterError("k_max must be at least 3, got " + std::to_string(k_max));
}

mpz_class self_power(int x) {
  if (x <= 2) return 1;
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(x), static_cast<unsigned long>(x - 2));
  return r;
}

ld f_ld(int m, int k) { return std::exp(log_kernel(m, k)); }

ld v_ld(ld x, int k) {
  const ld kk = k;
  return std::pow(kk, 1.5L) / (std::pow(x, 2.5L) * std::pow(kk - x, 1.5L));
}

ld antiderivative_ld(ld x, int k) {
  const ld kk = k;
  return -2.0L * (kk * kk + 4.0L * kk * x - 8.0L * x * x) /
         (3.0L * std::pow(kk, 1.5L) * std::pow(x, 1.5L) * std::sqrt(kk - x));
}

enum class Kind {
  Strict,     // lhs < rhs; a tie is recorded as equality
  NonStrict,  // lhs <= rhs
  Identity,   // lhs == rhs
};

// Accumulates one ClaimStatus in place inside the report, so claims keep
// their declaration order.
class Tracker {
 public:
  Tracker(BoundCheckReport& report, std::string name, std::string statement, Kind kind)
      : report_(report), index_(report.claims.size()), kind_(kind) {
    ClaimStatus s;
    s.name = std::move(name);
    s.statement = std::move(statement);
    s.tightest_margin = std::numeric_limits<double>::infinity();
    report_.claims.push_back(std::move(s));
  }
  Tracker(const Tracker&) = delete;
  Tracker& operator=(const Tracker&) = delete;
  ~Tracker() {
    if (status().cases == 0) status().tightest_margin = 0.0;
  }

  // Floating comparison with relative margin (rhs - lhs) / max(|lhs|, |rhs|).
  void record(GridPoint at, ld lhs, ld rhs) {
    const ld scale = std::max(std::fabs(rhs), std::fabs(lhs));
    const ld margin = scale == 0.0L ? 0.0L : (rhs - lhs) / scale;
    int sign = 1;
    if (std::fabs(margin) <= kTieTolerance) sign = 0;
    else if (margin < 0) sign = -1;
    note(at, sign, static_cast<double>(lhs), static_cast<double>(rhs), static_cast<double>(margin));
  }

  // sign of rhs - lhs decided exactly by the caller.
  void note(GridPoint at, int sign, double lhs, double rhs, double margin) {
    ClaimStatus& st = status();
    ++st.cases;
    bool failed = false;
    switch (kind_) {
      case Kind::Strict:
        failed = sign < 0;
        if (sign == 0) {
          ++st.equalities;
          if (st.equality_cases.size() < kViolationSampleCap) st.equality_cases.push_back(at);
        }
        break;
      case Kind::NonStrict:
        failed = sign < 0;
        break;
      case Kind::Identity:
        failed = sign != 0;
        margin = -std::fabs(margin);
        break;
    }
    if (margin < st.tightest_margin) {
      st.tightest_margin = margin;
      st.tightest_at = at;
    }
    if (!failed) return;
    ++st.failures;
    Violation v{st.name, at, lhs, rhs};
    if (!st.first_failure) st.first_failure = v;
    st.last_failure = v;
    ++report_.total_violations;
    if (report_.violations.size() < kViolationSampleCap) report_.violations.push_back(std::move(v));
  }

  ClaimStatus& status() { return report_.claims[index_]; }

 private:
  BoundCheckReport& report_;
  std::size_t index_;
  Kind kind_;
};

int compare_sign(const mpq_class& lhs, const mpq_class& rhs) {
  const int c = cmp(rhs, lhs);
  return c > 0 ? 1 : c < 0 ? -1 : 0;
}

double rational_margin(const mpq_class& lhs, const mpq_class& rhs) {
  const mpq_class scale = std::max(mpq_class(abs(lhs)), mpq_class(abs(rhs)));
  if (scale == 0) return 0.0;
  mpq_class d = (rhs - lhs) / scale;
  return d.get_d();
}

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

constexpr mpfr_prec_t kStirlingPrecision = 4096;  // holds 300! exactly

// Fills lower = sqrt(2 pi n)(n/e)^n, upper = lower e^(1/(12n)), exact = n!.
void stirling_mpfr(int n, mpfr_ptr lower, mpfr_ptr exact, mpfr_ptr upper) {
  MpfrValue t(kStirlingPrecision), u(kStirlingPrecision);
  mpfr_const_pi(t.get(), MPFR_RNDN);
  mpfr_mul_ui(t.get(), t.get(), 2UL * static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
  mpfr_set_ui(u.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_log(u.get(), u.get(), MPFR_RNDN);
  mpfr_sub_ui(u.get(), u.get(), 1, MPFR_RNDN);
  mpfr_mul_ui(u.get(), u.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_exp(u.get(), u.get(), MPFR_RNDN);
  mpfr_mul(lower, t.get(), u.get(), MPFR_RNDN);

  mpfr_set_ui(u.get(), 1, MPFR_RNDN);
  mpfr_div_ui(u.get(), u.get(), 12UL * static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_exp(u.get(), u.get(), MPFR_RNDN);
  mpfr_mul(upper, lower, u.get(), MPFR_RNDN);

  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
  mpfr_set_z(exact, fact.get_mpz_t(), MPFR_RNDN);
}

double log_of(mpfr_ptr x) {
  MpfrValue t(kStirlingPrecision);
  mpfr_log(t.get(), x, MPFR_RNDN);
  return mpfr_get_d(t.get(), MPFR_RNDN);
}

double margin_of(mpfr_ptr lhs, mpfr_ptr rhs) {
  MpfrValue t(kStirlingPrecision);
  mpfr_sub(t.get(), rhs, lhs, MPFR_RNDN);
  mpfr_div(t.get(), t.get(), rhs, MPFR_RNDN);
  return mpfr_get_d(t.get(), MPFR_RNDN);
}

}  // namespace

const char* to_string(ClaimOutcome outcome) {
  switch (outcome) {
    case ClaimOutcome::Holds:
      return "holds";
    case ClaimOutcome::Equality:
      return "equality";
    case ClaimOutcome::Fails:
      return "fails";
  }
  return "?";
}

mpq_class f_exact(int m, int k) {
  check_f_range(m, k);
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(k - 1), static_cast<unsigned long>(m));
  mpq_class r(binom * self_power(m) * self_power(k - m), self_power(k));
  r.canonicalize();
  return r;
}

LogReal f_log(int m, int k) {
  check_f_range(m, k);
  return LogReal::from_log(static_cast<double>(log_kernel(m, k)));
}

double f_value(int m, int k) {
  check_f_range(m, k);
  return static_cast<double>(f_ld(m, k));
}

double v_envelope(double x, int k) {
  if (!(x > 0.0 && x < k)) throw ParameterError("v is defined on (0, k)");
  return static_cast<double>(v_ld(x, k));
}

double v_antiderivative(double x, int k) {
  if (!(x > 0.0 && x < k)) throw ParameterError("V is defined on (0, k)");
  return static_cast<double>(antiderivative_ld(x, k));
}

StirlingValues stirling_values(int n) {
  if (n < 1) throw ParameterError("Stirling bounds need n >= 1");
  MpfrValue lo(kStirlingPrecision), ex(kStirlingPrecision), up(kStirlingPrecision);
  stirling_mpfr(n, lo.get(), ex.get(), up.get());
  return {mpfr_get_d(lo.get(), MPFR_RNDN), mpfr_get_d(ex.get(), MPFR_RNDN),
          mpfr_get_d(up.get(), MPFR_RNDN)};
}

BoundCheckReport check_stirling_sandwich(int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo || n_hi > 300)
    throw ParameterError("Stirling range must satisfy 1 <= lo <= hi <= 300");
  BoundCheckReport r;
  r.check = "stirling_sandwich";
  r.k_range = {n_lo, n_hi};
  // Values in violations are natural logs: n! leaves double range.
  Tracker lower(r, "stirling_lower", "sqrt(2 pi n)(n/e)^n < n!", Kind::Strict);
  Tracker upper(r, "stirling_upper", "n! < sqrt(2 pi n)(n/e)^n e^(1/(12n))", Kind::Strict);
  MpfrValue lo(kStirlingPrecision), ex(kStirlingPrecision), up(kStirlingPrecision);
  for (int n = n_lo; n <= n_hi; ++n) {
    stirling_mpfr(n, lo.get(), ex.get(), up.get());
    const GridPoint at{n, 0, 0};
    const int s_lower = mpfr_cmp(ex.get(), lo.get());
    lower.note(at, s_lower > 0 ? 1 : s_lower < 0 ? -1 : 0, log_of(lo.get()), log_of(ex.get()),
               margin_of(lo.get(), ex.get()));
    const int s_upper = mpfr_cmp(up.get(), ex.get());
    upper.note(at, s_upper > 0 ? 1 : s_upper < 0 ? -1 : 0, log_of(ex.get()), log_of(up.get()),
               margin_of(ex.get(), up.get()));
  }
  r.worst_case = upper.status().tightest_at;
  return r;
}

BoundCheckReport check_f_upper_bound(int k_max) {
  check_k_max(k_max);
  BoundCheckReport r;
  r.check = "f_upper_bound";
  r.k_range = {3, k_max};
  {
    Tracker last(r, "last_term", "f(k-1,k) = (k-1)^(k-3)/k^(k-2) <= 1/k", Kind::Strict);
    Tracker step(r, "stirling_step",
                 "f(m,k) < sqrt(2pi(k-1))(k-1)^(k-1) e^(1/(12(k-1))) m^(m-2)(k-m)^(k-m-2) / "
                 "(2pi sqrt(m(k-1-m)) m^m (k-1-m)^(k-1-m) k^(k-2)), m <= k-2",
                 Kind::Strict);
    Tracker simplify(r, "stirling_simplification",
                     "the Stirling expression equals sqrt((k-1)/(2pi(k-1-m))) k^2/((k-m)(k-1)) "
                     "(1-1/k)^k (1+1/(k-m-1))^(k-m-1) e^(1/(12(k-1))) / m^(5/2)",
                     Kind::Identity);
    double c = 0.0;
    for (int k = 3; k <= k_max; ++k) {
      const ld kk = k;
      const mpq_class last_f = f_exact(k - 1, k);
      const mpq_class inv_k(1, k);
      last.note({k, 0, k - 1}, compare_sign(last_f, inv_k), last_f.get_d(), inv_k.get_d(),
                rational_margin(last_f, inv_k));
      for (int m = 1; m <= k - 1; ++m) {
        const ld mm = m;
        const ld lf = log_kernel(m, k);
        const ld scaled =
            std::exp(lf + 2.5L * std::log(mm) + 1.5L * std::log(kk - mm) - 1.5L * std::log(kk));
        if (scaled > c) {
          c = static_cast<double>(scaled);
          r.worst_case = {k, 0, m};
        }
        if (m > k - 2) continue;
        const ld a = kk - 1 - mm;
        const ld log_e1 = 0.5L * std::log(2 * kPi * (kk - 1)) + (kk - 1) * std::log(kk - 1) +
                          1.0L / (12 * (kk - 1)) - std::log(2 * kPi) - 0.5L * std::log(mm * a) -
                          mm * std::log(mm) - a * std::log(a) + (mm - 2) * std::log(mm) +
                          (kk - mm - 2) * std::log(kk - mm) - (kk - 2) * std::log(kk);
        const ld log_e2 = 0.5L * std::log((kk - 1) / (2 * kPi * a)) + 2 * std::log(kk) -
                          std::log(kk - mm) - std::log(kk - 1) + kk * std::log1p(-1 / kk) +
                          a * std::log1p(1 / a) + 1.0L / (12 * (kk - 1)) - 2.5L * std::log(mm);
        step.record({k, 0, m}, std::exp(lf), std::exp(log_e1));
        simplify.record({k, 0, m}, std::exp(log_e1 - log_e2), 1.0L);
      }
    }
    r.c_empirical = c;
  }
  return r;
}

BoundCheckReport check_convexity_integral_bound(int k_max) {
  check_k_max(k_max);
  BoundCheckReport r;
  r.check = "convexity_integral_bound";
  r.k_range = {3, k_max};
  r.ell_range = {2, k_max};
  {
    Tracker convex(r, "convexity", "v(x-h) - 2 v(x) + v(x+h) >= -1e-9 v(x) on (0,k)", Kind::NonStrict);
    Tracker sum_int(r, "sum_vs_integral",
                    "sum_{m=l-1}^{k-1} v(m) <= v(k-1) + v(l-1) + int_{l-1}^{k-1} v", Kind::NonStrict);
    Tracker end_k(r, "endpoint_k", "v(k-1) < 6/k", Kind::Strict);
    Tracker end_l(r, "endpoint_l", "v(l-1) < 3/(l-1)", Kind::Strict);
    Tracker t1_a(r, "k_tail_step1", "2(3k^2-12k+8)/(3k^(3/2)(k-1)^(3/2)) < 6(k-2)^2/(3k^(3/2)(k-1)^(3/2))",
                 Kind::Strict);
    Tracker t1_b(r, "k_tail_step2", "6(k-2)^2/(3k^(3/2)(k-1)^(3/2)) < 2 sqrt(k-1)/(3k sqrt(k))", Kind::Strict);
    Tracker t1_c(r, "k_tail_step3", "2 sqrt(k-1)/(3k sqrt(k)) < 2/(3k)", Kind::Strict);
    Tracker t1_all(r, "k_tail_overall", "2(3k^2-12k+8)/(3k^(3/2)(k-1)^(3/2)) < 2/(3k)", Kind::Strict);
    Tracker t2_a(r, "l_tail_step1",
                 "2(k^2+4ka-8a^2)/(3k^(3/2)a^(3/2)sqrt(k-a)) < 2[(k+2a)^2-16a^2]/(3k^(3/2)a sqrt((k-a)a)), "
                 "a = l-1",
                 Kind::Strict);
    Tracker t2_b(r, "l_tail_step2",
                 "2[(k+2a)^2-16a^2]/(3k^(3/2)a sqrt((k-a)a)) < 2(k-2a)(k+6a)/(k^2 a)", Kind::Strict);
    Tracker t2_c(r, "l_tail_step3", "2(k-2a)(k+6a)/(k^2 a) < 14/a", Kind::Strict);
    Tracker t2_all(r, "l_tail_overall", "2(k^2+4ka-8a^2)/(3k^(3/2)a^(3/2)sqrt(k-a)) < 14/a", Kind::Strict);
    Tracker final_bound(r, "final_bound", "sum_{m=l-1}^{k-1} v(m) < 6/k + 3/(l-1) + 2/(3k) + 14/(l-1)",
                        Kind::Strict);

    constexpr int kSteps = 64;
    for (int k = 3; k <= k_max; ++k) {
      const ld kk = k;
      const ld h = kk / (4 * kSteps);
      for (int j = 1; j < kSteps; ++j) {
        const ld x = kk * j / kSteps;
        const ld vx = v_ld(x, k);
        const ld d2 = v_ld(x - h, k) - 2 * vx + v_ld(x + h, k);
        convex.record({k, 0, j}, -d2, kConvexityTolerance * vx);
      }

      const ld vk = v_ld(kk - 1, k);
      end_k.record({k, 0, 0}, vk, 6.0L / kk);
      const ld t1 = 2 * (3 * kk * kk - 12 * kk + 8) / (3 * std::pow(kk, 1.5L) * std::pow(kk - 1, 1.5L));
      const ld t1b = 6 * (kk - 2) * (kk - 2) / (3 * std::pow(kk, 1.5L) * std::pow(kk - 1, 1.5L));
      const ld t1c = 2 * std::sqrt(kk - 1) / (3 * kk * std::sqrt(kk));
      t1_a.record({k, 0, 0}, t1, t1b);
      t1_b.record({k, 0, 0}, t1b, t1c);
      t1_c.record({k, 0, 0}, t1c, 2 / (3 * kk));
      t1_all.record({k, 0, 0}, t1, 2 / (3 * kk));

      // Suffix sums of v(m) over m = l-1..k-1.
      ld suffix = 0.0L;
      for (int ell = k; ell >= 2; --ell) {
        const ld a = ell - 1;
        suffix += v_ld(a, k);
        const GridPoint at{k, ell, 0};
        const ld va = v_ld(a, k);
        const ld integral = antiderivative_ld(kk - 1, k) - antiderivative_ld(a, k);
        sum_int.record(at, suffix, vk + va + integral);
        end_l.record(at, va, 3 / a);
        const ld t2 = 2 * (kk * kk + 4 * kk * a - 8 * a * a) /
                      (3 * std::pow(kk, 1.5L) * std::pow(a, 1.5L) * std::sqrt(kk - a));
        const ld t2b = 2 * ((kk + 2 * a) * (kk + 2 * a) - 16 * a * a) /
                       (3 * std::pow(kk, 1.5L) * a * std::sqrt((kk - a) * a));
        const ld t2c = 2 * (kk - 2 * a) * (kk + 6 * a) / (kk * kk * a);
        t2_a.record(at, t2, t2b);
        t2_b.record(at, t2b, t2c);
        t2_c.record(at, t2c, 14 / a);
        t2_all.record(at, t2, 14 / a);
        final_bound.record(at, suffix, 6 / kk + 3 / a + 2 / (3 * kk) + 14 / a);
      }
    }
    r.worst_case = sum_int.status().tightest_at;
  }
  return r;
}

BoundCheckReport check_sum_f_bound(int k_max) {
  check_k_max(k_max);
  BoundCheckReport r;
  r.check = "sum_f_bound";
  r.k_range = {3, k_max};
  r.ell_range = {2, k_max};
  double big_c = 0.0;
  {
    Tracker single(r, "single_term", "l = k: sum_m f(m,k) = f(k-1,k) <= 1/k", Kind::Strict);
    for (int k = 3; k <= k_max; ++k) {
      ld suffix = 0.0L;
      for (int ell = k; ell >= 2; --ell) {
        suffix += f_ld(ell - 1, k);
        if (ell == k) single.record({k, ell, k - 1}, suffix, 1.0L / k);
        const ld scaled = ell * suffix;
        if (scaled > big_c) {
          big_c = static_cast<double>(scaled);
          r.worst_case = {k, ell, 0};
        }
      }
    }
  }
  r.C_empirical = big_c;
  return r;
}

BoundCheckReport check_recursion_identity(int k_max, const Probability& p) {
  if (k_max < 2) throw ParameterError("k_max must be at least 2");
  BoundCheckReport r;
  r.check = "recursion_identity_p=" + p.text();
  r.k_range = {2, k_max};
  r.ell_range = {2, k_max};
  {
    Tracker identity(r, "recursion", "g(k,l,p) = ((1-p)/p) sum_{m=l-1}^{k-1} f(m,k) g(m,l-1,p)",
                     Kind::Identity);
    const mpq_class odds = p.odds_against();
    for (int k = 2; k <= k_max; ++k) {
      for (int ell = 2; ell <= k; ++ell) {
        mpq_class sum = 0;
        for (int m = ell - 1; m <= k - 1; ++m) sum += f_exact(m, k) * g_exact(m, ell - 1, p);
        const mpq_class rhs = odds * sum;
        const mpq_class lhs = g_exact(k, ell, p);
        identity.note({k, ell, 0}, lhs == rhs ? 0 : 1, lhs.get_d(), rhs.get_d(),
                      rational_margin(lhs, rhs));
      }
    }
  }
  return r;
}

MEllEstimate estimate_M_ell(int ell, const Probability& p, int k_max) {
  if (ell < 1) throw ParameterError("l must be positive");
  if (k_max < ell) throw ParameterError("k_max must be at least l");
  MEllEstimate e;
  e.ell = ell;
  e.limit = g_limit(ell, p.value());
  int arg = ell;
  for (int k = ell; k <= k_max; ++k) {
    const double v = g(k, ell, p).value();
    if (v > e.grid_max) {
      e.grid_max = v;
      arg = k;
    }
  }
  if (e.grid_max >= e.limit) {
    e.m_ell = e.grid_max;
    e.argmax_k = arg;
    e.at_grid_boundary = arg == k_max && ell < k_max;
  } else {
    e.m_ell = e.limit;
  }
  return e;
}

std::vector<MEllEstimate> estimate_M_series(int ell_max, const Probability& p, int k_max) {
  std::vector<MEllEstimate> out;
  for (int ell = 1; ell <= ell_max; ++ell) out.push_back(estimate_M_ell(ell, p, k_max));
  return out;
}

std::size_t VerificationSuite::total_violations() const {
  std::size_t total = 0;
  for (const auto& r : reports) total += r.total_violations;
  return total;
}

VerificationSuite run_verification_suite(const SuiteOptions& options) {
  std::vector<Probability> ps = options.ps;
  if (ps.empty())
    ps = {Probability::parse("0.3"), Probability::parse("0.5"), Probability::parse("0.7")};
  VerificationSuite s;
  s.k_max = options.k_max;
  for (const auto& p : ps) s.p_texts.push_back(p.text());
  s.reports.push_back(check_stirling_sandwich(1, options.stirling_max));
  s.reports.push_back(check_f_upper_bound(options.k_max));
  s.reports.push_back(check_convexity_integral_bound(options.k_max));
  s.reports.push_back(check_sum_f_bound(options.k_max));
  for (const auto& p : ps) {
    s.reports.push_back(check_recursion_identity(std::min(options.identity_k_max, options.k_max), p));
    s.m_series.push_back(
        estimate_M_series(std::min(options.m_ell_max, options.k_max), p, options.k_max));
  }
  return s;
}

}  // namespace mif
