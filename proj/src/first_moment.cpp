#include "mif/first_moment.hpp"

#include <cmath>
#include <string>

#include "mif/error.hpp"
#include "mif/forest_counts.hpp"

namespace mif {
namespace {

long double log_base_odds(int n, const Probability& p) {
  const long double pv = p.value();
  return 2.0L * std::log(std::exp(1.0L) * n * pv) / -std::log1p(-pv);
}

void check_n(int n) {
  if (n < 1) throw ParameterError("n must be positive, got " + std::to_string(n));
}

long double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
}

// log phi(K, l); the l = 1 branch is shared with E[X] so both agree bitwise.
long double log_phi(int K, int ell) {
  if (ell == 1) return K <= 2 ? 0.0L : (K - 2) * std::log(static_cast<long double>(K));
  if (K <= kExactForestCap) return log_of(phi(K, ell));
  return shared_log_forest_table().log_ratio(K, ell) + (K - 2) * std::log(static_cast<long double>(K));
}

mpq_class rational_pow(const mpq_class& base, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

ConcentrationPoints concentration_points(int n, const Probability& p, double eps) {
  check_n(n);
  const int low = static_cast<int>(std::floor(log_base_odds(n, p) + 2.0L + eps));
  return {low, low + 1};
}

int upper_moment_size(int n, const Probability& p, double eps) {
  check_n(n);
  return static_cast<int>(std::floor(log_base_odds(n, p) + 4.0L + eps));
}

MomentQuery MomentQuery::make(int n, const Probability& p, double eps, std::optional<int> K) {
  check_n(n);
  MomentQuery q{n, p, eps, K ? *K : upper_moment_size(n, p, eps)};
  if (q.K < 2) throw ParameterError("K must be at least 2, got " + std::to_string(q.K));
  if (q.K > n)
    throw ParameterError("K = " + std::to_string(q.K) + " exceeds n = " + std::to_string(n));
  return q;
}

MomentReport expected_forest_count(const MomentQuery& q) {
  const int K = q.K;
  if (K < 2 || K > q.n)
    throw ParameterError("need 2 <= K <= n, got K=" + std::to_string(K) + ", n=" + std::to_string(q.n));
  const long double lp = std::log(static_cast<long double>(q.p.value()));
  const long double lq = std::log1p(-static_cast<long double>(q.p.value()));
  const long double lbin = log_binomial(q.n, K);
  const long long pairs = static_cast<long long>(K) * (K - 1) / 2;

  MomentReport r;
  r.query = q;
  r.e_y_by_ell.reserve(K);
  for (int ell = 1; ell <= K; ++ell) {
    const long long p_exp = K - ell;
    const long long q_exp = pairs - K + ell;
    const long double lv = lbin + log_phi(K, ell) + p_exp * lp + q_exp * lq;
    r.e_y_by_ell.push_back(LogReal::from_log(static_cast<double>(lv)));
  }
  r.e_x = r.e_y_by_ell.front();
  r.e_y = log_sum(r.e_y_by_ell);

  std::vector<LogReal> gs;
  gs.reserve(K);
  for (int ell = 1; ell <= K; ++ell) gs.push_back(g(K, ell, q.p));
  r.e_y_factored = r.e_x * log_sum(gs);

  r.ratio = (r.e_y / r.e_x).value();
  r.limit_ratio = g_sum_limit(q.p.value());
  r.route_gap = relative_gap(r.e_y, r.e_y_factored);
  r.upper_bound_certified = r.e_y < LogReal::from_value(kCertifyThreshold);
  return r;
}

RatioBound ratio_and_bound(const MomentQuery& q) {
  if (q.K < 2) throw ParameterError("K must be at least 2, got " + std::to_string(q.K));
  std::vector<LogReal> gs;
  gs.reserve(q.K);
  for (int ell = 1; ell <= q.K; ++ell) gs.push_back(g(q.K, ell, q.p));
  RatioBound b;
  b.ratio = log_sum(gs).value();
  b.limit = g_sum_limit(q.p.value());
  b.difference = b.ratio - b.limit;
  return b;
}

ExactMoments exact_forest_count(const MomentQuery& q) {
  if (q.n > kExactMomentMaxN)
    throw ParameterError("exact moments are limited to n <= " + std::to_string(kExactMomentMaxN));
  const int K = q.K;
  if (K < 2 || K > q.n)
    throw ParameterError("need 2 <= K <= n, got K=" + std::to_string(K) + ", n=" + std::to_string(q.n));
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(q.n), static_cast<unsigned long>(K));
  const mpq_class p = q.p.exact();
  const mpq_class one_minus = 1 - p;
  const unsigned long pairs = static_cast<unsigned long>(K) * (K - 1) / 2;

  ExactMoments m;
  for (int ell = 1; ell <= K; ++ell) {
    mpq_class v = rational_pow(p, K - ell) * rational_pow(one_minus, pairs - K + ell);
    v *= mpq_class(binom * phi(K, ell));
    m.e_y_by_ell.push_back(v);
    m.e_y += v;
  }
  m.e_x = m.e_y_by_ell.front();
  return m;
}

}  // namespace mif
