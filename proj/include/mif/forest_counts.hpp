#pragma once

#include <deque>
#include <shared_mutex>
#include <vector>

#include <gmpxx.h>

#include "mif/log_real.hpp"
#include "mif/probability.hpp"

namespace mif {

// Largest k for which exact forest counts are tabulated.
inline constexpr int kExactForestCap = 512;
// g(k, l, p) is evaluated in exact rationals up to this k, in log space above.
inline constexpr int kExactGCutoff = 64;

// phi(k, l): number of forests with l trees on k labelled vertices, as exact
// integers, filled row by row from
//
//   phi(k, 1) = k^(k-2)                      (1 for k = 1, 2)
//   phi(k, l) = sum_{m=l-1}^{k-1} C(k-1, m) (k-m)^(k-m-2) phi(m, l-1)
//
// which splits off the tree containing vertex k. Rows grow on demand under a
// writer lock; reads take a shared lock.
class ForestCountTable {
 public:
  explicit ForestCountTable(int k_cap = kExactForestCap);

  int cap() const { return cap_; }
  // Zero for l <= 0 or l > k. Throws ParameterError for k < 1 or k > cap().
  mpz_class phi(int k, int ell);
  std::vector<mpz_class> row(int k);
  void ensure(int k);

 private:
  void grow_locked(int k);

  int cap_;
  std::shared_mutex mutex_;
  std::deque<std::vector<mpz_class>> rows_;  // rows_[k-1][l], l = 0..k
  std::vector<mpz_class> cayley_;            // cayley_[j] = j^(j-2), j >= 1
};

// Log-space companion: log(phi(k, l) / k^(k-2)) via the same recursion
// normalised by k^(k-2),
//
//   h(k, l) = sum_m f(m, k) h(m, l-1),  f(m,k) = C(k-1,m) m^(m-2) (k-m)^(k-m-2) / k^(k-2)
//
// with every term summed by log-sum-exp in long double. Unbounded in k; cost
// is O(l_max * k_max^2); row l is only extended as far as it is asked for.
class LogForestTable {
 public:
  // -infinity when phi(k, l) = 0.
  long double log_ratio(int k, int ell);
  void ensure(int k_max, int ell_max);

 private:
  void grow_locked(int k_max, int ell_max);
  long double log_factorial(int n) const { return log_fact_[n]; }

  std::shared_mutex mutex_;
  std::vector<std::vector<long double>> rows_;  // rows_[l-1][k]
  std::vector<long double> log_fact_;
};

ForestCountTable& shared_forest_counts();
LogForestTable& shared_log_forest_table();

// log f(m, k) with x^(x-2) read as 1 for x in {1, 2}; 1 <= m <= k-1.
long double log_kernel(int m, int k);

mpz_class phi(int k, int ell);

// g(k, l, p) = phi(k, l) ((1-p)/p)^(l-1) / k^(k-2).
mpq_class g_exact(int k, int ell, const Probability& p);
LogReal g_log(int k, int ell, double p);
// Exact path for k <= kExactGCutoff, log path above.
LogReal g(int k, int ell, const Probability& p);

// lim_{k->inf} g(k, l, p) = ((1-p)/(2p))^(l-1) / (l-1)!.
double g_limit(int ell, double p);
// sum_{l>=1} g_limit(l, p) = exp((1-p)/(2p)).
double g_sum_limit(double p);
// Partial sums sum_{l<=L} g(k, l, p) for L = 1..k.
std::vector<double> g_partial_sums(int k, const Probability& p);

}  // namespace mif
