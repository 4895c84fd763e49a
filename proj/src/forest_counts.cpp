#include "mif/forest_counts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "mif/error.hpp"

namespace mif {
namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ParameterError("probability must lie strictly between 0 and 1, got " + std::to_string(p));
}

// x^(x-2), read as 1 for x in {1, 2}.
mpz_class cayley(int x) {
  if (x <= 2) return 1;
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(x), static_cast<unsigned long>(x - 2));
  return r;
}

long double self_power_log(int x) { return x <= 2 ? 0.0L : (x - 2) * std::log(static_cast<long double>(x)); }

}  // namespace

ForestCountTable::ForestCountTable(int k_cap) : cap_(k_cap) {
  if (k_cap < 1) throw ParameterError("forest table capacity must be positive");
  cayley_.push_back(0);
}

void ForestCountTable::grow_locked(int k) {
  while (static_cast<int>(cayley_.size()) <= k) cayley_.push_back(cayley(static_cast<int>(cayley_.size())));
  for (int kk = static_cast<int>(rows_.size()) + 1; kk <= k; ++kk) {
    std::vector<mpz_class> row(static_cast<std::size_t>(kk) + 1, 0);
    row[1] = cayley_[kk];
    // Split off the tree on vertex kk: it has kk-m vertices, the other m
    // vertices form a forest with one tree fewer.
    mpz_class binom = 1;  // C(kk-1, m)
    mpz_class weight;
    for (int m = 1; m <= kk - 1; ++m) {
      binom *= kk - m;
      binom /= m;
      weight = binom * cayley_[kk - m];
      const std::vector<mpz_class>& smaller = rows_[m - 1];
      for (int ell = 2; ell <= m + 1; ++ell)
        mpz_addmul(row[ell].get_mpz_t(), weight.get_mpz_t(), smaller[ell - 1].get_mpz_t());
    }
    rows_.push_back(std::move(row));
  }
}

void ForestCountTable::ensure(int k) {
  if (k < 1) throw ParameterError("forest counts need k >= 1, got " + std::to_string(k));
  if (k > cap_)
    throw ParameterError("k = " + std::to_string(k) + " exceeds the exact forest table cap " +
                         std::to_string(cap_));
  {
    std::shared_lock lock(mutex_);
    if (static_cast<int>(rows_.size()) >= k) return;
  }
  std::unique_lock lock(mutex_);
  grow_locked(k);
}

mpz_class ForestCountTable::phi(int k, int ell) {
  ensure(k);
  if (ell <= 0 || ell > k) return 0;
  std::shared_lock lock(mutex_);
  return rows_[k - 1][ell];
}

std::vector<mpz_class> ForestCountTable::row(int k) {
  ensure(k);
  std::shared_lock lock(mutex_);
  return rows_[k - 1];
}

void LogForestTable::grow_locked(int k_max, int ell_max) {
  while (static_cast<int>(log_fact_.size()) <= k_max) {
    const auto n = log_fact_.size();
    log_fact_.push_back(n == 0 ? 0.0L : log_fact_.back() + std::log(static_cast<long double>(n)));
  }
  if (static_cast<int>(rows_.size()) < ell_max) rows_.resize(ell_max);
  std::vector<long double> terms;
  // Row l only needs row l-1 up to k-1, so each row grows to k_max on its own.
  for (int ell = 1; ell <= ell_max; ++ell) {
    std::vector<long double>& row = rows_[ell - 1];
    const int first = static_cast<int>(row.size());
    if (first > k_max) continue;
    row.resize(static_cast<std::size_t>(k_max) + 1, kNegInf);
    for (int k = std::max(first, 1); k <= k_max; ++k) {
      if (ell == 1) {
        row[k] = 0.0L;
        continue;
      }
      if (k < ell) continue;
      const std::vector<long double>& prev = rows_[ell - 2];
      const long double base = log_factorial(k - 1) - self_power_log(k);
      terms.clear();
      long double hi = kNegInf;
      for (int m = ell - 1; m <= k - 1; ++m) {
        long double t = base - log_factorial(m) - log_factorial(k - 1 - m) + self_power_log(m) +
                        self_power_log(k - m) + prev[m];
        terms.push_back(t);
        hi = std::max(hi, t);
      }
      long double acc = 0.0L;
      for (long double t : terms) acc += std::exp(t - hi);
      row[k] = hi + std::log(acc);
    }
  }
}

void LogForestTable::ensure(int k_max, int ell_max) {
  {
    std::shared_lock lock(mutex_);
    if (ell_max <= static_cast<int>(rows_.size()) &&
        static_cast<int>(rows_[ell_max - 1].size()) > k_max)
      return;
  }
  std::unique_lock lock(mutex_);
  grow_locked(k_max, ell_max);
}

long double LogForestTable::log_ratio(int k, int ell) {
  if (k < 1) throw ParameterError("forest counts need k >= 1, got " + std::to_string(k));
  if (ell <= 0 || ell > k) return kNegInf;
  ensure(k, ell);
  std::shared_lock lock(mutex_);
  return rows_[ell - 1][k];
}

ForestCountTable& shared_forest_counts() {
  static ForestCountTable table;
  return table;
}

LogForestTable& shared_log_forest_table() {
  static LogForestTable table;
  return table;
}

long double log_kernel(int m, int k) {
  if (k < 2 || m < 1 || m > k - 1)
    throw ParameterError("kernel needs 1 <= m <= k-1, got m=" + std::to_string(m) +
                         ", k=" + std::to_string(k));
  auto lf = [](int n) { return std::lgamma(static_cast<long double>(n) + 1.0L); };
  return lf(k - 1) - lf(m) - lf(k - 1 - m) + self_power_log(m) + self_power_log(k - m) -
         self_power_log(k);
}

mpz_class phi(int k, int ell) { return shared_forest_counts().phi(k, ell); }

mpq_class g_exact(int k, int ell, const Probability& p) {
  if (k < 1 || ell < 1)
    throw ParameterError("g needs k >= 1 and l >= 1, got k=" + std::to_string(k) +
                         ", l=" + std::to_string(ell));
  if (ell > k) return 0;
  mpq_class odds = p.odds_against();
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), odds.get_num_mpz_t(), static_cast<unsigned long>(ell - 1));
  mpz_pow_ui(den.get_mpz_t(), odds.get_den_mpz_t(), static_cast<unsigned long>(ell - 1));
  mpq_class result(phi(k, ell) * num, cayley(k) * den);
  result.canonicalize();
  return result;
}

LogReal g_log(int k, int ell, double p) {
  check_probability(p);
  if (k < 1 || ell < 1)
    throw ParameterError("g needs k >= 1 and l >= 1, got k=" + std::to_string(k) +
                         ", l=" + std::to_string(ell));
  if (ell > k) return LogReal::zero();
  long double lr = shared_log_forest_table().log_ratio(k, ell);
  long double lodds = std::log((1.0L - p) / static_cast<long double>(p));
  return LogReal::from_log(static_cast<double>(lr + (ell - 1) * lodds));
}

LogReal g(int k, int ell, const Probability& p) {
  if (k <= kExactGCutoff) return LogReal::from_rational(g_exact(k, ell, p));
  return g_log(k, ell, p.value());
}

double g_limit(int ell, double p) {
  check_probability(p);
  if (ell < 1) throw ParameterError("g_limit needs l >= 1, got " + std::to_string(ell));
  const double rate = (1.0 - p) / (2.0 * p);
  if (ell == 1) return 1.0;
  return std::exp((ell - 1) * std::log(rate) - std::lgamma(static_cast<double>(ell)));
}

double g_sum_limit(double p) {
  check_probability(p);
  return std::exp((1.0 - p) / (2.0 * p));
}

std::vector<double> g_partial_sums(int k, const Probability& p) {
  if (k < 1) throw ParameterError("g needs k >= 1, got " + std::to_string(k));
  std::vector<LogReal> terms;
  std::vector<double> out;
  for (int ell = 1; ell <= k; ++ell) {
    terms.push_back(g(k, ell, p));
    out.push_back(log_sum(terms).value());
  }
  return out;
}

}  // namespace mif
