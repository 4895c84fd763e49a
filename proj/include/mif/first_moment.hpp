#pragma once

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "mif/log_real.hpp"
#include "mif/probability.hpp"

namespace mif {

struct ConcentrationPoints {
  int k_low = 0;
  int k_high = 0;  // always k_low + 1
};

// k_low = floor(2 log_{1/(1-p)}(e n p) + 2 + eps), k_high = k_low + 1.
ConcentrationPoints concentration_points(int n, const Probability& p, double eps);

// floor(2 log_{1/(1-p)}(e n p) + 4 + eps): the size at which forests are
// counted for the upper bound.
int upper_moment_size(int n, const Probability& p, double eps);

// Below this E[Y] the Markov step rules out forests of size K.
inline constexpr double kCertifyThreshold = 1e-3;

struct MomentQuery {
  int n = 0;
  Probability p = Probability::parse("0.5");
  double eps = 0.0;
  int K = 0;

  // K defaults to upper_moment_size(n, p, eps). Throws ParameterError unless
  // 2 <= K <= n.
  static MomentQuery make(int n, const Probability& p, double eps, std::optional<int> K = {});
};

struct MomentReport {
  MomentQuery query;
  LogReal e_x;
  std::vector<LogReal> e_y_by_ell;  // index l-1, l = 1..K
  LogReal e_y;                      // log-sum of e_y_by_ell
  LogReal e_y_factored;             // e_x * sum_l g(K, l, p)
  double ratio = 0.0;               // e_y / e_x
  double limit_ratio = 0.0;         // exp((1-p)/(2p))
  double route_gap = 0.0;           // relative_gap(e_y, e_y_factored)
  bool upper_bound_certified = false;
};

// E[Y_{n,l}] = C(n,K) phi(K,l) p^(K-l) (1-p)^(C(K,2)-K+l), E[X_n] its l = 1
// term, summed directly and through the factored form E[X_n] sum_l g(K,l,p).
MomentReport expected_forest_count(const MomentQuery& q);

struct RatioBound {
  double ratio = 0.0;
  double limit = 0.0;
  double difference = 0.0;  // ratio - limit
};

// ratio = sum_{l=1..K} g(K, l, p), limit = exp((1-p)/(2p)).
RatioBound ratio_and_bound(const MomentQuery& q);

struct ExactMoments {
  mpq_class e_x;
  std::vector<mpq_class> e_y_by_ell;
  mpq_class e_y;
};

inline constexpr int kExactMomentMaxN = 64;

// The same expectations as exact rationals; n <= kExactMomentMaxN.
ExactMoments exact_forest_count(const MomentQuery& q);

}  // namespace mif
