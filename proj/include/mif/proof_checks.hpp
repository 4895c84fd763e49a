#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mif/log_real.hpp"
#include "mif/probability.hpp"

namespace mif {

// f(m, k) = C(k-1, m) m^(m-2) (k-m)^(k-m-2) / k^(k-2), with x^(x-2) read as 1
// for x in {1, 2}; 1 <= m <= k-1.
mpq_class f_exact(int m, int k);
LogReal f_log(int m, int k);
double f_value(int m, int k);

// v(x) = k^(3/2) / (x^(5/2) (k-x)^(3/2)) on (0, k) and the closed-form
// antiderivative V with V' = v:
//   V(x) = -2 (k^2 + 4kx - 8x^2) / (3 k^(3/2) x^(3/2) sqrt(k-x)).
double v_envelope(double x, int k);
double v_antiderivative(double x, int k);

// Relative margin below which a floating comparison counts as a tie.
inline constexpr double kTieTolerance = 1e-12;
// Second differences of v may dip this far below zero (relative to v).
inline constexpr double kConvexityTolerance = 1e-9;

enum class ClaimOutcome { Holds, Equality, Fails };
const char* to_string(ClaimOutcome outcome);

struct GridPoint {
  int k = 0;
  int ell = 0;  // 0 when the claim has no l
  int m = 0;    // 0 when the claim has no m
};

struct Violation {
  std::string claim;
  GridPoint at;
  double lhs = 0.0;
  double rhs = 0.0;
};

// One inequality checked over a grid: lhs < rhs strictly, or lhs == rhs
// (exactly, or within kTieTolerance for floating checks), or a failure.
struct ClaimStatus {
  std::string name;
  std::string statement;
  std::size_t cases = 0;
  std::size_t equalities = 0;
  std::size_t failures = 0;
  std::vector<GridPoint> equality_cases;  // first few
  std::optional<Violation> first_failure;
  std::optional<Violation> last_failure;
  // Smallest relative slack (rhs - lhs) / max(|lhs|, |rhs|) over the grid;
  // identities report minus the largest relative mismatch.
  double tightest_margin = 0.0;
  GridPoint tightest_at;

  ClaimOutcome outcome() const {
    return failures ? ClaimOutcome::Fails : equalities ? ClaimOutcome::Equality : ClaimOutcome::Holds;
  }
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

inline constexpr std::size_t kViolationSampleCap = 25;

struct BoundCheckReport {
  std::string check;
  IntRange k_range;
  IntRange ell_range;  // {0, 0} when l does not enter the check
  GridPoint worst_case;
  std::optional<double> c_empirical;
  std::optional<double> C_empirical;
  std::vector<ClaimStatus> claims;
  // Up to kViolationSampleCap failing cases; total_violations counts all.
  std::vector<Violation> violations;
  std::size_t total_violations = 0;
};

struct StirlingValues {
  double lower = 0.0;  // sqrt(2 pi n) (n/e)^n
  double exact = 0.0;  // n!
  double upper = 0.0;  // lower * e^(1/(12n))
};
// Doubles for display; the check itself runs in MPFR against exact n!.
StirlingValues stirling_values(int n);

// sqrt(2 pi n)(n/e)^n < n! < sqrt(2 pi n)(n/e)^n e^(1/(12n)), n in [lo, hi],
// hi <= 300.
BoundCheckReport check_stirling_sandwich(int n_lo, int n_hi);

// c_empirical = max_{3<=k<=k_max, 1<=m<=k-1} f(m,k) m^(5/2) (k-m)^(3/2) / k^(3/2),
// the exact m = k-1 case f(k-1,k) <= 1/k, and the two Stirling-derived steps
// for m <= k-2.
BoundCheckReport check_f_upper_bound(int k_max);

// Convexity of v, the sum-vs-integral bound, and every displayed step of the
// tail estimate over 3 <= k <= k_max, 2 <= l <= k.
BoundCheckReport check_convexity_integral_bound(int k_max);

// C_empirical = max_{3<=k<=k_max, 2<=l<=k} l * sum_{m=l-1}^{k-1} f(m,k).
BoundCheckReport check_sum_f_bound(int k_max);

// Exact check of g(k,l,p) = ((1-p)/p) sum_{m=l-1}^{k-1} f(m,k) g(m,l-1,p) for
// 2 <= k <= k_max, 2 <= l <= k.
BoundCheckReport check_recursion_identity(int k_max, const Probability& p);

struct MEllEstimate {
  int ell = 0;
  double m_ell = 0.0;             // max(grid max, g_limit)
  double grid_max = 0.0;
  double limit = 0.0;
  std::optional<int> argmax_k;    // empty when the limit dominates the grid
  bool at_grid_boundary = false;  // argmax_k == k_max
};

// max_{k <= k_max} g(k, l, p) against g_limit(l, p).
MEllEstimate estimate_M_ell(int ell, const Probability& p, int k_max);
std::vector<MEllEstimate> estimate_M_series(int ell_max, const Probability& p, int k_max);

struct VerificationSuite {
  int k_max = 0;
  std::vector<std::string> p_texts;
  std::vector<BoundCheckReport> reports;
  std::vector<std::vector<MEllEstimate>> m_series;  // per p
  std::size_t total_violations() const;
};

struct SuiteOptions {
  int k_max = 200;
  int stirling_max = 300;
  int identity_k_max = 30;
  int m_ell_max = 40;
  std::vector<Probability> ps;  // defaults to 0.3, 0.5, 0.7
};

VerificationSuite run_verification_suite(const SuiteOptions& options);

}  // namespace mif
