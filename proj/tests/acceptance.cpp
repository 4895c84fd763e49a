// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [criterion ...]    (default: all of 1..8)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mif/first_moment.hpp"
#include "mif/forest_counts.hpp"
#include "mif/format.hpp"
#include "mif/harness.hpp"
#include "mif/proof_checks.hpp"
#include "mif/solver.hpp"
#include "oracles.hpp"

using namespace mif;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
};

const fs::path kOutDir = "acceptance_output";

// Test-side f(m, k) straight from the definition.
mpq_class f_reference(int m, int k) {
  auto sp = [](int x) {
    mpz_class r = 1;
    if (x > 2) mpz_ui_pow_ui(r.get_mpz_t(), x, x - 2);
    return r;
  };
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), k - 1, m);
  mpq_class r(b * sp(m) * sp(k - m), sp(k));
  r.canonicalize();
  return r;
}

const ClaimStatus* find_claim(const BoundCheckReport& r, const std::string& name) {
  for (const auto& c : r.claims)
    if (c.name == name) return &c;
  return nullptr;
}

Verdict forest_counts() {
  Verdict v;
  int cells = 0;
  for (int k = 1; k <= 6; ++k) {
    const auto counts = oracle::forests_by_components(k);
    mpz_class sum = 0;
    for (int ell = 1; ell <= k; ++ell) {
      v.require(phi(k, ell) == mpz_class(std::to_string(counts[ell])),
                "phi(" + std::to_string(k) + "," + std::to_string(ell) + ")");
      sum += phi(k, ell);
      ++cells;
    }
    v.require(phi(k, k + 1) == 0 && phi(k, 0) == 0, "zero outside 1..k");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    v.require(sum == mpz_class(std::to_string(total)), "row sum k=" + std::to_string(k));
  }
  mpz_class s3 = 0, s4 = 0;
  for (int ell = 1; ell <= 4; ++ell) s4 += phi(4, ell);
  for (int ell = 1; ell <= 3; ++ell) s3 += phi(3, ell);
  v.require(s3 == 7 && s4 == 38, "totals 7 and 38");
  v.detail = std::to_string(cells) + " (k,l) cells equal the enumeration over all 2^C(k,2) graphs; "
             "totals k=3: " + s3.get_str() + ", k=4: " + s4.get_str();
  return v;
}

Verdict recursion_identity() {
  Verdict v;
  int checked = 0;
  for (const char* ptext : {"0.3", "0.5", "0.7"}) {
    const Probability p = Probability::parse(ptext);
    const mpq_class odds = p.odds_against();
    for (int k = 2; k <= 30; ++k)
      for (int ell = 2; ell <= k; ++ell) {
        mpq_class sum = 0;
        for (int m = ell - 1; m <= k - 1; ++m) sum += f_reference(m, k) * g_exact(m, ell - 1, p);
        v.require(g_exact(k, ell, p) == odds * sum,
                  "p=" + std::string(ptext) + " k=" + std::to_string(k) + " l=" + std::to_string(ell));
        ++checked;
      }
  }
  v.detail = std::to_string(checked) + " exact rational equalities, k <= 30, 2 <= l <= k, "
             "p in {0.3, 0.5, 0.7} (l = 1 has no recursion)";
  return v;
}

Verdict moon_limit() {
  Verdict v;
  const Probability half = Probability::parse("0.5");
  std::ostringstream d;
  d << "k=2000, p=0.5:";
  for (int ell = 1; ell <= 6; ++ell) {
    const double got = g(2000, ell, half).value(), lim = g_limit(ell, 0.5);
    const double rel = std::abs(got - lim) / lim;
    v.require(rel <= 0.05, "l=" + std::to_string(ell));
    d << " l=" << ell << " rel " << format_fixed(rel, 4);
  }
  v.detail = d.str();
  return v;
}

Verdict lemma_ratio() {
  Verdict v;
  std::ostringstream d;
  double worst_gap = 0.0;
  for (const char* ptext : {"0.3", "0.5", "0.7"}) {
    const Probability p = Probability::parse(ptext);
    double sup = 0.0, at400 = 0.0;
    for (int K = 10; K <= 400; ++K) {
      const auto q = MomentQuery::make(1000, p, 0.0, K);
      const auto r = expected_forest_count(q);
      const auto b = ratio_and_bound(q);
      const double two_way = std::abs(r.ratio / b.ratio - 1.0);
      worst_gap = std::max({worst_gap, r.route_gap, two_way});
      v.require(r.route_gap < tolerance::kTwoRoutes && two_way < tolerance::kTwoRoutes,
                "two routes at p=" + std::string(ptext) + " K=" + std::to_string(K));
      v.require(std::isfinite(r.ratio) && r.ratio >= 1.0, "ratio finite and >= 1");
      sup = std::max(sup, r.ratio);
      if (K == 400) at400 = b.ratio;
    }
    const double lim = g_sum_limit(p.value());
    const double rel = std::abs(at400 / lim - 1.0);
    v.require(rel < 0.05, "K=400 within 5% at p=" + std::string(ptext));
    d << "p=" << ptext << ": sup " << format_fixed(sup, 4) << ", K=400 " << format_fixed(at400, 5)
      << " vs " << format_fixed(lim, 5) << " (" << format_fixed(100 * rel, 2) << "%); ";
  }
  d << "largest route disagreement " << format_double(worst_gap);
  v.detail = d.str();
  return v;
}

Verdict proof_suite() {
  Verdict v;
  std::ostringstream d;
  const auto st = check_stirling_sandwich(1, 300);
  v.require(st.total_violations == 0, "Stirling sandwich n=1..300");

  double prev_c = 0, prev_C = 0, drift_c = 0, drift_C = 0;
  for (int k_max : {50, 100, 200}) {
    const auto f = check_f_upper_bound(k_max);
    const auto s = check_sum_f_bound(k_max);
    v.require(f.c_empirical && std::isfinite(*f.c_empirical) && *f.c_empirical > 0, "c finite");
    v.require(s.C_empirical && std::isfinite(*s.C_empirical) && *s.C_empirical > 0, "C finite");
    if (prev_c > 0) {
      drift_c = std::max(drift_c, std::abs(*f.c_empirical / prev_c - 1));
      drift_C = std::max(drift_C, std::abs(*s.C_empirical / prev_C - 1));
    }
    prev_c = *f.c_empirical;
    prev_C = *s.C_empirical;
    if (k_max == 200) {
      const ClaimStatus* last = find_claim(f, "last_term");
      v.require(last && last->equalities == 1 && last->failures == 0 && last->equality_cases.size() == 1 &&
                    last->equality_cases[0].k == 3,
                "f(k-1,k) <= 1/k: equality only at k=3, strict elsewhere");
    }
  }
  v.require(drift_c < 0.01, "c_empirical drift");
  v.require(drift_C < 0.01, "C_empirical drift");

  const auto conv = check_convexity_integral_bound(200);
  const ClaimStatus* cx = find_claim(conv, "convexity");
  v.require(cx && cx->failures == 0, "convexity second differences");

  double worst_quad = 0;
  for (int k = 3; k <= 200; k += 7)
    for (int ell = 2; ell < k; ell += std::max(1, k / 9)) {
      const long double quad = oracle::integrate_v(k, ell - 1, k - 1);
      const double closed = v_antiderivative(k - 1, k) - v_antiderivative(ell - 1, k);
      worst_quad = std::max(worst_quad, std::abs(closed / static_cast<double>(quad) - 1));
    }
  v.require(worst_quad < 1e-8, "antiderivative vs quadrature");

  d << "Stirling 300/300 strict; c_empirical " << format_fixed(prev_c, 5) << " (drift "
    << format_fixed(100 * drift_c, 2) << "%), C_empirical " << format_fixed(prev_C, 5) << " (drift "
    << format_fixed(100 * drift_C, 2) << "%); convexity: " << (cx ? cx->cases : 0)
    << " second differences, none below -1e-9 v; quadrature rel err " << format_double(worst_quad) << "; k=3 equality recorded";
  v.detail = d.str();

  for (const auto& c : conv.claims)
    if (c.failures)
      v.notes.push_back("displayed step '" + c.name + "' fails at " + std::to_string(c.failures) + "/" +
                        std::to_string(c.cases) + " grid points (first at k=" +
                        std::to_string(c.first_failure->at.k) +
                        (c.first_failure->at.ell ? ", l=" + std::to_string(c.first_failure->at.ell) : "") +
                        "); reported by verify-inequalities, not part of this criterion");
  return v;
}

Verdict solver_equivalence() {
  Verdict v;
  int instances = 0;
  for (const char* ptext : {"0.2", "0.5", "0.8"})
    for (int n = 8; n <= 18; ++n)
      for (std::uint64_t seed = 0; seed < 7; ++seed) {
        const Graph g = sample_gnp({n, Probability::parse(ptext), 500 + seed});
        for (SearchMode mode : {SearchMode::Forest, SearchMode::Tree}) {
          const auto exact = brute_force_max(mode, g);
          const auto bb = solve_max(mode, g);
          v.require(exact.size == bb.size && bb.status == SolveStatus::Optimal,
                    std::string(to_string(mode)) + " n=" + std::to_string(n) + " p=" + ptext);
        }
        ++instances;
      }
  auto fixture = [&](const char* name, const Graph& g, std::size_t forest, std::size_t tree) {
    v.require(brute_force_max(SearchMode::Forest, g).size == forest &&
                  solve_max(SearchMode::Forest, g).size == forest,
              std::string(name) + " forest");
    v.require(brute_force_max(SearchMode::Tree, g).size == tree && solve_max(SearchMode::Tree, g).size == tree,
              std::string(name) + " tree");
  };
  std::vector<std::pair<int, int>> k5;
  for (int u = 0; u < 5; ++u)
    for (int w = u + 1; w < 5; ++w) k5.emplace_back(u, w);
  fixture("K5", Graph::from_edges(5, k5), 2, 2);
  fixture("C5", Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}), 4, 4);
  const Graph petersen = Graph::from_edges(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 5}, {1, 6}, {2, 7},
                                                {3, 8}, {4, 9}, {5, 7}, {7, 9}, {6, 9}, {6, 8}, {5, 8}});
  std::vector<std::uint32_t> adj(10, 0);
  for (auto [a, b] : petersen.edge_list()) adj[a] |= 1U << b, adj[b] |= 1U << a;
  const auto [pf, pt] = oracle::max_forest_and_tree(10, adj);
  fixture("Petersen", petersen, pf, pt);
  fixture("two triangles", Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}), 4, 2);
  v.detail = std::to_string(instances) + " random instances x 2 modes, n in [8,18], p in {0.2,0.5,0.8}, "
             "plus K5, C5, Petersen (forest " + std::to_string(pf) + ", tree " + std::to_string(pt) +
             "), two triangles";
  return v;
}

ExperimentConfig experiment_config() {
  ExperimentConfig cfg;
  cfg.n_list = {100};
  cfg.p_list = {Probability::parse("0.5")};
  cfg.trials = 200;
  cfg.base_seed = 20260101;
  cfg.output = kOutDir / "n100_p0.5.csv";
  return cfg;
}

Verdict experiment() {
  Verdict v;
  fs::create_directories(kOutDir);
  const ExperimentConfig cfg = experiment_config();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  try {
    result = run_experiment(cfg, {0, true, ""});
  } catch (const BudgetExhausted& e) {
    v.require(false, e.what());
    return v;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(result.records.size() == 200, "200 records");
  for (const auto& r : result.records) {
    v.require(r.status == SolveStatus::Optimal, "exact solve");
    v.require(r.F_n >= r.T_n, "F_n >= T_n");
  }
  v.require(result.summaries.size() == 1, "one cell");
  if (!v.pass) return v;
  const CellSummary& s = result.summaries.front();
  std::ofstream svg(kOutDir / "n100_p0.5_F_n.svg");
  write_histogram_svg(svg, s);

  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i / 20.0);
  const auto best = best_epsilon(sweep_epsilon(result.records, grid)).front();

  std::ostringstream d;
  d << "200/200 trials exact in " << format_fixed(secs, 0) << " s; F_n histogram {";
  bool first = true;
  for (const auto& [val, c] : s.f_distribution) {
    d << (first ? "" : ", ") << val << ": " << c;
    first = false;
  }
  d << "}; top-2 mass " << format_fixed(s.top_two_mass, 3) << "; gap<=1 fraction " << format_fixed(s.gap_at_most_one, 3)
    << "; window at eps=0 is {" << s.k_low << "," << s.k_high << "} with in-window " << format_fixed(s.in_window, 3)
    << "; best eps on [0,1) grid " << format_fixed(best.eps, 2) << " -> {" << best.k_low << "," << best.k_high
    << "} in-window " << format_fixed(best.in_window, 3);
  v.detail = d.str();
  if (best.in_window < 0.5)
    v.notes.push_back("note: no eps on the [0,1) grid puts most F_n in the predicted window at this n");
  if (s.top_two_flag) v.notes.push_back("flag: top-2 mass below the exploratory 0.9 target");
  if (s.gap_flag) v.notes.push_back("flag: gap<=1 fraction below the exploratory 0.95 target");
  return v;
}

std::string without_first_line(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  return s.substr(s.find('\n') + 1);
}

Verdict reproducibility(bool experiment_ran) {
  Verdict v;
  fs::create_directories(kOutDir);
  ExperimentConfig cfg;
  cfg.n_list = {30, 45};
  cfg.p_list = {Probability::parse("0.5"), Probability::parse("0.3")};
  cfg.trials = 25;
  cfg.base_seed = 7;
  cfg.output = kOutDir / "repro_a.csv";
  run_experiment(cfg, {1, false, "first run"});
  const std::string a = without_first_line(cfg.output);
  cfg.output = kOutDir / "repro_b.csv";
  run_experiment(cfg, {4, false, "second run"});
  const std::string b = without_first_line(cfg.output);
  v.require(a == b, "rerun bytes identical");
  std::ostringstream d;
  d << "4-cell config rerun with 1 and 4 threads: " << a.size() << " bytes identical after the timestamp line";

  if (experiment_ran) {
    const ExperimentConfig big = experiment_config();
    const auto recs = read_records(big.output);
    int same = 0;
    for (std::size_t i = 0; i < recs.size() && i < 10; ++i) {
      const auto& r = recs[i];
      same += run_trial(r.n, Probability::parse(r.p), big.eps, r.trial_seed, big.node_budget, false) == r;
    }
    v.require(same == 10, "regenerated n=100 trials");
    d << "; 10/10 n=100 records regenerate identically from their seeds";
  }
  v.detail = d.str();
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int c) { return selected.empty() || selected.contains(c); };

  struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> run;
  };
  bool experiment_ran = false;
  const std::vector<Criterion> criteria = {
      {1, "forest-count correctness", forest_counts},
      {2, "recursion identity", recursion_identity},
      {3, "Moon-limit convergence", moon_limit},
      {4, "first-moment ratio", lemma_ratio},
      {5, "proof-inequality suite", proof_suite},
      {6, "solver oracle equivalence", solver_equivalence},
      {7, "desk-scale concentration experiment",
       [&] {
         Verdict v = experiment();
         experiment_ran = v.pass;
         return v;
       }},
      {8, "reproducibility", [&] { return reproducibility(experiment_ran); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.title << ", "
              << format_fixed(secs, 1) << " s): " << v.detail << '\n';
    for (const auto& n : v.notes) std::cout << "      " << n << '\n';
    std::cout.flush();
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
