#include "mif/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mif/error.hpp"
#include "mif/first_moment.hpp"
#include "mif/forest_counts.hpp"
#include "mif/format.hpp"
#include "mif/graph.hpp"
#include "mif/harness.hpp"
#include "mif/proof_checks.hpp"
#include "mif/solver.hpp"

namespace mif::cli {

using json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json claim_json(const ClaimStatus& c) {
  auto point = [](const GridPoint& g) { return json{{"k", g.k}, {"ell", g.ell}, {"m", g.m}}; };
  auto violation = [&](const std::optional<Violation>& v) -> json {
    if (!v) return nullptr;
    return {{"at", point(v->at)}, {"lhs", v->lhs}, {"rhs", v->rhs}};
  };
  json eq = json::array();
  for (const auto& g : c.equality_cases) eq.push_back(point(g));
  return {{"name", c.name},
          {"statement", c.statement},
          {"status", to_string(c.outcome())},
          {"cases", c.cases},
          {"equalities", c.equalities},
          {"failures", c.failures},
          {"tightest_margin", c.tightest_margin},
          {"tightest_at", point(c.tightest_at)},
          {"equality_cases", eq},
          {"first_failure", violation(c.first_failure)},
          {"last_failure", violation(c.last_failure)}};
}

json report_json(const BoundCheckReport& r) {
  json claims = json::array(), violations = json::array();
  for (const auto& c : r.claims) claims.push_back(claim_json(c));
  for (const auto& v : r.violations)
    violations.push_back({{"claim", v.claim},
                          {"k", v.at.k},
                          {"ell", v.at.ell},
                          {"m", v.at.m},
                          {"lhs", v.lhs},
                          {"rhs", v.rhs}});
  json j = {{"check", r.check},
            {"k_range", {r.k_range.lo, r.k_range.hi}},
            {"ell_range", {r.ell_range.lo, r.ell_range.hi}},
            {"worst_case", {{"k", r.worst_case.k}, {"ell", r.worst_case.ell}, {"m", r.worst_case.m}}}};
  if (r.c_empirical) j["c_empirical"] = *r.c_empirical;
  if (r.C_empirical) j["C_empirical"] = *r.C_empirical;
  j["claims"] = claims;
  j["total_violations"] = r.total_violations;
  j["violations"] = violations;
  return j;
}

// Resolves an empty --format to the first allowed value.
void check_format(std::string& f, std::initializer_list<const char*> allowed) {
  if (f.empty()) f = *allowed.begin();
  for (const char* a : allowed)
    if (f == a) return;
  throw UsageError("unsupported --format '" + f + "'");
}

double g_or_zero(int k, int ell, const Probability& p) { return ell < 1 ? 0.0 : g(k, ell, p).value(); }

int do_count_forests(Invocation& inv, std::ostream& out) {
  check_format(inv.format, {"csv", "json"});
  std::optional<Probability> p;
  if (inv.p) p = Probability::parse(*inv.p);
  std::vector<int> ells;
  if (inv.ell) ells.push_back(*inv.ell);
  else
    for (int l = 1; l <= inv.k; ++l) ells.push_back(l);
  if (inv.format == "csv") {
    out << "k,ell,phi" << (p ? ",g" : "") << '\n';
    for (int l : ells) {
      out << inv.k << ',' << l << ',' << phi(inv.k, l).get_str();
      if (p) out << ',' << format_double(g_or_zero(inv.k, l, *p));
      out << '\n';
    }
  } else {
    json rows = json::array();
    for (int l : ells) {
      json row = {{"k", inv.k}, {"ell", l}, {"phi", phi(inv.k, l).get_str()}};
      if (p) row["g"] = g_or_zero(inv.k, l, *p);
      rows.push_back(row);
    }
    json doc = {{"k", inv.k}};
    if (p) doc["p"] = p->text();
    doc["rows"] = rows;
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

int do_expectation(Invocation& inv, std::ostream& out) {
  check_format(inv.format, {"csv", "json"});
  const Probability p = Probability::parse(inv.p_text);
  const MomentQuery q = MomentQuery::make(inv.n, p, inv.eps, inv.K);
  const MomentReport r = expected_forest_count(q);
  if (inv.format == "csv") {
    out << "n,p,eps,K,ell,log_E_Y_ell,log_E_X,ratio,limit_ratio\n";
    for (int l = 1; l <= q.K; ++l)
      out << q.n << ',' << p.text() << ',' << format_double(q.eps) << ',' << q.K << ',' << l << ','
          << format_double(r.e_y_by_ell[l - 1].log_value()) << ',' << format_double(r.e_x.log_value())
          << ',' << format_double(r.ratio) << ',' << format_double(r.limit_ratio) << '\n';
  } else {
    json by_ell = json::array();
    for (const auto& e : r.e_y_by_ell) by_ell.push_back(e.log_value());
    const ConcentrationPoints cp = concentration_points(q.n, p, q.eps);
    json doc = {{"n", q.n},
                {"p", p.text()},
                {"eps", q.eps},
                {"K", q.K},
                {"log_E_X", r.e_x.log_value()},
                {"log_E_Y", r.e_y.log_value()},
                {"log_E_Y_factored", r.e_y_factored.log_value()},
                {"log_E_Y_by_ell", by_ell},
                {"ratio", r.ratio},
                {"limit_ratio", r.limit_ratio},
                {"route_gap", r.route_gap},
                {"upper_bound_certified", r.upper_bound_certified},
                {"k_low", cp.k_low},
                {"k_high", cp.k_high}};
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

int do_concentration(Invocation& inv, std::ostream& out) {
  check_format(inv.format, {"csv", "json"});
  const Probability p = Probability::parse(inv.p_text);
  const ConcentrationPoints cp = concentration_points(inv.n, p, inv.eps);
  if (inv.format == "csv") {
    out << "n,p,eps,k_low,k_high\n"
        << inv.n << ',' << p.text() << ',' << format_double(inv.eps) << ',' << cp.k_low << ','
        << cp.k_high << '\n';
  } else {
    out << json{{"n", inv.n}, {"p", p.text()}, {"eps", inv.eps}, {"k_low", cp.k_low}, {"k_high", cp.k_high}}
               .dump(2)
        << '\n';
  }
  return kOk;
}

int do_verify(Invocation& inv, std::ostream& out) {
  check_format(inv.format, {"json"});
  SuiteOptions o;
  o.k_max = inv.kmax;
  for (const auto& s : inv.p_values) o.ps.push_back(Probability::parse(s));
  const VerificationSuite suite = run_verification_suite(o);
  json reports = json::array(), series = json::array();
  for (const auto& r : suite.reports) reports.push_back(report_json(r));
  for (std::size_t i = 0; i < suite.m_series.size(); ++i) {
    json est = json::array();
    double prev = 0.0;
    for (const auto& e : suite.m_series[i]) {
      json row = {{"ell", e.ell}, {"m_ell", e.m_ell}, {"grid_max", e.grid_max}, {"limit", e.limit}};
      row["argmax_k"] = e.argmax_k ? json(*e.argmax_k) : json("limit");
      row["at_grid_boundary"] = e.at_grid_boundary;
      row["ratio_to_previous"] = e.ell == 1 ? json(nullptr) : json(e.m_ell / prev);
      prev = e.m_ell;
      est.push_back(row);
    }
    series.push_back({{"p", suite.p_texts[i]}, {"estimates", est}});
  }
  json doc = {{"k_max", suite.k_max},
              {"p", suite.p_texts},
              {"total_violations", suite.total_violations()},
              {"reports", reports},
              {"M_ell", series}};
  out << doc.dump(2) << '\n';
  return suite.total_violations() == 0 ? kOk : kInvariantViolated;
}

int do_solve(const Invocation& inv, std::ostream& out) {
  const SearchMode mode = parse_search_mode(inv.mode);
  std::ifstream in(inv.graph_path);
  if (!in) throw UsageError("cannot read graph file '" + inv.graph_path + "'");
  const Graph g = read_graph(in);
  const SolveResult r = solve_max(mode, g, inv.budget);
  json doc = {{"mode", to_string(r.mode)},
              {"n", g.order()},
              {"m", g.edge_count()},
              {"size", r.size},
              {"witness", r.witness.to_vector()},
              {"nodes_explored", r.nodes_explored},
              {"status", to_string(r.status)}};
  out << doc.dump(2) << '\n';
  return r.status == SolveStatus::Optimal ? kOk : kBudget;
}

int do_simulate(const Invocation& inv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = ExperimentConfig::load_toml(inv.config_path);
  if (inv.output) cfg.output = *inv.output;
  if (inv.trials) cfg.trials = *inv.trials;
  if (inv.base_seed) cfg.base_seed = *inv.base_seed;
  if (inv.sim_eps) cfg.eps = *inv.sim_eps;
  if (inv.node_budget) cfg.node_budget = *inv.node_budget;
  cfg.validate();
  RunOptions o;
  o.threads = inv.threads;
  o.verify = inv.verify;
  const ExperimentResult r = run_experiment(cfg, o);
  write_summaries_json(out, r.summaries);
  for (const auto& s : r.summaries) {
    if (s.top_two_flag)
      err << "note: n=" << s.n << " p=" << s.p << ": top-two mass " << format_double(s.top_two_mass)
          << " is below the exploratory target " << format_double(kTopTwoTarget) << '\n';
    if (s.gap_flag)
      err << "note: n=" << s.n << " p=" << s.p << ": fraction with gap <= 1 is "
          << format_double(s.gap_at_most_one) << ", below the exploratory target "
          << format_double(kGapTarget) << '\n';
  }
  return kOk;
}

int do_report(Invocation& inv, std::ostream& out) {
  check_format(inv.format, {"csv", "json"});
  const std::vector<TrialRecord> records = read_records(std::filesystem::path(inv.records_path));
  const std::vector<CellSummary> cells = summarize(records);
  std::vector<double> grid = inv.eps_grid;
  if (grid.empty())
    for (int i = 0; i < 10; ++i) grid.push_back(i / 10.0);
  const auto sweep = sweep_epsilon(records, grid);
  const auto best = best_epsilon(sweep);

  if (!inv.plots_dir.empty()) {
    std::filesystem::create_directories(inv.plots_dir);
    for (const auto& c : cells) {
      const auto path = std::filesystem::path(inv.plots_dir) /
                        ("F_n_" + std::to_string(c.n) + "_" + c.p + ".svg");
      std::ofstream svg(path);
      if (!svg) throw std::runtime_error("cannot write " + path.string());
      write_histogram_svg(svg, c);
    }
  }

  if (inv.format == "csv") {
    out << "n,p,trials,k_low,k_high,F_distribution,top_two_mass,adjacent_pair_mass,mean_gap,"
           "gap_at_most_one,in_window,best_eps,best_eps_in_window,flags\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      std::string dist;
      for (const auto& [v, f] : c.f_distribution)
        dist += (dist.empty() ? "" : " ") + std::to_string(v) + ":" + std::to_string(f);
      std::string flags;
      if (c.top_two_flag) flags += "top_two_below_target";
      if (c.gap_flag) flags += std::string(flags.empty() ? "" : " ") + "gap_below_target";
      out << c.n << ',' << c.p << ',' << c.trials << ',' << c.k_low << ',' << c.k_high << ',' << dist
          << ',' << format_double(c.top_two_mass) << ',' << format_double(c.adjacent_pair_mass) << ','
          << format_double(c.mean_gap) << ',' << format_double(c.gap_at_most_one) << ','
          << format_double(c.in_window) << ',' << format_double(best[i].eps) << ','
          << format_double(best[i].in_window) << ',' << flags << '\n';
    }
  } else {
    std::ostringstream cell_json;
    write_summaries_json(cell_json, cells);
    json rows = json::array(), best_rows = json::array();
    for (const auto& r : sweep)
      rows.push_back({{"n", r.n}, {"p", r.p}, {"eps", r.eps}, {"k_low", r.k_low}, {"k_high", r.k_high},
                      {"in_window", r.in_window}});
    for (const auto& r : best)
      best_rows.push_back({{"n", r.n}, {"p", r.p}, {"eps", r.eps}, {"k_low", r.k_low},
                           {"k_high", r.k_high}, {"in_window", r.in_window}});
    json doc = json::parse(cell_json.str());
    doc["epsilon_sweep"] = rows;
    doc["best_epsilon"] = best_rows;
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

int do_sample(const Invocation& inv, std::ostream& out) {
  write_graph(out, sample_gnp({inv.n, Probability::parse(inv.p_text), inv.seed}));
  return kOk;
}

}  // namespace

std::unique_ptr<CLI::App> build_cli(Invocation& inv) {
  auto app = std::make_unique<CLI::App>(
      "Exact maximum induced forests in G(n,p) and numerical checks of the first-moment bound",
      "mifcheck");
  app->require_subcommand(1, 1);

  auto* c = inv.count_forests =
      app->add_subcommand("count-forests", "Exact counts of labelled forests by number of trees");
  c->add_option("--k", inv.k, "Number of labelled vertices")->required()->check(CLI::Range(1, kExactForestCap));
  c->add_option("--ell", inv.ell, "Only this number of trees (default: all)");
  c->add_option("--p", inv.p, "Also print g(k, ell, p) for this edge probability");
  c->add_option("--format", inv.format, "Output format: csv (default) or json");

  auto* e = inv.expectation =
      app->add_subcommand("expectation", "Expected numbers of induced trees and forests of size K");
  e->add_option("--n", inv.n, "Number of vertices")->required()->check(CLI::PositiveNumber);
  e->add_option("--p", inv.p_text, "Edge probability")->required();
  e->add_option("--eps", inv.eps, "Offset added inside the floor that defines K")->capture_default_str();
  e->add_option("--K", inv.K, "Forest size (default: floor(2 log_{1/(1-p)}(enp) + 4 + eps))");
  e->add_option("--format", inv.format, "Output format: csv (default) or json");

  auto* k = inv.concentration =
      app->add_subcommand("concentration-points", "The two predicted values of the maximum forest size");
  k->add_option("--n", inv.n, "Number of vertices")->required()->check(CLI::PositiveNumber);
  k->add_option("--p", inv.p_text, "Edge probability")->required();
  k->add_option("--eps", inv.eps, "Offset added inside the floor")->capture_default_str();
  k->add_option("--format", inv.format, "Output format: csv (default) or json");

  auto* v = inv.verify_inequalities =
      app->add_subcommand("verify-inequalities", "Check every bound of the upper-bound argument on a grid");
  v->add_option("--kmax", inv.kmax, "Largest k on the grid")->capture_default_str()->check(CLI::Range(3, 2000));
  v->add_option("--p", inv.p_values, "Edge probabilities, comma separated (default 0.3,0.5,0.7)")
      ->delimiter(',');
  v->add_option("--format", inv.format, "Output format: json (the only one)");

  auto* s = inv.solve = app->add_subcommand("solve", "Exact maximum induced forest or tree of a graph file");
  s->add_option("--mode", inv.mode, "forest or tree")->capture_default_str()->check(CLI::IsMember({"forest", "tree"}));
  s->add_option("--graph", inv.graph_path, "Graph file: 'n m' then m lines 'u v'")->required();
  s->add_option("--budget", inv.budget, "Search node budget")->capture_default_str()->check(CLI::PositiveNumber);

  auto* m = inv.simulate = app->add_subcommand("simulate", "Run a seeded Monte Carlo experiment");
  m->add_option("--config", inv.config_path, "TOML experiment config")->required();
  m->add_option("--output", inv.output, "Records CSV path (overrides config)");
  m->add_option("--trials", inv.trials, "Trials per cell (overrides config)")->check(CLI::PositiveNumber);
  m->add_option("--base-seed", inv.base_seed, "Base seed (overrides config)");
  m->add_option("--eps", inv.sim_eps, "Window offset (overrides config)");
  m->add_option("--node-budget", inv.node_budget, "Solver node budget (overrides config)")
      ->check(CLI::PositiveNumber);
  m->add_option("--threads", inv.threads, "Worker threads (default: MIF_THREADS or all cores)");
  m->add_flag("--verify", inv.verify, "Re-check every witness with the graph predicates");

  auto* r = inv.report = app->add_subcommand("report", "Summarise a records CSV");
  r->add_option("--records", inv.records_path, "Records CSV written by simulate")->required();
  r->add_option("--plots", inv.plots_dir, "Directory for per-cell SVG histograms of F_n");
  r->add_option("--eps-grid", inv.eps_grid, "Offsets to sweep, comma separated (default 0,0.1,...,0.9)")
      ->delimiter(',');
  r->add_option("--format", inv.format, "Output format: csv (default) or json");

  auto* g = inv.sample = app->add_subcommand("sample", "Write one seeded G(n,p) sample as a graph file");
  g->add_option("--n", inv.n, "Number of vertices")->required()->check(CLI::Range(1, static_cast<int>(kMaxVertices)));
  g->add_option("--p", inv.p_text, "Edge probability")->required();
  g->add_option("--seed", inv.seed, "Seed of the mt19937_64 stream")->capture_default_str();
  return app;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Invocation inv;
  auto app = build_cli(inv);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app->help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    if (inv.count_forests->parsed()) return do_count_forests(inv, out);
    if (inv.expectation->parsed()) return do_expectation(inv, out);
    if (inv.concentration->parsed()) return do_concentration(inv, out);
    if (inv.verify_inequalities->parsed()) return do_verify(inv, out);
    if (inv.solve->parsed()) return do_solve(inv, out);
    if (inv.simulate->parsed()) return do_simulate(inv, out, err);
    if (inv.report->parsed()) return do_report(inv, out);
    if (inv.sample->parsed()) return do_sample(inv, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetExhausted& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantViolated;
  }
  return kUsage;
}

}  // namespace mif::cli
