#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mif/error.hpp"
#include "mif/first_moment.hpp"
#include "mif/harness.hpp"
#include "mif/rng.hpp"

using namespace mif;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mif_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string drop_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = ExperimentConfig::parse_toml(R"(
n_list = [20, 30]
p_list = ["0.5", 0.3, "1/3"]
eps = 0.25
trials = 4
base_seed = 99
node_budget = 1000000
output = "out.csv"
)");
  CHECK(cfg.n_list == std::vector<int>{20, 30});
  REQUIRE(cfg.p_list.size() == 3);
  CHECK(cfg.p_list[1].text() == "0.3");
  CHECK(cfg.p_list[2].exact() == mpq_class(1, 3));
  CHECK(cfg.eps == 0.25);
  CHECK(cfg.trials == 4);
  CHECK(cfg.base_seed == 99);
  CHECK(cfg.node_budget == 1000000);
  CHECK(cfg.output == "out.csv");

  CHECK_THROWS_AS(ExperimentConfig::parse_toml("n_list=[20]\np_list=[\"0.5\"]\ncolour=1\n"), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig::parse_toml("n_list=[20]\n"), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig::parse_toml("n_list=[20]\np_list=[\"0.5\"]\ntrials=0\n"), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig::parse_toml("n_list=[20]\np_list=[\"1.5\"]\n"), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig::parse_toml("n_list=[20\n"), ParameterError);
}

TEST_CASE("small experiment: invariants, files and reruns") {
  const fs::path dir = scratch_dir("small");
  ExperimentConfig cfg;
  cfg.n_list = {20, 24};
  cfg.p_list = {Probability::parse("0.5"), Probability::parse("0.3")};
  cfg.trials = 50;
  cfg.base_seed = 2024;
  cfg.output = dir / "records.csv";

  RunOptions opts;
  opts.threads = 1;
  opts.verify = true;
  const auto first = run_experiment(cfg, opts);
  CHECK(first.records.size() == 200);
  for (const auto& r : first.records) {
    CHECK(r.F_n >= r.T_n);
    CHECK(r.gap == r.F_n - r.T_n);
    CHECK(r.status == SolveStatus::Optimal);
    const auto cp = concentration_points(r.n, Probability::parse(r.p), cfg.eps);
    CHECK(r.k_low == cp.k_low);
  }
  // Seeds follow the documented mixing function.
  CHECK(first.records[3].trial_seed == mix_trial_seed(2024, 20, "0.5", 3));
  CHECK(first.records[50].trial_seed == mix_trial_seed(2024, 20, "0.3", 0));

  const std::string bytes = read_all(cfg.output);
  CHECK(bytes.rfind("# mif simulate ", 0) == 0);

  // Records and summaries round-trip through the files.
  const auto reread = read_records(cfg.output);
  CHECK(reread == first.records);
  CHECK(summarize(reread) == first.summaries);
  std::ostringstream js;
  write_summaries_json(js, first.summaries);
  CHECK(read_all(summary_path(cfg.output)) == js.str());

  // Rerun with a different thread count: identical apart from the timestamp.
  opts.threads = 3;
  opts.verify = false;
  const auto second = run_experiment(cfg, opts);
  CHECK(second.records == first.records);
  CHECK(drop_first_line(read_all(cfg.output)) == drop_first_line(bytes));

  // Any record regenerates on its own.
  const auto& r = first.records[77];
  CHECK(run_trial(r.n, Probability::parse(r.p), cfg.eps, r.trial_seed, cfg.node_budget, true) == r);
}

TEST_CASE("budget exhaustion aborts the cell loudly") {
  const fs::path dir = scratch_dir("budget");
  ExperimentConfig cfg;
  cfg.n_list = {60};
  cfg.p_list = {Probability::parse("0.5")};
  cfg.trials = 3;
  cfg.node_budget = 5;
  cfg.output = dir / "records.csv";
  CHECK_THROWS_AS(run_experiment(cfg, {1, false, "t"}), BudgetExhausted);
  const auto recs = read_records(cfg.output);
  CHECK(recs.size() == 3);
  bool any_incomplete = false;
  for (const auto& r : recs) any_incomplete |= r.status == SolveStatus::Incomplete;
  CHECK(any_incomplete);
}

TEST_CASE("summaries") {
  std::vector<TrialRecord> recs;
  auto add = [&](int f, int t) {
    TrialRecord r{10, "0.5", 0, f, t, f - t, 5, 6, f == 5 || f == 6, SolveStatus::Optimal};
    recs.push_back(r);
  };
  add(5, 5);
  add(5, 3);
  add(6, 6);
  add(7, 6);
  const auto s = summarize(recs);
  REQUIRE(s.size() == 1);
  CHECK(s[0].trials == 4);
  CHECK(s[0].f_distribution == std::map<int, int>{{5, 2}, {6, 1}, {7, 1}});
  CHECK(s[0].top_two_mass == 0.75);
  CHECK(s[0].adjacent_pair_mass == 0.75);
  CHECK(s[0].mean_gap == 0.75);
  CHECK(s[0].gap_at_most_one == 0.75);
  CHECK(s[0].in_window == 0.75);
  CHECK(s[0].top_two_flag);
  CHECK(s[0].gap_flag);
  int total = 0;
  for (const auto& [v, c] : s[0].f_distribution) total += c;
  CHECK(total == s[0].trials);
  std::ostringstream svg;
  write_histogram_svg(svg, s[0]);
  CHECK(svg.str().find("<svg") == 0);
  CHECK(svg.str().find("</svg>") != std::string::npos);
}

TEST_CASE("epsilon sweep") {
  CHECK(sweep_epsilon({}, {0.0, 0.5}).empty());
  std::vector<TrialRecord> recs;
  const Probability half = Probability::parse("0.5");
  const auto cp = concentration_points(100, half, 0.0);
  for (int f : {cp.k_low, cp.k_low + 1, cp.k_low + 1, cp.k_low + 2})
    recs.push_back({100, "0.5", 0, f, f, 0, cp.k_low, cp.k_high, f <= cp.k_high, SolveStatus::Optimal});
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i / 20.0);
  const auto rows = sweep_epsilon(recs, grid);
  CHECK(rows.size() == grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].k_low == rows[i - 1].k_low) CHECK(rows[i].in_window == rows[i - 1].in_window);
  const auto best = best_epsilon(rows);
  REQUIRE(best.size() == 1);
  for (const auto& r : rows) CHECK(r.in_window <= best[0].in_window);
  CHECK(best[0].in_window == 0.75);
}

TEST_CASE("record parsing rejects damage") {
  std::istringstream no_header("20,0.5,1,5,5,0,5,6,true,optimal\n");
  CHECK_THROWS_AS(read_records(no_header), ParameterError);
  std::istringstream bad_gap(std::string(kRecordColumns) + "\n20,0.5,1,5,4,0,5,6,true,optimal\n");
  CHECK_THROWS_AS(read_records(bad_gap), ParameterError);
  std::istringstream bad_status(std::string(kRecordColumns) + "\n20,0.5,1,5,5,0,5,6,true,done\n");
  CHECK_THROWS_AS(read_records(bad_status), ParameterError);
}
