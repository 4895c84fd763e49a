#pragma once

#include <iosfwd>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mif/solver.hpp"

namespace mif::cli {

enum ExitCode : int {
  kOk = 0,
  kInvariantViolated = 1,
  kUsage = 2,
  kBudget = 3,
};

// Parsed flags of every subcommand; fields unused by the chosen subcommand
// keep their defaults.
struct Invocation {
  std::string format;  // empty: the subcommand default

  int k = 0;
  std::optional<int> ell;
  std::optional<std::string> p;

  int n = 0;
  std::string p_text;
  double eps = 0.0;
  std::optional<int> K;

  int kmax = 200;
  std::vector<std::string> p_values;

  std::string mode = "forest";
  std::string graph_path;
  std::uint64_t budget = kDefaultNodeBudget;

  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> trials;
  std::optional<std::uint64_t> base_seed;
  std::optional<double> sim_eps;
  std::optional<std::uint64_t> node_budget;
  unsigned threads = 0;
  bool verify = false;

  std::string records_path;
  std::string plots_dir;
  std::vector<double> eps_grid;

  std::uint64_t seed = 0;

  CLI::App* count_forests = nullptr;
  CLI::App* expectation = nullptr;
  CLI::App* concentration = nullptr;
  CLI::App* verify_inequalities = nullptr;
  CLI::App* solve = nullptr;
  CLI::App* simulate = nullptr;
  CLI::App* report = nullptr;
  CLI::App* sample = nullptr;
};

// The full parser, for reflection over its flags. Parsed values land in
// *invocation, which must outlive the app.
std::unique_ptr<CLI::App> build_cli(Invocation& invocation);

// Parses argv, runs the chosen subcommand and maps outcomes onto ExitCode.
// Machine-readable output goes to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mif::cli
