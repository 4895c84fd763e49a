#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mif/probability.hpp"
#include "mif/solver.hpp"

namespace mif {

struct ExperimentConfig {
  std::vector<int> n_list;
  std::vector<Probability> p_list;
  double eps = 0.0;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::filesystem::path output = "records.csv";

  // Keys mirror the fields: n_list, p_list, eps, trials, base_seed,
  // node_budget, output. p_list entries may be strings ("0.5", "1/3") or
  // floats, which are read back through their shortest decimal spelling.
  // Unknown keys are rejected. Throws ParameterError.
  static ExperimentConfig parse_toml(std::string_view text);
  static ExperimentConfig load_toml(const std::filesystem::path& path);
  void validate() const;
};

struct TrialRecord {
  int n = 0;
  std::string p;  // probability as written in the config
  std::uint64_t trial_seed = 0;
  int F_n = 0;
  int T_n = 0;
  int gap = 0;
  int k_low = 0;
  int k_high = 0;
  bool in_window = false;
  SolveStatus status = SolveStatus::Optimal;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Header row of the records CSV, fields in declaration order.
inline constexpr std::string_view kRecordColumns =
    "n,p,trial_seed,F_n,T_n,gap,k_low,k_high,in_window,status";

void write_record(std::ostream& out, const TrialRecord& r);
// Skips '#' comment lines; requires the header row. Throws ParameterError on
// malformed input.
std::vector<TrialRecord> read_records(std::istream& in);
std::vector<TrialRecord> read_records(const std::filesystem::path& path);

// Exploratory thresholds; falling short is flagged, not failed.
inline constexpr double kTopTwoTarget = 0.9;
inline constexpr double kGapTarget = 0.95;

struct CellSummary {
  int n = 0;
  std::string p;
  int trials = 0;
  int k_low = 0;
  int k_high = 0;
  std::map<int, int> f_distribution;  // F_n value -> frequency
  std::map<int, int> t_distribution;
  double top_two_mass = 0.0;       // two most frequent F_n values
  double adjacent_pair_mass = 0.0;  // best pair of consecutive F_n values
  double mean_gap = 0.0;
  double gap_at_most_one = 0.0;
  double in_window = 0.0;
  bool top_two_flag = false;  // top_two_mass < kTopTwoTarget
  bool gap_flag = false;      // gap_at_most_one < kGapTarget

  friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

// Groups by (n, p) in order of first appearance.
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);

struct RunOptions {
  unsigned threads = 0;  // 0: default_thread_count()
  // Re-check every witness with the graph predicates and F_n >= T_n.
  bool verify = false;
  std::string timestamp;  // first CSV line; empty: current UTC time
};

// MIF_THREADS if set and positive, else the hardware concurrency.
unsigned default_thread_count();

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<CellSummary> summaries;
};

// A cell stopped because some trial ran out of node budget. Its records,
// including the incomplete ones, are already on disk.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves every trial of every cell, appending each finished cell to
// cfg.output and writing summaries to summary_path(cfg.output). Reruns of the
// same config produce identical files apart from the first line.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// The single trial behind a record, for regenerating any graph externally.
TrialRecord run_trial(int n, const Probability& p, double eps, std::uint64_t trial_seed,
                      std::uint64_t node_budget, bool verify);

std::filesystem::path summary_path(const std::filesystem::path& records_path);
void write_summaries_json(std::ostream& out, const std::vector<CellSummary>& summaries);

struct EpsilonRow {
  int n = 0;
  std::string p;
  double eps = 0.0;
  int k_low = 0;
  int k_high = 0;
  double in_window = 0.0;
};

// Recomputes the window and in-window fraction per cell for each eps without
// re-solving.
std::vector<EpsilonRow> sweep_epsilon(const std::vector<TrialRecord>& records,
                                      const std::vector<double>& eps_grid);
// For each cell, the first grid row with the largest in-window fraction.
std::vector<EpsilonRow> best_epsilon(const std::vector<EpsilonRow>& rows);

// Bar chart of the F_n distribution of one cell.
void write_histogram_svg(std::ostream& out, const CellSummary& cell);

}  // namespace mif
