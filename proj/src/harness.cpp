#include "mif/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>
#include <toml.hpp>

#include "mif/error.hpp"
#include "mif/first_moment.hpp"
#include "mif/format.hpp"
#include "mif/graph.hpp"
#include "mif/rng.hpp"

namespace mif {
namespace {

template <class T>
T parse_number(std::string_view field, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParameterError("bad " + std::string(what) + " field: '" + std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    auto pos = line.find(',');
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

SolveStatus parse_status(std::string_view s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "incomplete") return SolveStatus::Incomplete;
  throw ParameterError("bad status field: '" + std::string(s) + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t toml_int(const toml::node& node, std::string_view key) {
  if (auto v = node.value_exact<std::int64_t>()) return *v;
  throw ParameterError("config key '" + std::string(key) + "' must be an integer");
}

double toml_real(const toml::node& node, std::string_view key) {
  if (auto v = node.value_exact<double>()) return *v;
  if (auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
  throw ParameterError("config key '" + std::string(key) + "' must be a number");
}

const toml::array& toml_array(const toml::node& node, std::string_view key) {
  if (const auto* a = node.as_array()) return *a;
  throw ParameterError("config key '" + std::string(key) + "' must be an array");
}

struct CellKey {
  int n;
  std::string p;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Records grouped by cell in order of first appearance.
std::vector<std::pair<CellKey, std::vector<const TrialRecord*>>> group_cells(
    const std::vector<TrialRecord>& records) {
  std::vector<std::pair<CellKey, std::vector<const TrialRecord*>>> cells;
  for (const auto& r : records) {
    CellKey key{r.n, r.p};
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) { return c.first == key; });
    if (it == cells.end()) {
      cells.push_back({key, {}});
      it = std::prev(cells.end());
    }
    it->second.push_back(&r);
  }
  return cells;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ParameterError("config is not valid TOML: " + std::string(e.description()));
  }
  static const std::set<std::string, std::less<>> known = {
      "n_list", "p_list", "eps", "trials", "base_seed", "node_budget", "output"};
  for (const auto& [key, node] : table)
    if (!known.contains(key.str())) throw ParameterError("unknown config key '" + std::string(key.str()) + "'");
  if (!table.contains("n_list") || !table.contains("p_list"))
    throw ParameterError("config needs n_list and p_list");

  ExperimentConfig cfg;
  for (const auto& node : toml_array(*table.get("n_list"), "n_list")) {
    const std::int64_t n = toml_int(node, "n_list");
    if (n < 1 || n > static_cast<std::int64_t>(kMaxVertices))
      throw ParameterError("n_list entries must lie in [1, " + std::to_string(kMaxVertices) + "]");
    cfg.n_list.push_back(static_cast<int>(n));
  }
  for (const auto& node : toml_array(*table.get("p_list"), "p_list")) {
    if (auto s = node.value_exact<std::string>()) cfg.p_list.push_back(Probability::parse(*s));
    else cfg.p_list.push_back(Probability::parse(format_double(toml_real(node, "p_list"))));
  }
  if (auto* n = table.get("eps")) cfg.eps = toml_real(*n, "eps");
  if (auto* n = table.get("trials")) {
    const std::int64_t t = toml_int(*n, "trials");
    if (t < 1 || t > 1'000'000) throw ParameterError("trials must lie in [1, 1000000]");
    cfg.trials = static_cast<int>(t);
  }
  if (auto* n = table.get("base_seed")) {
    const std::int64_t s = toml_int(*n, "base_seed");
    if (s < 0) throw ParameterError("base_seed must be non-negative");
    cfg.base_seed = static_cast<std::uint64_t>(s);
  }
  if (auto* n = table.get("node_budget")) {
    const std::int64_t b = toml_int(*n, "node_budget");
    if (b < 1) throw ParameterError("node_budget must be positive");
    cfg.node_budget = static_cast<std::uint64_t>(b);
  }
  if (auto* n = table.get("output")) {
    auto s = n->value_exact<std::string>();
    if (!s || s->empty()) throw ParameterError("output must be a non-empty string");
    cfg.output = *s;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_toml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw ParameterError("n_list is empty");
  if (p_list.empty()) throw ParameterError("p_list is empty");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (node_budget < 1) throw ParameterError("node_budget must be positive");
  if (!std::isfinite(eps)) throw ParameterError("eps must be finite");
  for (int n : n_list)
    if (n < 1 || n > static_cast<int>(kMaxVertices)) throw ParameterError("n out of range");
}

void write_record(std::ostream& out, const TrialRecord& r) {
  out << r.n << ',' << r.p << ',' << r.trial_seed << ',' << r.F_n << ',' << r.T_n << ',' << r.gap
      << ',' << r.k_low << ',' << r.k_high << ',' << (r.in_window ? "true" : "false") << ','
      << to_string(r.status) << '\n';
}

std::vector<TrialRecord> read_records(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kRecordColumns) throw ParameterError("records file lacks the header row");
      header = true;
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 10)
      throw ParameterError("line " + std::to_string(line_no) + ": expected 10 fields");
    TrialRecord r;
    r.n = parse_number<int>(f[0], "n");
    r.p = Probability::parse(f[1]).text();
    r.trial_seed = parse_number<std::uint64_t>(f[2], "trial_seed");
    r.F_n = parse_number<int>(f[3], "F_n");
    r.T_n = parse_number<int>(f[4], "T_n");
    r.gap = parse_number<int>(f[5], "gap");
    r.k_low = parse_number<int>(f[6], "k_low");
    r.k_high = parse_number<int>(f[7], "k_high");
    if (f[8] != "true" && f[8] != "false") throw ParameterError("bad in_window field");
    r.in_window = f[8] == "true";
    r.status = parse_status(f[9]);
    if (r.gap != r.F_n - r.T_n || r.gap < 0 || r.k_high != r.k_low + 1 ||
        r.in_window != (r.F_n == r.k_low || r.F_n == r.k_high))
      throw ParameterError("line " + std::to_string(line_no) + ": inconsistent record");
    out.push_back(std::move(r));
  }
  if (!header) throw ParameterError("records file lacks the header row");
  return out;
}

std::vector<TrialRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read records " + path.string());
  return read_records(in);
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> out;
  for (const auto& [key, rs] : group_cells(records)) {
    CellSummary s;
    s.n = key.n;
    s.p = key.p;
    s.trials = static_cast<int>(rs.size());
    s.k_low = rs.front()->k_low;
    s.k_high = rs.front()->k_high;
    long gap_sum = 0;
    int small_gap = 0, window = 0;
    for (const TrialRecord* r : rs) {
      ++s.f_distribution[r->F_n];
      ++s.t_distribution[r->T_n];
      gap_sum += r->gap;
      small_gap += r->gap <= 1;
      window += r->in_window;
    }
    std::vector<int> freq;
    for (const auto& [v, c] : s.f_distribution) freq.push_back(c);
    std::sort(freq.rbegin(), freq.rend());
    const int top = freq[0] + (freq.size() > 1 ? freq[1] : 0);
    int adjacent = 0;
    for (const auto& [v, c] : s.f_distribution) {
      auto next = s.f_distribution.find(v + 1);
      adjacent = std::max(adjacent, c + (next == s.f_distribution.end() ? 0 : next->second));
    }
    const double t = s.trials;
    s.top_two_mass = top / t;
    s.adjacent_pair_mass = adjacent / t;
    s.mean_gap = static_cast<double>(gap_sum) / t;
    s.gap_at_most_one = small_gap / t;
    s.in_window = window / t;
    s.top_two_flag = s.top_two_mass < kTopTwoTarget;
    s.gap_flag = s.gap_at_most_one < kGapTarget;
    out.push_back(std::move(s));
  }
  return out;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("MIF_THREADS")) {
    unsigned v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialRecord run_trial(int n, const Probability& p, double eps, std::uint64_t trial_seed,
                      std::uint64_t node_budget, bool verify) {
  const Graph g = sample_gnp({n, p, trial_seed});
  const SolveResult tree = solve_max(SearchMode::Tree, g, node_budget);
  SolveHints hints;
  hints.incumbent = tree.witness;
  const SolveResult forest = solve_max(SearchMode::Forest, g, node_budget, hints);
  if (verify) {
    if (!is_induced_tree(g, tree.witness))
      throw std::logic_error("tree witness does not induce a tree");
    if (!is_induced_forest(g, forest.witness)) throw std::logic_error("forest witness has a cycle");
    if (tree.witness.size() != tree.size || forest.witness.size() != forest.size)
      throw std::logic_error("witness size differs from the reported optimum");
    if (forest.size < tree.size) throw std::logic_error("F_n < T_n");
  }
  const ConcentrationPoints cp = concentration_points(n, p, eps);
  TrialRecord r;
  r.n = n;
  r.p = p.text();
  r.trial_seed = trial_seed;
  r.F_n = static_cast<int>(forest.size);
  r.T_n = static_cast<int>(tree.size);
  r.gap = r.F_n - r.T_n;
  r.k_low = cp.k_low;
  r.k_high = cp.k_high;
  r.in_window = r.F_n == cp.k_low || r.F_n == cp.k_high;
  r.status = tree.status == SolveStatus::Optimal && forest.status == SolveStatus::Optimal
                 ? SolveStatus::Optimal
                 : SolveStatus::Incomplete;
  return r;
}

std::filesystem::path summary_path(const std::filesystem::path& records_path) {
  std::filesystem::path p = records_path;
  p.replace_extension(".summary.json");
  return p;
}

void write_summaries_json(std::ostream& out, const std::vector<CellSummary>& summaries) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json dist = nlohmann::ordered_json::object(), tdist = nlohmann::ordered_json::object();
    for (const auto& [v, c] : s.f_distribution) dist[std::to_string(v)] = c;
    for (const auto& [v, c] : s.t_distribution) tdist[std::to_string(v)] = c;
    cells.push_back({{"n", s.n},
                     {"p", s.p},
                     {"trials", s.trials},
                     {"k_low", s.k_low},
                     {"k_high", s.k_high},
                     {"F_distribution", dist},
                     {"T_distribution", tdist},
                     {"top_two_mass", s.top_two_mass},
                     {"adjacent_pair_mass", s.adjacent_pair_mass},
                     {"mean_gap", s.mean_gap},
                     {"gap_at_most_one", s.gap_at_most_one},
                     {"in_window", s.in_window},
                     {"top_two_below_target", s.top_two_flag},
                     {"gap_below_target", s.gap_flag}});
  }
  nlohmann::ordered_json doc = {{"top_two_target", kTopTwoTarget},
                                {"gap_target", kGapTarget},
                                {"cells", cells}};
  out << doc.dump(2) << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const unsigned threads = options.threads ? options.threads : default_thread_count();

  if (cfg.output.has_parent_path()) std::filesystem::create_directories(cfg.output.parent_path());
  std::ofstream out(cfg.output, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + cfg.output.string());
  out << "# mif simulate " << (options.timestamp.empty() ? utc_timestamp() : options.timestamp) << '\n';
  out << "# base_seed=" << cfg.base_seed << " eps=" << format_double(cfg.eps)
      << " trials=" << cfg.trials << " node_budget=" << cfg.node_budget << '\n';
  out << kRecordColumns << '\n';
  out.flush();

  ExperimentResult result;
  auto finish = [&] {
    result.summaries = summarize(result.records);
    std::ofstream js(summary_path(cfg.output), std::ios::trunc);
    if (!js) throw std::runtime_error("cannot write " + summary_path(cfg.output).string());
    write_summaries_json(js, result.summaries);
    if (!js) throw std::runtime_error("write failed for " + summary_path(cfg.output).string());
  };

  for (int n : cfg.n_list) {
    for (const Probability& p : cfg.p_list) {
      std::vector<TrialRecord> cell(static_cast<std::size_t>(cfg.trials));
      std::vector<std::exception_ptr> errors(cell.size());
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int t; (t = next.fetch_add(1)) < cfg.trials;) {
          try {
            const std::uint64_t seed =
                mix_trial_seed(cfg.base_seed, static_cast<std::uint64_t>(n), p.text(),
                               static_cast<std::uint64_t>(t));
            cell[t] = run_trial(n, p, cfg.eps, seed, cfg.node_budget, options.verify);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        }
      };
      const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(cfg.trials));
      if (count <= 1) {
        worker();
      } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
      }
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

      // One writer, whole cell at a time, in trial order.
      for (const auto& r : cell) write_record(out, r);
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + cfg.output.string());
      result.records.insert(result.records.end(), cell.begin(), cell.end());

      int incomplete = 0;
      for (const auto& r : cell) incomplete += r.status == SolveStatus::Incomplete;
      if (incomplete) {
        finish();
        throw BudgetExhausted("cell n=" + std::to_string(n) + " p=" + p.text() + ": " +
                              std::to_string(incomplete) + " trial(s) exhausted the node budget of " +
                              std::to_string(cfg.node_budget));
      }
    }
  }
  finish();
  return result;
}

std::vector<EpsilonRow> sweep_epsilon(const std::vector<TrialRecord>& records,
                                      const std::vector<double>& eps_grid) {
  std::vector<EpsilonRow> rows;
  for (const auto& [key, rs] : group_cells(records)) {
    const Probability p = Probability::parse(key.p);
    for (double eps : eps_grid) {
      const ConcentrationPoints cp = concentration_points(key.n, p, eps);
      int hit = 0;
      for (const TrialRecord* r : rs) hit += r->F_n == cp.k_low || r->F_n == cp.k_high;
      rows.push_back({key.n, key.p, eps, cp.k_low, cp.k_high, static_cast<double>(hit) / rs.size()});
    }
  }
  return rows;
}

std::vector<EpsilonRow> best_epsilon(const std::vector<EpsilonRow>& rows) {
  std::vector<EpsilonRow> best;
  for (const auto& r : rows) {
    auto it = std::find_if(best.begin(), best.end(),
                           [&](const EpsilonRow& b) { return b.n == r.n && b.p == r.p; });
    if (it == best.end()) best.push_back(r);
    else if (r.in_window > it->in_window) *it = r;
  }
  return best;
}

void write_histogram_svg(std::ostream& out, const CellSummary& cell) {
  constexpr int kWidth = 480, kHeight = 300, kMargin = 40;
  if (cell.f_distribution.empty()) throw ParameterError("cell has no records");
  const int lo = cell.f_distribution.begin()->first;
  const int hi = cell.f_distribution.rbegin()->first;
  int peak = 0;
  for (const auto& [v, c] : cell.f_distribution) peak = std::max(peak, c);
  const int bars = hi - lo + 1;
  const double slot = static_cast<double>(kWidth - 2 * kMargin) / bars;
  const double plot_h = kHeight - 2 * kMargin;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"16\" text-anchor=\"middle\">F_n for n=" << cell.n
      << ", p=" << cell.p << " (" << cell.trials << " trials, window " << cell.k_low << "-"
      << cell.k_high << ")</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  for (int v = lo; v <= hi; ++v) {
    auto it = cell.f_distribution.find(v);
    const int c = it == cell.f_distribution.end() ? 0 : it->second;
    const double h = plot_h * c / peak;
    const double x = kMargin + (v - lo) * slot;
    const bool in_window = v == cell.k_low || v == cell.k_high;
    out << "<rect x=\"" << format_fixed(x + 0.1 * slot, 2) << "\" y=\""
        << format_fixed(kHeight - kMargin - h, 2) << "\" width=\"" << format_fixed(0.8 * slot, 2)
        << "\" height=\"" << format_fixed(h, 2) << "\" fill=\"" << (in_window ? "#3b6ea5" : "#999999")
        << "\"/>\n";
    out << "<text x=\"" << format_fixed(x + 0.5 * slot, 2) << "\" y=\"" << kHeight - kMargin + 14
        << "\" text-anchor=\"middle\">" << v << "</text>\n";
    out << "<text x=\"" << format_fixed(x + 0.5 * slot, 2) << "\" y=\""
        << format_fixed(kHeight - kMargin - h - 3, 2) << "\" text-anchor=\"middle\">" << c
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mif
