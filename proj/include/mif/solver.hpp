#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mif/graph.hpp"

namespace mif {

enum class SearchMode { Forest, Tree };
enum class SolveStatus { Optimal, Incomplete };

std::string_view to_string(SearchMode mode);
std::string_view to_string(SolveStatus status);
SearchMode parse_search_mode(std::string_view text);

struct SolveResult {
  std::size_t size = 0;
  VertexSet witness;
  std::uint64_t nodes_explored = 0;
  SearchMode mode = SearchMode::Forest;
  SolveStatus status = SolveStatus::Optimal;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;
inline constexpr int kBruteForceMaxVertices = 22;

// Exhaustive oracle: walks subsets from the largest size down and returns the
// first one accepted by is_induced_forest / is_induced_tree. Refuses graphs
// with more than kBruteForceMaxVertices vertices.
SolveResult brute_force_max(SearchMode mode, const Graph& g);

// Optional knowledge that speeds up solve_max without affecting the answer.
struct SolveHints {
  // A known feasible set for the mode (e.g. a tree witness when solving
  // forest mode). Validated; ParameterError if it is not feasible.
  std::optional<VertexSet> incumbent;
  // A known upper bound on the optimum (e.g. F when solving tree mode). The
  // search stops as soon as it finds a set this large.
  std::optional<std::size_t> upper_bound;
};

// Exact branch and bound. When the node budget runs out the result carries
// status Incomplete and the best set found so far, which is a valid witness
// but not a certified optimum.
SolveResult solve_max(SearchMode mode, const Graph& g,
                      std::uint64_t node_budget = kDefaultNodeBudget,
                      const SolveHints& hints = {});

}  // namespace mif
