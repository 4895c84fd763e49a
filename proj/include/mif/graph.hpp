#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mif/probability.hpp"

namespace mif {

inline constexpr int kMaxVertices = 4096;

inline std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

// A subset of {0, ..., universe-1}.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe) : universe_(universe), bits_(words_for(universe), 0) {}
  VertexSet(std::size_t universe, std::initializer_list<int> members);
  static VertexSet from_list(std::size_t universe, std::span<const int> members);
  static VertexSet full(std::size_t universe);

  std::size_t universe() const { return universe_; }
  std::span<const std::uint64_t> words() const { return bits_; }

  // Range-checked; throws ParameterError.
  void insert(int v);
  void erase(int v);
  bool contains(int v) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<int> to_vector() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < bits_.size(); ++w)
      for (std::uint64_t x = bits_[w]; x; x &= x - 1)
        f(static_cast<int>(w * 64 + std::countr_zero(x)));
  }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  void check(int v) const;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct GnpParams;

// Immutable simple undirected graph on 0..n-1 with bitset adjacency rows.
class Graph {
 public:
  // Throws ParameterError on self-loops, duplicate edges or out-of-range ends.
  static Graph from_edges(int n, std::span<const std::pair<int, int>> edges);
  static Graph from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
    return from_edges(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
  }

  int order() const { return n_; }
  std::size_t edge_count() const { return edges_; }
  std::size_t row_words() const { return stride_; }
  std::span<const std::uint64_t> row(int v) const {
    return {adj_.data() + static_cast<std::size_t>(v) * stride_, stride_};
  }
  bool adjacent(int u, int v) const { return (row(u)[v >> 6] >> (v & 63)) & 1U; }
  int degree(int v) const;
  std::vector<std::pair<int, int>> edge_list() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  explicit Graph(int n);
  void add_edge_unchecked(int u, int v);
  friend Graph sample_gnp(const GnpParams& params);

  int n_ = 0;
  std::size_t stride_ = 0;
  std::size_t edges_ = 0;
  std::vector<std::uint64_t> adj_;
};

struct GnpParams {
  int n = 1;
  Probability p = Probability::parse("0.5");
  std::uint64_t seed = 0;
};

// Each pair u < v is visited in lexicographic order and kept iff the next
// draw of mt19937_64(seed) is below floor(p * 2^64).
Graph sample_gnp(const GnpParams& params);

std::size_t induced_edge_count(const Graph& g, const VertexSet& s);
std::size_t component_count(const Graph& g, const VertexSet& s);
bool is_induced_forest(const Graph& g, const VertexSet& s);
// Non-empty, connected and acyclic.
bool is_induced_tree(const Graph& g, const VertexSet& s);

// Text format: "n m" then m lines "u v" with 0 <= u < v < n.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace mif
