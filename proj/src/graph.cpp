#include "mif/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "mif/error.hpp"
#include "mif/rng.hpp"

namespace mif {

VertexSet::VertexSet(std::size_t universe, std::initializer_list<int> members) : VertexSet(universe) {
  for (int v : members) insert(v);
}

VertexSet VertexSet::from_list(std::size_t universe, std::span<const int> members) {
  VertexSet s(universe);
  for (int v : members) s.insert(v);
  return s;
}

VertexSet VertexSet::full(std::size_t universe) {
  VertexSet s(universe);
  for (std::size_t v = 0; v < universe; ++v) s.bits_[v >> 6] |= std::uint64_t{1} << (v & 63);
  return s;
}

void VertexSet::check(int v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= universe_)
    throw ParameterError("vertex " + std::to_string(v) + " outside 0.." +
                         std::to_string(static_cast<long long>(universe_) - 1));
}

void VertexSet::insert(int v) {
  check(v);
  bits_[v >> 6] |= std::uint64_t{1} << (v & 63);
}

void VertexSet::erase(int v) {
  check(v);
  bits_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
}

bool VertexSet::contains(int v) const {
  check(v);
  return (bits_[v >> 6] >> (v & 63)) & 1U;
}

std::size_t VertexSet::size() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<int> VertexSet::to_vector() const {
  std::vector<int> out;
  for_each([&](int v) { out.push_back(v); });
  return out;
}

Graph::Graph(int n) {
  if (n < 1 || n > kMaxVertices)
    throw ParameterError("vertex count must be in 1.." + std::to_string(kMaxVertices) + ", got " +
                         std::to_string(n));
  n_ = n;
  stride_ = words_for(static_cast<std::size_t>(n));
  adj_.assign(stride_ * static_cast<std::size_t>(n), 0);
}

void Graph::add_edge_unchecked(int u, int v) {
  adj_[static_cast<std::size_t>(u) * stride_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
  adj_[static_cast<std::size_t>(v) * stride_ + (u >> 6)] |= std::uint64_t{1} << (u & 63);
  ++edges_;
}

Graph Graph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  Graph g(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw ParameterError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    if (u == v) throw ParameterError("self-loop at vertex " + std::to_string(u));
    if (g.adjacent(u, v))
      throw ParameterError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    g.add_edge_unchecked(u, v);
  }
  return g;
}

int Graph::degree(int v) const {
  int d = 0;
  for (auto w : row(v)) d += std::popcount(w);
  return d;
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edges_);
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (adjacent(u, v)) out.emplace_back(u, v);
  return out;
}

Graph sample_gnp(const GnpParams& params) {
  Graph g(params.n);
  const std::uint64_t threshold = params.p.threshold64();
  Engine engine(params.seed);
  for (int u = 0; u < params.n; ++u)
    for (int v = u + 1; v < params.n; ++v)
      if (engine() < threshold) g.add_edge_unchecked(u, v);
  return g;
}

namespace {

void check_universe(const Graph& g, const VertexSet& s) {
  if (s.universe() > static_cast<std::size_t>(g.order())) {
    // Members beyond the graph are out of range; an oversized but empty tail is fine.
    for (int v : s.to_vector())
      if (v >= g.order())
        throw ParameterError("vertex " + std::to_string(v) + " not in graph of order " +
                             std::to_string(g.order()));
  }
}

std::uint64_t word_or_zero(const VertexSet& s, std::size_t w) {
  auto words = s.words();
  return w < words.size() ? words[w] : 0;
}

}  // namespace

std::size_t induced_edge_count(const Graph& g, const VertexSet& s) {
  check_universe(g, s);
  std::size_t twice = 0;
  s.for_each([&](int v) {
    auto r = g.row(v);
    for (std::size_t w = 0; w < r.size(); ++w) twice += std::popcount(r[w] & word_or_zero(s, w));
  });
  return twice / 2;
}

std::size_t component_count(const Graph& g, const VertexSet& s) {
  check_universe(g, s);
  std::vector<int> members = s.to_vector();
  std::vector<int> parent(members.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = members.size();
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (g.adjacent(members[i], members[j])) {
        int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) {
          parent[a] = b;
          --components;
        }
      }
  return components;
}

bool is_induced_forest(const Graph& g, const VertexSet& s) {
  return induced_edge_count(g, s) + component_count(g, s) == s.size();
}

bool is_induced_tree(const Graph& g, const VertexSet& s) {
  return !s.empty() && component_count(g, s) == 1 && induced_edge_count(g, s) + 1 == s.size();
}

Graph read_graph(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto pos = out.find_first_not_of(" \t\r");
      if (pos != std::string::npos && out[pos] != '#') return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParameterError("graph file is empty");
  long long n = -1, m = -1;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> m) || (header >> extra))
      throw ParameterError("graph header must be 'n m', got '" + line + "'");
  }
  if (n < 1 || n > kMaxVertices) throw ParameterError("vertex count out of range in graph header");
  if (m < 0 || m > n * (n - 1) / 2) throw ParameterError("edge count out of range in graph header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line(line))
      throw ParameterError("graph file ended after " + std::to_string(i) + " of " +
                           std::to_string(m) + " edges");
    std::istringstream row(line);
    long long u = -1, v = -1;
    std::string extra;
    if (!(row >> u >> v) || (row >> extra)) throw ParameterError("malformed edge line '" + line + "'");
    if (u == v) throw ParameterError("self-loop in edge line '" + line + "'");
    if (!(0 <= u && u < v && v < n))
      throw ParameterError("edge line must satisfy 0 <= u < v < n: '" + line + "'");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  if (next_line(line)) throw ParameterError("trailing content after edge list: '" + line + "'");
  return Graph::from_edges(static_cast<int>(n), edges);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

}  // namespace mif
