#include "mif/solver.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mif/error.hpp"
#include "mif/union_find.hpp"

namespace mif {

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::Forest ? "forest" : "tree";
}

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::Optimal ? "optimal" : "incomplete";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "forest") return SearchMode::Forest;
  if (text == "tree") return SearchMode::Tree;
  throw ParameterError("mode must be 'forest' or 'tree', got '" + std::string(text) + "'");
}

namespace {

using Word = std::uint64_t;

void check_witness(SearchMode mode, const Graph& g, const SolveResult& r) {
  bool ok = r.witness.size() == r.size &&
            (mode == SearchMode::Forest ? is_induced_forest(g, r.witness)
                                        : (r.size == 0 || is_induced_tree(g, r.witness)));
  if (!ok) throw std::logic_error("solver produced an invalid witness");
}

// ---------------------------------------------------------------------------
// Brute force over bitmasks. Deliberately shares nothing with the search
// below beyond the Graph type.

bool mask_acyclic(const std::vector<std::uint32_t>& adj, std::uint32_t mask, int& components) {
  int edges2 = 0;
  for (std::uint32_t m = mask; m; m &= m - 1) edges2 += std::popcount(adj[std::countr_zero(m)] & mask);
  components = 0;
  for (std::uint32_t left = mask; left;) {
    ++components;
    std::uint32_t reached = left & (~left + 1), frontier = reached;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      next &= mask & ~reached;
      reached |= next;
      frontier = next;
    }
    left &= ~reached;
  }
  return edges2 / 2 + components == std::popcount(mask);
}

}  // namespace

SolveResult brute_force_max(SearchMode mode, const Graph& g) {
  const int n = g.order();
  if (n > kBruteForceMaxVertices)
    throw ParameterError("brute force oracle is limited to " + std::to_string(kBruteForceMaxVertices) +
                         " vertices, got " + std::to_string(n));
  std::vector<std::uint32_t> adj(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (g.adjacent(u, v)) adj[u] |= 1U << v;

  SolveResult result;
  result.mode = mode;
  result.witness = VertexSet(n);
  for (int size = n; size >= 1; --size) {
    // Gosper's hack: all masks with `size` bits, increasing.
    std::uint32_t mask = (size == 32) ? ~0U : ((1U << size) - 1);
    const std::uint32_t limit = 1U << n;
    while (mask < limit) {
      ++result.nodes_explored;
      int components = 0;
      if (mask_acyclic(adj, mask, components) && (mode == SearchMode::Forest || components == 1)) {
        result.size = static_cast<std::size_t>(size);
        for (std::uint32_t m = mask; m; m &= m - 1) result.witness.insert(std::countr_zero(m));
        check_witness(mode, g, result);
        return result;
      }
      std::uint32_t c = mask & (~mask + 1), r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  return result;
}

namespace {

// ---------------------------------------------------------------------------
// Branch and bound.
//
// Vertices are relabelled so that index order is the branching order
// (degree ascending, original index ascending): low-degree vertices first
// gives larger cliques early in the greedy partition below. Candidate sets only ever
// hold vertices whose addition keeps S acyclic, i.e. vertices with at most
// one neighbour in each component of S.
//
// Bound: the candidates are split greedily into classes of two kinds.
//  - a clique of G meets any induced forest in at most two vertices;
//  - a clique of G whose members all touch the same component of S meets
//    any acyclic extension of S in at most one vertex (two of them plus
//    their common component close a cycle).
// The extension can add at most sum(min(|class|, cap)) vertices.

class Search {
 public:
  Search(const Graph& g, SearchMode mode, std::uint64_t budget, std::size_t stop_at)
      : mode_(mode), budget_(budget), stop_at_(stop_at), n_(g.order()), words_(words_for(g.order())) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<int> degree(n_);
    for (int v = 0; v < n_; ++v) degree[v] = g.degree(v);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return degree[a] < degree[b]; });
    position_.resize(n_);
    for (int i = 0; i < n_; ++i) position_[order_[i]] = i;
    const auto& position = position_;
    adj_.assign(static_cast<std::size_t>(n_) * words_, 0);
    for (auto [u, v] : g.edge_list()) {
      set_bit(row_mut(position[u]), position[v]);
      set_bit(row_mut(position[v]), position[u]);
    }
    uf_.reset(n_);
    in_s_.assign(words_, 0);
    seed_incumbent();
  }

  void offer_incumbent(const VertexSet& set) {
    if (set.size() <= best_.size()) return;
    best_.clear();
    set.for_each([&](int v) { best_.push_back(position_[v]); });
  }

  SolveResult run() {
    if (best_.size() < stop_at_) {
      if (mode_ == SearchMode::Forest) {
        std::vector<Word>& all = frame(0).cand;
        all.assign(words_, 0);
        for (int v = 0; v < n_; ++v) set_bit(all.data(), v);
        expand_forest(0);
      } else {
        // Each tree is enumerated from its smallest vertex.
        for (int root = 0; root < n_ && !stopped(); ++root) {
          if (n_ - root <= static_cast<int>(best_.size())) break;
          std::vector<Word>& cand = frame(1).cand;
          cand.assign(words_, 0);
          for (int v = root + 1; v < n_; ++v) set_bit(cand.data(), v);
          push(root);
          expand_tree(1);
          pop();
        }
      }
    }
    SolveResult out;
    out.mode = mode_;
    out.status = aborted_ ? SolveStatus::Incomplete : SolveStatus::Optimal;
    out.nodes_explored = nodes_;
    out.size = best_.size();
    out.witness = VertexSet(n_);
    for (int v : best_) out.witness.insert(order_[v]);
    return out;
  }

 private:
  struct Frame {
    std::vector<Word> cand;
    std::vector<Word> rest;
    std::vector<Word> work;
    std::vector<Word> reach, frontier, next, attach;
    std::vector<int> seq;
    std::vector<int> prefix_bound;
    std::vector<Word> comps;
    std::vector<Word> touch;
    std::vector<int> touched;
  };

  static void set_bit(Word* w, int v) { w[v >> 6] |= Word{1} << (v & 63); }
  static void clear_bit(Word* w, int v) { w[v >> 6] &= ~(Word{1} << (v & 63)); }
  static bool test_bit(const Word* w, int v) { return (w[v >> 6] >> (v & 63)) & 1U; }

  Word* row_mut(int v) { return adj_.data() + static_cast<std::size_t>(v) * words_; }
  const Word* row(int v) const { return adj_.data() + static_cast<std::size_t>(v) * words_; }

  int count(const Word* w) const {
    int c = 0;
    for (std::size_t i = 0; i < words_; ++i) c += std::popcount(w[i]);
    return c;
  }

  bool meets(const Word* a, const Word* b) const {
    for (std::size_t i = 0; i < words_; ++i)
      if (a[i] & b[i]) return true;
    return false;
  }

  // True when a and b share at least two elements.
  bool meets_twice(const Word* a, const Word* b) const {
    int c = 0;
    for (std::size_t i = 0; i < words_; ++i)
      if ((c += std::popcount(a[i] & b[i])) >= 2) return true;
    return false;
  }

  bool subset_of(const Word* a, const Word* b) const {
    for (std::size_t i = 0; i < words_; ++i)
      if (a[i] & ~b[i]) return false;
    return true;
  }

  template <class F>
  void each_bit(const Word* w, F&& f) const {
    for (std::size_t i = 0; i < words_; ++i)
      for (Word x = w[i]; x; x &= x - 1) f(static_cast<int>(i * 64 + std::countr_zero(x)));
  }

  Frame& frame(std::size_t depth) {
    while (frames_.size() <= depth) frames_.emplace_back();
    return frames_[depth];
  }

  bool stopped() const { return aborted_ || best_.size() >= stop_at_; }

  bool tick() {
    if (stopped()) return false;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return false;
    }
    return true;
  }

  void push(int v) {
    s_.push_back(v);
    set_bit(in_s_.data(), v);
  }
  void pop() {
    clear_bit(in_s_.data(), s_.back());
    s_.pop_back();
  }

  void record() {
    if (s_.size() > best_.size()) best_ = s_;
  }

  // Greedy incumbent: scan vertices by increasing degree and keep each one
  // that leaves the set a forest (resp. attaches by exactly one edge).
  void seed_incumbent() {
    RollbackUnionFind uf(n_);
    std::vector<Word> in(words_, 0);
    std::vector<int> chosen, roots;
    for (int v = 0; v < n_; ++v) {
      roots.clear();
      bool ok = true;
      each_bit(row(v), [&](int u) {
        if (!test_bit(in.data(), u)) return;
        int r = uf.find(u);
        if (std::find(roots.begin(), roots.end(), r) != roots.end()) ok = false;
        roots.push_back(r);
      });
      if (!ok) continue;
      if (mode_ == SearchMode::Tree && !chosen.empty() && roots.size() != 1) continue;
      for (int r : roots) uf.unite(r, v);
      set_bit(in.data(), v);
      chosen.push_back(v);
    }
    best_ = chosen;
  }

  // Components of S as bitsets in f.comps, largest first; returns the count.
  int collect_components(Frame& f) {
    f.touched.clear();
    for (int u : s_) {
      int r = uf_.find(u);
      if (std::find(f.touched.begin(), f.touched.end(), r) == f.touched.end()) f.touched.push_back(r);
    }
    std::stable_sort(f.touched.begin(), f.touched.end(),
                     [&](int a, int b) { return uf_.component_size(a) > uf_.component_size(b); });
    const int k = static_cast<int>(f.touched.size());
    f.comps.assign(static_cast<std::size_t>(k) * words_, 0);
    for (int u : s_) {
      int r = uf_.find(u);
      int c = static_cast<int>(std::find(f.touched.begin(), f.touched.end(), r) - f.touched.begin());
      set_bit(f.comps.data() + static_cast<std::size_t>(c) * words_, u);
    }
    return k;
  }

  // Fills f.seq with the candidates grouped by class and f.prefix_bound[t]
  // with the bound for the prefix seq[0..t]. Classes are grown greedily from
  // the lowest unassigned vertex; a vertex touching S opens a one-cap class
  // restricted to its first touched component.
  void partition(Frame& f, const Word* cand) {
    const int ncomp = collect_components(f);
    f.seq.clear();
    f.prefix_bound.clear();
    // attach[c] = candidates touching component c.
    f.touch.assign(static_cast<std::size_t>(ncomp) * words_, 0);
    for (int c = 0; c < ncomp; ++c) {
      Word* a = f.touch.data() + static_cast<std::size_t>(c) * words_;
      each_bit(f.comps.data() + static_cast<std::size_t>(c) * words_, [&](int u) {
        const Word* nu = row(u);
        for (std::size_t i = 0; i < words_; ++i) a[i] |= nu[i];
      });
      for (std::size_t i = 0; i < words_; ++i) a[i] &= cand[i];
    }
    f.work.assign(cand, cand + words_);  // unassigned
    f.next.resize(words_);
    int bound = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      while (f.work[w]) {
        int u = static_cast<int>(w * 64 + std::countr_zero(f.work[w]));
        int cap = 2;
        const Word* limit = nullptr;
        for (int c = 0; c < ncomp; ++c) {
          const Word* a = f.touch.data() + static_cast<std::size_t>(c) * words_;
          if (test_bit(a, u)) {
            cap = 1;
            limit = a;
            break;
          }
        }
        for (std::size_t i = 0; i < words_; ++i) f.next[i] = f.work[i] & (limit ? limit[i] : ~Word{0});
        int taken = 0;
        while (u >= 0) {
          clear_bit(f.work.data(), u);
          f.seq.push_back(u);
          if (++taken <= cap) ++bound;
          f.prefix_bound.push_back(bound);
          const Word* nu = row(u);
          u = -1;
          for (std::size_t i = 0; i < words_; ++i) {
            f.next[i] &= nu[i];
            if (u < 0 && f.next[i]) u = static_cast<int>(i * 64 + std::countr_zero(f.next[i]));
          }
        }
      }
    }
  }

  int bound_of(Frame& f, const Word* cand) {
    partition(f, cand);
    return f.prefix_bound.empty() ? 0 : f.prefix_bound.back();
  }

  void expand_forest(std::size_t depth) {
    if (!tick()) return;
    record();
    const int have = static_cast<int>(s_.size());
    Frame& f = frame(depth);
    if (have + count(f.cand.data()) <= static_cast<int>(best_.size())) return;
    partition(f, f.cand.data());
    f.rest = f.cand;
    for (int t = static_cast<int>(f.seq.size()) - 1; t >= 0; --t) {
      if (stopped()) return;
      if (have + f.prefix_bound[t] <= static_cast<int>(best_.size())) return;
      const int v = f.seq[t];
      clear_bit(f.rest.data(), v);

      const std::size_t mark = uf_.checkpoint();
      each_bit(row(v), [&](int u) {
        if (test_bit(in_s_.data(), u)) uf_.unite(u, v);
      });
      push(v);
      // Only candidates touching v's merged component can lose eligibility.
      f.work.assign(words_, 0);
      const int root = uf_.find(v);
      for (int u : s_)
        if (uf_.find(u) == root) set_bit(f.work.data(), u);
      Frame& child = frame(depth + 1);
      child.cand = f.rest;
      each_bit(f.rest.data(), [&](int u) {
        if (meets_twice(row(u), f.work.data())) clear_bit(child.cand.data(), u);
      });
      expand_forest(depth + 1);
      pop();
      uf_.rollback(mark);
    }
  }

  // S is a non-empty tree; candidates have at most one neighbour in S.
  void expand_tree(std::size_t depth) {
    if (!tick()) return;
    record();
    const int have = static_cast<int>(s_.size());
    Frame& f = frame(depth);
    Word* cand = f.cand.data();
    f.attach.assign(words_, 0);
    for (int u : s_)
      for (std::size_t i = 0; i < words_; ++i) f.attach[i] |= row(u)[i];
    while (!stopped()) {
      // Keep only candidates reachable from S through candidates.
      f.reach.assign(words_, 0);
      f.frontier.assign(words_, 0);
      for (std::size_t i = 0; i < words_; ++i) f.frontier[i] = f.attach[i] & cand[i];
      bool grew = true;
      while (grew) {
        grew = false;
        f.next.assign(words_, 0);
        for (std::size_t i = 0; i < words_; ++i) f.reach[i] |= f.frontier[i];
        each_bit(f.frontier.data(), [&](int u) {
          for (std::size_t i = 0; i < words_; ++i) f.next[i] |= row(u)[i];
        });
        for (std::size_t i = 0; i < words_; ++i) {
          f.next[i] &= cand[i] & ~f.reach[i];
          grew = grew || f.next[i];
        }
        std::swap(f.frontier, f.next);
      }
      std::copy(f.reach.begin(), f.reach.end(), cand);
      const int best = static_cast<int>(best_.size());
      if (have + count(cand) <= best) return;
      if (have + bound_of(f, cand) <= best) return;

      int v = -1;
      for (std::size_t i = 0; i < words_ && v < 0; ++i)
        if (Word a = f.attach[i] & cand[i]) v = static_cast<int>(i * 64 + std::countr_zero(a));
      clear_bit(cand, v);

      Frame& child = frame(depth + 1);
      child.cand = f.cand;
      // Candidates already touching S and adjacent to v would close a cycle.
      for (std::size_t i = 0; i < words_; ++i) child.cand[i] &= ~(row(v)[i] & f.attach[i]);
      const std::size_t mark = uf_.checkpoint();
      each_bit(row(v), [&](int u) {
        if (test_bit(in_s_.data(), u)) uf_.unite(u, v);
      });
      push(v);
      expand_tree(depth + 1);
      pop();
      uf_.rollback(mark);
    }
  }

  SearchMode mode_;
  std::uint64_t budget_;
  std::size_t stop_at_;
  int n_;
  std::size_t words_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<Word> adj_;
  std::deque<Frame> frames_;
  RollbackUnionFind uf_;
  std::vector<int> s_;
  std::vector<Word> in_s_;
  std::vector<int> best_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

SolveResult solve_max(SearchMode mode, const Graph& g, std::uint64_t node_budget,
                      const SolveHints& hints) {
  std::size_t stop_at = static_cast<std::size_t>(g.order()) + 1;
  if (hints.upper_bound) stop_at = std::min(stop_at, *hints.upper_bound);
  Search search(g, mode, node_budget, stop_at);
  if (hints.incumbent) {
    const VertexSet& inc = *hints.incumbent;
    bool feasible = mode == SearchMode::Forest ? is_induced_forest(g, inc)
                                               : (inc.empty() || is_induced_tree(g, inc));
    if (!feasible)
      throw ParameterError(std::string("hint incumbent is not an induced ") +
                           std::string(to_string(mode)));
    search.offer_incumbent(inc);
  }
  SolveResult result = search.run();
  check_witness(mode, g, result);
  return result;
}

}  // namespace mif
