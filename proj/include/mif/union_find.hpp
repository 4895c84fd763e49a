#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace mif {

// Disjoint sets with undo. Union by size and no path compression, so every
// find is O(log n) and each union can be reverted exactly by popping one
// history entry. Checkpoints are history lengths.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    size_.assign(n, 1);
    history_.clear();
  }

  std::size_t size() const { return parent_.size(); }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  // Valid for roots only.
  int component_size(int root) const { return size_[root]; }

  bool same(int a, int b) const { return find(a) == find(b); }

  // Returns false (and records nothing) when a and b are already joined.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    history_.push_back(b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t checkpoint() const { return history_.size(); }

  void rollback(std::size_t mark) {
    while (history_.size() > mark) {
      int child = history_.back();
      history_.pop_back();
      int root = parent_[child];
      size_[root] -= size_[child];
      parent_[child] = child;
    }
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

}  // namespace mif
