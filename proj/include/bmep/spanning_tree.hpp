#pragma once

#include "bmep/matrix.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace bmep {

/// A spanning tree of the complete graph on the species.
struct SpanningTree {
  std::size_t species_count = 0;
  std::vector<Edge> edges;  // species pairs (a < b), in the order Kruskal accepted them
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

}  // namespace detail

/// Kruskal over edges ordered by (delta, smaller endpoint, larger endpoint).
/// The order is total, so the result is deterministic.
inline SpanningTree minimum_spanning_tree(const DissimilarityMatrix& d) {
  const std::size_t n = d.size();
  std::vector<Edge> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) candidates.emplace_back(a, b);
  }
  const auto& ints = d.small_integers();
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Edge& x, const Edge& y) {
    if (ints) {
      auto wx = (*ints)(x.first, x.second), wy = (*ints)(y.first, y.second);
      if (wx != wy) return wx < wy;
    } else {
      const Rational& wx = d.exact(x.first, x.second);
      const Rational& wy = d.exact(y.first, y.second);
      if (wx != wy) return wx < wy;
    }
    return x < y;
  });
  SpanningTree tree{n, {}};
  detail::DisjointSets sets(n);
  for (const Edge& e : candidates) {
    if (sets.unite(e.first, e.second)) {
      tree.edges.push_back(e);
      if (tree.edges.size() + 1 == n) break;
    }
  }
  return tree;
}

inline Value spanning_tree_cost(const SpanningTree& tree, const DissimilarityMatrix& d, ValueMode mode) {
  Value total = Value::zero(mode);
  for (auto [a, b] : tree.edges) total = total + d.value(a, b, mode);
  return total;
}

}  // namespace bmep
