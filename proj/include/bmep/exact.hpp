#pragma once

#include "bmep/matrix.hpp"
#include "bmep/numeric.hpp"
#include "bmep/objective.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bmep {

inline constexpr std::size_t kDefaultExactCap = 10;
inline constexpr std::size_t kHardExactCap = 11;

/// (2n-5)!!, the number of leaf-labelled cubic topologies on n >= 3 leaves.
inline BigInt cubic_topology_count(std::size_t n) {
  BigInt count = 1;
  for (std::size_t k = 3; k + 2 <= 2 * n - 3; k += 2) count *= k;  // 1 * 3 * ... * (2n-5)
  return count;
}

/// Working cubic topology during enumeration. Leaf k is vertex k; internal
/// vertices are numbered from n upward in insertion order.
class CubicTopology {
 public:
  explicit CubicTopology(std::size_t n) : n_(n), adjacency_(2 * n - 2) {
    // Leaves 0, 1, 2 around the first internal vertex.
    for (Vertex leaf = 0; leaf < 3; ++leaf) {
      link(leaf, n_);
      edges_.emplace_back(leaf, n_);
    }
    leaves_ = 3;
  }

  std::size_t target_leaves() const { return n_; }
  std::size_t leaves_placed() const { return leaves_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Inserts the next leaf into edge `e`, subdividing it with a new internal vertex.
  void insert(std::size_t e) {
    auto [a, b] = edges_[e];
    const Vertex leaf = leaves_;
    const Vertex w = n_ + leaves_ - 2;
    replace(a, b, w);
    replace(b, a, w);
    adjacency_[w] = {a, b, leaf};
    degree_[w] = 3;
    adjacency_[leaf] = {w, 0, 0};
    degree_[leaf] = 1;
    edges_[e] = {a, w};
    edges_.emplace_back(w, b);
    edges_.emplace_back(w, leaf);
    ++leaves_;
  }

  /// Reverts the most recent `insert(e)`.
  void remove(std::size_t e) {
    --leaves_;
    const Vertex w = n_ + leaves_ - 2;
    edges_.pop_back();
    const Vertex b = edges_.back().second;
    edges_.pop_back();
    const Vertex a = edges_[e].first;
    edges_[e] = {a, b};
    replace(a, w, b);
    replace(b, w, a);
    degree_[w] = 0;
    degree_[leaves_] = 0;
  }

  /// Leaf-to-leaf distances of the completed topology (row-major n x n).
  void leaf_distances(std::vector<int>& out) const {
    out.assign(n_ * n_, 0);
    std::array<std::pair<Vertex, Vertex>, 64> stack{};
    std::array<int, 64> depth{};
    for (Vertex i = 0; i < n_; ++i) {
      std::size_t top = 0;
      stack[top] = {adjacency_[i][0], i};
      depth[top++] = 1;
      while (top) {
        --top;
        auto [x, from] = stack[top];
        int dx = depth[top];
        if (x < n_) {
          out[i * n_ + x] = dx;
          continue;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          Vertex y = adjacency_[x][k];
          if (y == from) continue;
          stack[top] = {y, x};
          depth[top++] = dx + 1;
        }
      }
    }
  }

  LeafTree to_leaf_tree() const {
    std::vector<Vertex> leaf_of(n_);
    for (Vertex i = 0; i < n_; ++i) leaf_of[i] = i;
    return LeafTree::from_edges(adjacency_.size(), edges_, leaf_of);
  }

 private:
  void link(Vertex a, Vertex b) {
    adjacency_[a][degree_[a]++] = b;
    adjacency_[b][degree_[b]++] = a;
  }
  void replace(Vertex at, Vertex old_neighbor, Vertex new_neighbor) {
    for (std::size_t k = 0; k < degree_[at]; ++k) {
      if (adjacency_[at][k] == old_neighbor) {
        adjacency_[at][k] = new_neighbor;
        return;
      }
    }
  }

  std::size_t n_;
  std::vector<std::array<Vertex, 3>> adjacency_;
  std::array<std::size_t, 64> degree_{};
  std::vector<Edge> edges_;
  std::size_t leaves_ = 0;
};

namespace detail {

inline void check_exact_cap(std::size_t n, std::size_t max_n) {
  if (max_n > kHardExactCap) {
    throw InvalidInput("exact enumeration cap cannot exceed " + std::to_string(kHardExactCap));
  }
  if (n < 3 || n > max_n) {
    throw InvalidInput("exact enumeration needs 3 <= n <= " + std::to_string(max_n) + ", got n = " +
                       std::to_string(n) + " (" + cubic_topology_count(std::max<std::size_t>(n, 3)).str() +
                       " topologies)");
  }
}

inline void enumerate_from(CubicTopology& topo, const std::function<void(const CubicTopology&)>& visit) {
  if (topo.leaves_placed() == topo.target_leaves()) {
    visit(topo);
    return;
  }
  const std::size_t edges = topo.edge_count();
  for (std::size_t e = 0; e < edges; ++e) {
    topo.insert(e);
    enumerate_from(topo, visit);
    topo.remove(e);
  }
}

}  // namespace detail

/// Visits every leaf-labelled cubic topology on n leaves exactly once, in a
/// fixed depth-first order (leaf k+1 inserted into each edge of each k-leaf tree).
inline void for_each_cubic_topology(std::size_t n, const std::function<void(const CubicTopology&)>& visit,
                                    std::size_t max_n = kDefaultExactCap) {
  detail::check_exact_cap(n, max_n);
  CubicTopology topo(n);
  detail::enumerate_from(topo, visit);
}

inline std::vector<LeafTree> enumerate_cubic_topologies(std::size_t n, std::size_t max_n = kDefaultExactCap) {
  std::vector<LeafTree> out;
  for_each_cubic_topology(n, [&](const CubicTopology& t) { out.push_back(t.to_leaf_tree()); }, max_n);
  return out;
}

struct ExactResult {
  Value optimum;
  LeafTree tree;
  std::uint64_t topologies_examined = 0;
};

/// Minimum of f over all cubic topologies, with the first minimiser in
/// enumeration order as witness. No pruning.
inline ExactResult solve_exact(const DissimilarityMatrix& d, ValueMode mode, std::size_t max_n = kDefaultExactCap) {
  d.require_mode(mode);
  const std::size_t n = d.size();
  detail::check_exact_cap(n, max_n);
  std::vector<int> dist;
  std::uint64_t examined = 0;
  std::optional<LeafTree> witness;

  if (mode == ValueMode::Exact && d.small_integers()) {
    // f * 2^(n-2) = sum delta_ij 2^(n - d_ij), an integer since d_ij <= n - 1.
    const auto& ints = *d.small_integers();
    std::optional<__int128> best;
    for_each_cubic_topology(
        n,
        [&](const CubicTopology& t) {
          ++examined;
          t.leaf_distances(dist);
          __int128 total = 0;
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
              total += static_cast<__int128>(ints(i, j)) << (n - dist[i * n + j]);
            }
          }
          if (!best || total < *best) {
            best = total;
            witness = t.to_leaf_tree();
          }
        },
        max_n);
    // Split the 128-bit value for conversion.
    __int128 v = *best;
    BigInt big = BigInt(static_cast<std::uint64_t>(v >> 64)) << 64;
    big += BigInt(static_cast<std::uint64_t>(v));
    Rational optimum = Rational(big) / pow2(static_cast<std::int64_t>(n) - 2);
    return {Value(optimum), std::move(*witness), examined};
  }

  if (mode == ValueMode::Exact) {
    std::optional<Dyadic> best;
    for_each_cubic_topology(
        n,
        [&](const CubicTopology& t) {
          ++examined;
          t.leaf_distances(dist);
          Dyadic total;
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
              if (d.exact(i, j) == 0) continue;
              total += Dyadic(boost::multiprecision::numerator(d.exact(i, j)), 2 - dist[i * n + j]);
            }
          }
          if (!best || total < *best) {
            best = total;
            witness = t.to_leaf_tree();
          }
        },
        max_n);
    return {Value(best->to_rational()), std::move(*witness), examined};
  }

  std::optional<double> best;
  for_each_cubic_topology(
      n,
      [&](const CubicTopology& t) {
        ++examined;
        t.leaf_distances(dist);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) total += std::ldexp(d(i, j), 2 - dist[i * n + j]);
        }
        if (!best || total < *best) {
          best = total;
          witness = t.to_leaf_tree();
        }
      },
      max_n);
  return {Value(*best), std::move(*witness), examined};
}

inline ExactResult solve_exact(const DissimilarityMatrix& d) { return solve_exact(d, d.default_mode()); }

}  // namespace bmep
