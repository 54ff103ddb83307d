#pragma once

#include "bmep/matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bmep {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

inline constexpr std::size_t kNoSpecies = std::numeric_limits<std::size_t>::max();

/// Unrooted tree whose degree-1 vertices carry the species 0..n-1 bijectively.
/// Internal vertices are anonymous; their identifiers carry no meaning beyond
/// providing a deterministic order.
class LeafTree {
 public:
  LeafTree() = default;

  /// `leaf_of_species[s]` is the vertex labelled with species s.
  static LeafTree from_edges(std::size_t vertex_count, std::span<const Edge> edges,
                             std::span<const Vertex> leaf_of_species) {
    LeafTree t;
    t.adjacency_.assign(vertex_count, {});
    for (auto [a, b] : edges) {
      if (a >= vertex_count || b >= vertex_count) throw InvalidInput("edge endpoint out of range");
      if (a == b) throw InvalidInput("self-loop in tree");
      t.adjacency_[a].push_back(b);
      t.adjacency_[b].push_back(a);
    }
    for (auto& nb : t.adjacency_) {
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) throw InvalidInput("parallel edges in tree");
    }
    t.leaf_of_.assign(leaf_of_species.begin(), leaf_of_species.end());
    t.species_of_.assign(vertex_count, kNoSpecies);
    for (Species s = 0; s < t.leaf_of_.size(); ++s) {
      Vertex v = t.leaf_of_[s];
      if (v >= vertex_count) throw InvalidInput("species mapped to a missing vertex");
      if (t.species_of_[v] != kNoSpecies) throw InvalidInput("vertex carries two species");
      t.species_of_[v] = s;
    }
    t.validate(edges.size());
    return t;
  }

  std::size_t leaf_count() const { return leaf_of_.size(); }
  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return adjacency_.empty() ? 0 : adjacency_.size() - 1; }

  /// Neighbours in ascending vertex order.
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }
  bool is_leaf(Vertex v) const { return species_of_[v] != kNoSpecies; }
  Vertex leaf(Species s) const { return leaf_of_[s]; }
  /// kNoSpecies for internal vertices.
  Species species_at(Vertex v) const { return species_of_[v]; }
  std::span<const Vertex> leaves() const { return leaf_of_; }

  std::vector<Vertex> internal_vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < vertex_count(); ++v) {
      if (!is_leaf(v)) out.push_back(v);
    }
    return out;
  }

  /// Edges with a < b, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex a = 0; a < vertex_count(); ++a) {
      for (Vertex b : adjacency_[a]) {
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

 private:
  void validate(std::size_t edge_count) const {
    const std::size_t v = vertex_count();
    if (leaf_of_.size() < 3) throw InvalidInput("tree needs at least 3 leaves");
    if (edge_count + 1 != v) throw InvalidInput("tree must have exactly |V|-1 edges");
    std::vector<bool> seen(v, false);
    std::vector<Vertex> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : adjacency_[x]) {
        if (!seen[y]) {
          seen[y] = true;
          ++reached;
          stack.push_back(y);
        }
      }
    }
    if (reached != v) throw InvalidInput("tree is not connected");
    for (Vertex x = 0; x < v; ++x) {
      const bool labelled = species_of_[x] != kNoSpecies;
      if (labelled && adjacency_[x].size() != 1) {
        throw InvalidInput("species " + std::to_string(species_of_[x] + 1) + " is not on a leaf");
      }
      if (!labelled && adjacency_[x].size() == 1) throw InvalidInput("unlabelled leaf vertex");
      if (!labelled && adjacency_[x].size() < 2) throw InvalidInput("internal vertex of degree < 2");
    }
  }

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<Vertex> leaf_of_;
  std::vector<Species> species_of_;
};

/// Every internal vertex has degree exactly 3.
inline bool is_cubic(const LeafTree& t) {
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    if (!t.is_leaf(v) && t.degree(v) != 3) return false;
  }
  return true;
}

/// Edge counts from every vertex to `source`.
inline std::vector<std::size_t> vertex_distances(const LeafTree& t, Vertex source) {
  std::vector<std::size_t> dist(t.vertex_count(), std::numeric_limits<std::size_t>::max());
  std::queue<Vertex> queue;
  dist[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    Vertex x = queue.front();
    queue.pop();
    for (Vertex y : t.neighbors(x)) {
      if (dist[y] == std::numeric_limits<std::size_t>::max()) {
        dist[y] = dist[x] + 1;
        queue.push(y);
      }
    }
  }
  return dist;
}

/// d(i, j) = number of edges on the path between the leaves of species i and j.
inline SquareMatrix<int> leaf_distances(const LeafTree& t) {
  const std::size_t n = t.leaf_count();
  SquareMatrix<int> d(n, 0);
  for (Species i = 0; i < n; ++i) {
    auto dist = vertex_distances(t, t.leaf(i));
    for (Species j = 0; j < n; ++j) d(i, j) = static_cast<int>(dist[t.leaf(j)]);
  }
  return d;
}

/// Star with one internal vertex (vertex n) and leaves 0..n-1 labelled in order.
inline LeafTree star_tree(std::size_t n) {
  std::vector<Edge> edges;
  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < n; ++v) {
    edges.emplace_back(v, n);
    leaves.push_back(v);
  }
  return LeafTree::from_edges(n + 1, edges, leaves);
}

}  // namespace bmep
