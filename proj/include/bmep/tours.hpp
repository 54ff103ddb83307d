#pragma once

#include "bmep/matrix.hpp"
#include "bmep/random.hpp"
#include "bmep/spanning_tree.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmep {

/// Cyclic order of the species. `canonical()` fixes rotation and reflection.
struct Tour {
  std::vector<Species> order;

  /// Starts at species 0; the second element is the smaller of its two neighbours.
  Tour canonical() const {
    Tour t = *this;
    if (t.order.empty()) return t;
    auto first = std::find(t.order.begin(), t.order.end(), Species{0});
    std::rotate(t.order.begin(), first, t.order.end());
    if (t.order.size() > 2 && t.order[1] > t.order.back()) std::reverse(t.order.begin() + 1, t.order.end());
    return t;
  }

  bool adjacent(Species a, Species b) const {
    const std::size_t n = order.size();
    for (std::size_t k = 0; k < n; ++k) {
      Species x = order[k], y = order[(k + 1) % n];
      if ((x == a && y == b) || (x == b && y == a)) return true;
    }
    return false;
  }

  friend bool operator==(const Tour&, const Tour&) = default;
};

inline std::string to_string(const Tour& t) {
  std::string s = "(";
  for (std::size_t k = 0; k < t.order.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(t.order[k] + 1);
  }
  return s + ")";
}

/// Sum of delta over the n cyclically consecutive pairs.
inline Value tour_cost(const Tour& t, const DissimilarityMatrix& d, ValueMode mode) {
  const std::size_t n = d.size();
  if (t.order.size() != n) throw InvalidInput("tour does not visit every species of the matrix");
  std::vector<bool> seen(n, false);
  for (Species s : t.order) {
    if (s >= n || seen[s]) throw InvalidInput("tour is not a permutation of the species");
    seen[s] = true;
  }
  Value total = Value::zero(mode);
  for (std::size_t k = 0; k < n; ++k) total = total + d.value(t.order[k], t.order[(k + 1) % n], mode);
  return total;
}

/// A plane embedding: for each vertex, the clockwise order of its neighbours.
struct Embedding {
  std::vector<std::vector<Vertex>> rotation;
};

/// Clockwise leaf order read off the boundary walk of the embedded tree.
inline Tour embed_and_read_tour(const LeafTree& t, const Embedding& e) {
  if (e.rotation.size() != t.vertex_count()) throw InvalidInput("embedding does not cover every vertex");
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    std::vector<Vertex> sorted = e.rotation[v];
    std::sort(sorted.begin(), sorted.end());
    auto nb = t.neighbors(v);
    if (!std::equal(sorted.begin(), sorted.end(), nb.begin(), nb.end())) {
      throw InvalidInput("embedding rotation at vertex " + std::to_string(v) + " is not a permutation of its edges");
    }
  }
  Tour tour;
  const Vertex start = t.leaf(0);
  tour.order.push_back(0);
  Vertex from = start;
  Vertex at = t.neighbors(start)[0];
  while (at != start) {
    if (t.is_leaf(at)) {
      tour.order.push_back(t.species_at(at));
      std::swap(from, at);
      continue;
    }
    const auto& rot = e.rotation[at];
    auto pos = std::find(rot.begin(), rot.end(), from) - rot.begin();
    Vertex next = rot[(pos + 1) % rot.size()];
    from = at;
    at = next;
  }
  return tour.canonical();
}

/// Product over internal vertices of (deg - 1)!, saturating at the uint64 maximum.
inline std::uint64_t embedding_count(const LeafTree& t) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  for (Vertex v : t.internal_vertices()) {
    for (std::uint64_t k = 2; k < t.degree(v); ++k) {
      if (count > kMax / k) return kMax;
      count *= k;
    }
  }
  return count;
}

inline constexpr std::uint64_t kDefaultEmbeddingCap = 1'000'000;

/// Calls `visit` once per embedding. Each internal vertex keeps its smallest
/// neighbour first and permutes the rest, giving (deg - 1)! distinct cyclic orders.
inline void for_each_embedding(const LeafTree& t, const std::function<void(const Embedding&)>& visit,
                               std::uint64_t cap = kDefaultEmbeddingCap) {
  const std::uint64_t count = embedding_count(t);
  if (count > cap) {
    throw InvalidInput("tree has " + (count == std::numeric_limits<std::uint64_t>::max() ? std::string("too many")
                                                                                          : std::to_string(count)) +
                       " embeddings, above the cap of " + std::to_string(cap));
  }
  Embedding e;
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    auto nb = t.neighbors(v);
    e.rotation.emplace_back(nb.begin(), nb.end());
  }
  const auto internal = t.internal_vertices();
  while (true) {
    visit(e);
    std::size_t k = 0;
    for (; k < internal.size(); ++k) {
      auto& rot = e.rotation[internal[k]];
      if (std::next_permutation(rot.begin() + 1, rot.end())) break;
      // next_permutation wrapped around to ascending order: carry.
    }
    if (k == internal.size()) return;
  }
}

/// One tour per embedding, with multiplicity.
inline std::vector<Tour> enumerate_compatible_tours(const LeafTree& t, std::uint64_t cap = kDefaultEmbeddingCap) {
  std::vector<Tour> tours;
  for_each_embedding(t, [&](const Embedding& e) { tours.push_back(embed_and_read_tour(t, e)); }, cap);
  return tours;
}

/// Uniform independent cyclic order at each internal vertex.
inline Tour sample_compatible_tour(const LeafTree& t, Rng& rng) {
  Embedding e;
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    auto nb = t.neighbors(v);
    std::vector<Vertex> rot(nb.begin(), nb.end());
    if (rot.size() > 2) {
      std::vector<Vertex> rest(rot.begin() + 1, rot.end());
      rng.shuffle(rest);
      std::copy(rest.begin(), rest.end(), rot.begin() + 1);
    }
    e.rotation.push_back(std::move(rot));
  }
  return embed_and_read_tour(t, e);
}

inline Tour sample_compatible_tour(const LeafTree& t, std::uint64_t seed) {
  Rng rng(seed);
  return sample_compatible_tour(t, rng);
}

/// Mean tour cost over all embeddings; equals f(T) exactly.
inline Value mean_compatible_tour_cost(const LeafTree& t, const DissimilarityMatrix& d, ValueMode mode,
                                       std::uint64_t cap = kDefaultEmbeddingCap) {
  Value total = Value::zero(mode);
  std::uint64_t count = 0;
  for_each_embedding(
      t,
      [&](const Embedding& e) {
        total = total + tour_cost(embed_and_read_tour(t, e), d, mode);
        ++count;
      },
      cap);
  if (mode == ValueMode::Exact) return Value(Rational(total.exact() / count));
  return Value(total.to_double() / static_cast<double>(count));
}

struct TspResult {
  Value cost;
  Tour tour;
};

inline constexpr std::size_t kMaxTspSpecies = 18;

namespace detail {

/// Held-Karp over subsets of species 1..n-1, with species 0 as the fixed start.
template <class Cost, class Weight>
std::pair<Cost, std::vector<Species>> held_karp(std::size_t n, Weight&& w) {
  const std::size_t m = n - 1;
  const std::size_t subsets = std::size_t{1} << m;
  const std::uint8_t kNone = 0xff;
  std::vector<Cost> best(subsets * m);
  std::vector<bool> known(subsets * m, false);
  std::vector<std::uint8_t> parent(subsets * m, kNone);
  for (std::size_t j = 0; j < m; ++j) {
    best[(std::size_t{1} << j) * m + j] = w(0, j + 1);
    known[(std::size_t{1} << j) * m + j] = true;
  }
  for (std::size_t s = 1; s < subsets; ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!(s >> j & 1) || !known[s * m + j]) continue;
      const Cost& here = best[s * m + j];
      for (std::size_t k = 0; k < m; ++k) {
        if (s >> k & 1) continue;
        const std::size_t t = s | (std::size_t{1} << k);
        Cost candidate = here + w(j + 1, k + 1);
        if (!known[t * m + k] || candidate < best[t * m + k]) {
          best[t * m + k] = std::move(candidate);
          known[t * m + k] = true;
          parent[t * m + k] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }
  const std::size_t full = subsets - 1;
  std::size_t last = 0;
  Cost total = best[full * m] + w(1, 0);
  for (std::size_t j = 1; j < m; ++j) {
    Cost candidate = best[full * m + j] + w(j + 1, 0);
    if (candidate < total) {
      total = std::move(candidate);
      last = j;
    }
  }
  std::vector<Species> path;
  std::size_t s = full, j = last;
  while (true) {
    path.push_back(j + 1);
    std::uint8_t p = parent[s * m + j];
    s &= ~(std::size_t{1} << j);
    if (p == kNone) break;
    j = p;
  }
  path.push_back(0);
  std::reverse(path.begin(), path.end());
  return {total, path};
}

}  // namespace detail

/// Minimum-cost Hamiltonian cycle by bitmask dynamic programming (n <= 18).
inline TspResult tsp_exact(const DissimilarityMatrix& d, ValueMode mode) {
  d.require_mode(mode);
  const std::size_t n = d.size();
  if (n > kMaxTspSpecies) {
    throw InvalidInput("exact TSP supports at most " + std::to_string(kMaxTspSpecies) + " species, got " +
                       std::to_string(n));
  }
  std::vector<Species> path;
  if (mode == ValueMode::Exact && d.small_integers()) {
    const auto& ints = *d.small_integers();
    path = detail::held_karp<std::int64_t>(n, [&](std::size_t a, std::size_t b) { return ints(a, b); }).second;
  } else if (mode == ValueMode::Exact) {
    path = detail::held_karp<Rational>(n, [&](std::size_t a, std::size_t b) { return d.exact(a, b); }).second;
  } else {
    path = detail::held_karp<double>(n, [&](std::size_t a, std::size_t b) { return d(a, b); }).second;
  }
  Tour tour = Tour{path}.canonical();
  return {tour_cost(tour, d, mode), tour};
}

inline Value mst_cost(const DissimilarityMatrix& d, ValueMode mode) {
  d.require_mode(mode);
  return spanning_tree_cost(minimum_spanning_tree(d), d, mode);
}

}  // namespace bmep
