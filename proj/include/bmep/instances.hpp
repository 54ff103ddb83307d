#pragma once

#include "bmep/matrix.hpp"
#include "bmep/numeric.hpp"
#include "bmep/objective.hpp"
#include "bmep/random.hpp"
#include "bmep/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bmep {

// ---------------------------------------------------------------------------
// Matrix families

inline DissimilarityMatrix all_ones(std::size_t n) {
  return DissimilarityMatrix::from_function(n, [](std::size_t, std::size_t) { return Rational(1); });
}

/// delta(1, i) = 1 for i > 1, delta(i, j) = 2 between the other species.
inline DissimilarityMatrix star_metric(std::size_t n) {
  return DissimilarityMatrix::from_function(n, [](std::size_t i, std::size_t j) {
    return Rational(j == 0 || i == 0 ? 1 : 2);
  });
}

/// Shortest-path metric of the n-cycle 1-2-...-n-1.
inline DissimilarityMatrix cycle_metric(std::size_t n) {
  return DissimilarityMatrix::from_function(n, [n](std::size_t i, std::size_t j) {
    std::size_t gap = i > j ? i - j : j - i;
    return Rational(std::min(gap, n - gap));
  });
}

/// L1 distances between random points of the integer grid [0, 100]^3.
inline DissimilarityMatrix random_metric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<std::int64_t, 3>> points(n);
  for (auto& p : points) {
    for (auto& c : p) c = rng.between(0, 100);
  }
  return DissimilarityMatrix::from_function(n, [&](std::size_t i, std::size_t j) {
    std::int64_t sum = 0;
    for (int k = 0; k < 3; ++k) sum += std::abs(points[i][k] - points[j][k]);
    return Rational(sum);
  });
}

/// Adds 1 to every off-diagonal entry of a 0/1 matrix. The result has entries
/// in {1, 2}, is a semimetric, and f(T) grows by exactly n for every tree.
inline DissimilarityMatrix metric_lift(const DissimilarityMatrix& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (i != j && d.exact(i, j) != 0 && d.exact(i, j) != 1) {
        throw InvalidInput("metric lift needs a 0/1 matrix");
      }
    }
  }
  return DissimilarityMatrix::from_function(d.size(), [&](std::size_t i, std::size_t j) {
    return Rational(d.exact(i, j) + 1);
  });
}

// ---------------------------------------------------------------------------
// Random trees

/// Uniform random cubic topology (random sequential insertion) with shuffled labels.
inline LeafTree random_cubic_tree(std::size_t n, Rng& rng) {
  if (n < 3) throw InvalidInput("a cubic tree needs at least 3 leaves");
  // Vertices 0..n-1 are leaf slots, n.. are internal.
  std::vector<Edge> edges{{0, n}, {1, n}, {2, n}};
  std::size_t next_internal = n + 1;
  for (Vertex leaf = 3; leaf < n; ++leaf) {
    std::size_t e = rng.below(edges.size());
    auto [a, b] = edges[e];
    Vertex w = next_internal++;
    edges[e] = {a, w};
    edges.emplace_back(w, b);
    edges.emplace_back(w, leaf);
  }
  std::vector<Vertex> leaf_of(n);
  for (Vertex i = 0; i < n; ++i) leaf_of[i] = i;
  rng.shuffle(leaf_of);
  return LeafTree::from_edges(next_internal, edges, leaf_of);
}

/// Random tree with higher-degree vertices: a random cubic tree with
/// `contractions` random internal edges contracted and `subdivisions` random
/// edges subdivided by degree-2 vertices.
inline LeafTree random_leaf_tree(std::size_t n, std::size_t contractions, std::size_t subdivisions, Rng& rng) {
  LeafTree t = random_cubic_tree(n, rng);
  std::vector<Edge> edges = t.edges();
  std::vector<Vertex> leaf_of(t.leaves().begin(), t.leaves().end());
  std::size_t vertex_count = t.vertex_count();
  std::vector<bool> is_leaf_vertex(vertex_count, false);
  for (Vertex v : leaf_of) is_leaf_vertex[v] = true;

  for (std::size_t c = 0; c < contractions; ++c) {
    std::vector<std::size_t> internal_edges;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!is_leaf_vertex[edges[e].first] && !is_leaf_vertex[edges[e].second]) internal_edges.push_back(e);
    }
    if (internal_edges.empty()) break;
    std::size_t e = internal_edges[rng.below(internal_edges.size())];
    auto [keep, gone] = edges[e];
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(e));
    for (auto& [a, b] : edges) {
      if (a == gone) a = keep;
      if (b == gone) b = keep;
    }
    // Renumber so vertex ids stay dense.
    Vertex last = vertex_count - 1;
    if (gone != last) {
      for (auto& [a, b] : edges) {
        if (a == last) a = gone;
        if (b == last) b = gone;
      }
      for (auto& v : leaf_of) {
        if (v == last) v = gone;
      }
      is_leaf_vertex[gone] = is_leaf_vertex[last];
    }
    is_leaf_vertex.pop_back();
    --vertex_count;
  }
  for (std::size_t s = 0; s < subdivisions; ++s) {
    std::size_t e = rng.below(edges.size());
    auto [a, b] = edges[e];
    Vertex w = vertex_count++;
    is_leaf_vertex.push_back(false);
    edges[e] = {a, w};
    edges.emplace_back(w, b);
  }
  return LeafTree::from_edges(vertex_count, edges, leaf_of);
}

// ---------------------------------------------------------------------------
// Graphs and the reduction from 3-colourability

/// Simple undirected graph on vertices 0..p-1; edges stored with u < v, sorted.
class InputGraph {
 public:
  InputGraph(std::size_t p, std::vector<Edge> edges) : p_(p) {
    std::set<Edge> seen;
    for (auto [u, v] : edges) {
      if (u == v) throw InvalidInput("self-loop at vertex " + std::to_string(u + 1));
      if (u >= p || v >= p) throw InvalidInput("edge endpoint out of range");
      Edge e{std::min(u, v), std::max(u, v)};
      if (!seen.insert(e).second) {
        throw InvalidInput("duplicate edge " + std::to_string(e.first + 1) + " " + std::to_string(e.second + 1));
      }
    }
    edges_.assign(seen.begin(), seen.end());
  }

  std::size_t vertex_count() const { return p_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool adjacent(Vertex u, Vertex v) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{std::min(u, v), std::max(u, v)});
  }

  friend bool operator==(const InputGraph&, const InputGraph&) = default;

 private:
  std::size_t p_;
  std::vector<Edge> edges_;
};

inline std::vector<std::array<Vertex, 3>> triangles(const InputGraph& g) {
  std::vector<std::array<Vertex, 3>> out;
  for (auto [u, v] : g.edges()) {
    for (Vertex w = v + 1; w < g.vertex_count(); ++w) {
      if (g.adjacent(u, w) && g.adjacent(v, w)) out.push_back({u, v, w});
    }
  }
  return out;
}

/// Largest number (capped at 2) of pairwise vertex-disjoint triangles.
inline std::size_t disjoint_triangle_count(const InputGraph& g) {
  auto tri = triangles(g);
  if (tri.empty()) return 0;
  for (std::size_t a = 0; a < tri.size(); ++a) {
    for (std::size_t b = a + 1; b < tri.size(); ++b) {
      bool disjoint = true;
      for (Vertex x : tri[a]) {
        if (std::find(tri[b].begin(), tri[b].end(), x) != tri[b].end()) disjoint = false;
      }
      if (disjoint) return 2;
    }
  }
  return 1;
}

/// Appends fresh triangles until the graph holds two vertex-disjoint ones.
/// Returns the augmented graph and the number of triangles added.
inline std::pair<InputGraph, std::size_t> augment_with_triangles(const InputGraph& g) {
  const std::size_t missing = 2 - disjoint_triangle_count(g);
  std::vector<Edge> edges = g.edges();
  std::size_t p = g.vertex_count();
  for (std::size_t t = 0; t < missing; ++t) {
    edges.emplace_back(p, p + 1);
    edges.emplace_back(p, p + 2);
    edges.emplace_back(p + 1, p + 2);
    p += 3;
  }
  return {InputGraph(p, std::move(edges)), missing};
}

/// Compares log2(m) with the rational r exactly: returns sign(log2 m - r).
inline int compare_log2(const BigInt& m, const Rational& r) {
  if (m <= 0) return -1;
  // log2 m <=> s/t  iff  m^t <=> 2^s  (t > 0).
  BigInt s = boost::multiprecision::numerator(r);
  BigInt t = boost::multiprecision::denominator(r);
  if (t > 1'000'000) throw InvalidInput("exponent denominator too large for exact comparison");
  BigInt lhs = boost::multiprecision::pow(m, t.convert_to<unsigned>());
  if (s < 0) return 1;  // m^t >= 1 > 2^s
  if (s > 10'000'000) throw InvalidInput("exponent too large for exact comparison");
  BigInt rhs = BigInt(1) << s.convert_to<unsigned>();
  if (lhs < rhs) return -1;
  return lhs > rhs ? 1 : 0;
}

/// A threshold of the form multiplier * 2^exponent with a rational exponent,
/// kept symbolic so huge exponents neither underflow nor lose exactness.
struct LogValue {
  BigInt multiplier = 1;
  Rational exponent = 0;

  double log2() const {
    return std::log2(multiplier.convert_to<double>()) + to_double(exponent);
  }
};

/// sign(a - b), exact.
inline int compare(const LogValue& a, const LogValue& b) {
  if (a.multiplier == 0 || b.multiplier == 0) {
    return a.multiplier == b.multiplier ? 0 : (a.multiplier == 0 ? -1 : 1);
  }
  // a.m 2^ea <=> b.m 2^eb  iff  log2(a.m / b.m) <=> eb - ea.
  Rational ratio = Rational(a.multiplier) / Rational(b.multiplier);
  Rational diff = b.exponent - a.exponent;
  // log2(p/q) <=> diff  iff  log2 p <=> diff + log2 q; compare p^t vs q^t 2^s directly.
  BigInt p = boost::multiprecision::numerator(ratio), q = boost::multiprecision::denominator(ratio);
  BigInt s = boost::multiprecision::numerator(diff), t = boost::multiprecision::denominator(diff);
  unsigned tu = t.convert_to<unsigned>();
  BigInt lhs = boost::multiprecision::pow(p, tu);
  BigInt rhs = boost::multiprecision::pow(q, tu);
  if (s >= 0) {
    rhs <<= s.convert_to<unsigned>();
  } else {
    lhs <<= BigInt(-s).convert_to<unsigned>();
  }
  if (lhs < rhs) return -1;
  return lhs > rhs ? 1 : 0;
}

inline LogValue to_log_value(const Dyadic& v) {
  if (v.mantissa() < 0) throw InvalidInput("log form needs a nonnegative value");
  return {v.mantissa(), Rational(v.exponent())};
}

struct ReductionOutput {
  DissimilarityMatrix matrix;
  InputGraph graph;            // after triangle augmentation
  std::size_t triangles_added = 0;
  std::size_t p = 0;           // graph vertices after augmentation
  std::size_t k = 0;           // padding species
  std::size_t n = 0;           // p + k
  std::size_t m = 0;           // graph edges after augmentation
  Rational lambda;
  LogValue threshold_yes;      // m * 2^(2 - (2k+4)/3): OPT is at most this if G is 3-colourable
  LogValue threshold_no;       // 2^(2 - lambda k): OPT is at least this otherwise
  bool size_condition_met = false;  // m <= 2^((2/3 - lambda) p)

  /// threshold_no > threshold_yes.
  bool gap_nonempty() const { return compare(threshold_no, threshold_yes) > 0; }

  /// log2 c * n where c = 2^((2/3 - lambda)(3 - 4 lambda)).
  Rational log2_c_pow_n() const {
    return (Rational(2, 3) - lambda) * (3 - 4 * lambda) * static_cast<long long>(n);
  }

  /// threshold_no / threshold_yes >= c^n, compared exactly.
  bool gap_at_least_c_pow_n() const {
    LogValue scaled = threshold_yes;
    scaled.exponent += log2_c_pow_n();
    return compare(threshold_no, scaled) >= 0;
  }
};

inline const Rational kDefaultLambda = Rational(3, 5);

/// Builds the 0/1 instance on n = p + k species: delta_ij = 1 iff i, j <= p and
/// v_i v_j is an edge. k is the least integer with k >= p / (2 lambda - 1) and
/// k = 1 (mod 3).
inline ReductionOutput reduction_from_graph(const InputGraph& g, const Rational& lambda = kDefaultLambda) {
  if (!(lambda > Rational(1, 2) && lambda < Rational(2, 3))) {
    throw InvalidInput("lambda must lie strictly between 1/2 and 2/3");
  }
  auto [augmented, added] = augment_with_triangles(g);
  const std::size_t p = augmented.vertex_count();
  const std::size_t m = augmented.edge_count();
  const Rational bound = Rational(static_cast<long long>(p)) / (2 * lambda - 1);
  BigInt k_big = boost::multiprecision::numerator(bound) / boost::multiprecision::denominator(bound);
  if (Rational(k_big) < bound) ++k_big;  // ceiling
  while (k_big % 3 != 1) ++k_big;
  const std::size_t k = k_big.convert_to<std::size_t>();
  const std::size_t n = p + k;

  DissimilarityMatrix matrix = DissimilarityMatrix::from_function(n, [&](std::size_t i, std::size_t j) {
    return Rational(i < p && j < p && augmented.adjacent(i, j) ? 1 : 0);
  });

  ReductionOutput out{std::move(matrix), augmented, added, p, k, n, m, lambda, {}, {}, false};
  out.threshold_yes = {BigInt(m), Rational(2) - Rational(static_cast<long long>(2 * k + 4), 3)};
  out.threshold_no = {BigInt(1), Rational(2) - lambda * static_cast<long long>(k)};
  out.size_condition_met =
      compare_log2(BigInt(m), (Rational(2, 3) - lambda) * static_cast<long long>(p)) <= 0;
  return out;
}

/// colouring[v] in {1, 2, 3} for every vertex of g.
using Colouring = std::vector<int>;

/// Extends a colouring of the original vertices to the appended triangles
/// (each fresh triangle is coloured 1, 2, 3).
inline Colouring extend_colouring(const Colouring& original, std::size_t augmented_vertices) {
  Colouring out = original;
  while (out.size() < augmented_vertices) out.push_back(static_cast<int>(out.size() - original.size()) % 3 + 1);
  return out;
}

/// The cubic tree built from a proper 3-colouring: three paths joined at a
/// centre w, a pendant leaf on every degree-2 vertex and two leaves at each far
/// end a_l. Colour class S_l sits on the |S_l| leaves closest to a_l; the k
/// padding species fill the remaining leaves (path 1, then 2, then 3, from the
/// centre outward). Path 1 carries one extra vertex so that exactly k leaves
/// remain for padding.
inline LeafTree witness_tree(const InputGraph& g, const Colouring& colouring, std::size_t k) {
  const std::size_t p = g.vertex_count();
  if (colouring.size() != p) throw InvalidInput("colouring must assign a colour to every vertex");
  if (k % 3 != 1) throw InvalidInput("k must be congruent to 1 mod 3");
  std::array<std::vector<Vertex>, 3> classes;
  for (Vertex v = 0; v < p; ++v) {
    if (colouring[v] < 1 || colouring[v] > 3) throw InvalidInput("colours must be 1, 2 or 3");
    classes[colouring[v] - 1].push_back(v);
  }
  for (auto [u, v] : g.edges()) {
    if (colouring[u] == colouring[v]) {
      throw InvalidInput("improper colouring: edge " + std::to_string(u + 1) + " " + std::to_string(v + 1));
    }
  }
  for (const auto& c : classes) {
    if (c.size() < 2) throw InvalidInput("every colour class needs at least 2 vertices");
  }

  const std::size_t spacer = (k - 1) / 3;
  std::vector<Edge> edges;
  std::vector<Vertex> leaf_of(p + k);
  Vertex next = 0;
  const Vertex w = next++;
  std::vector<Vertex> free_leaves;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& cls = classes[l];
    // Path from b (next to w) to a: `spacer` (+1 on path 1) vertices with a
    // padding leaf each, then |S| - 2 vertices with one class leaf each, then a.
    const std::size_t padding_hosts = spacer + (l == 0 ? 1 : 0);
    const std::size_t length = padding_hosts + cls.size() - 1;
    std::vector<Vertex> path(length);
    for (auto& v : path) v = next++;
    edges.emplace_back(w, path[0]);
    for (std::size_t i = 0; i + 1 < length; ++i) edges.emplace_back(path[i], path[i + 1]);
    for (std::size_t i = 0; i < padding_hosts; ++i) {
      Vertex leaf = next++;
      edges.emplace_back(path[i], leaf);
      free_leaves.push_back(leaf);
    }
    // Class leaves, closest to a first: two on a, then one per vertex toward b.
    std::size_t placed = 0;
    Vertex a = path.back();
    for (int twice = 0; twice < 2; ++twice) {
      Vertex leaf = next++;
      edges.emplace_back(a, leaf);
      leaf_of[cls[placed++]] = leaf;
    }
    for (std::size_t i = length - 1; i-- > padding_hosts;) {
      Vertex leaf = next++;
      edges.emplace_back(path[i], leaf);
      leaf_of[cls[placed++]] = leaf;
    }
  }
  for (std::size_t s = 0; s < k; ++s) leaf_of[p + s] = free_leaves[s];
  return LeafTree::from_edges(next, edges, leaf_of);
}

/// Exact f of the witness tree on the reduction matrix, in log form.
inline LogValue witness_cost(const LeafTree& t, const DissimilarityMatrix& d) {
  return to_log_value(detail::cubic_objective_exact(t, d));
}

}  // namespace bmep
