#pragma once

#include "bmep/matrix.hpp"
#include "bmep/objective.hpp"
#include "bmep/spanning_tree.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <type_traits>
#include <vector>

namespace bmep {

/// Turns a spanning tree on the species into a leaf-labelled tree: every
/// species that is internal in `t0` keeps its vertex (now unlabelled) and
/// reappears as a new pendant leaf attached to it.
inline LeafTree pull_leaves(const SpanningTree& t0) {
  const std::size_t n = t0.species_count;
  if (t0.edges.size() + 1 != n) throw InvalidInput("spanning tree must have n - 1 edges");
  std::vector<std::size_t> degree(n, 0);
  for (auto [a, b] : t0.edges) {
    if (a >= n || b >= n) throw InvalidInput("spanning tree edge out of range");
    ++degree[a];
    ++degree[b];
  }
  std::vector<Edge> edges = t0.edges;
  std::vector<Vertex> leaf_of(n);
  std::size_t vertex_count = n;
  for (Species s = 0; s < n; ++s) {
    if (degree[s] >= 2) {
      leaf_of[s] = vertex_count;
      edges.emplace_back(s, vertex_count++);
    } else {
      leaf_of[s] = s;
    }
  }
  return LeafTree::from_edges(vertex_count, edges, leaf_of);
}

/// Splices out every internal vertex of degree 2. The pi-matrix is unchanged
/// because such a vertex contributes a factor 1/(2-1). Vertex ids are compacted
/// preserving relative order.
inline LeafTree suppress_degree_two(const LeafTree& t) {
  std::vector<bool> removed(t.vertex_count(), false);
  for (Vertex v = 0; v < t.vertex_count(); ++v) removed[v] = !t.is_leaf(v) && t.degree(v) == 2;
  std::vector<Vertex> new_id(t.vertex_count());
  std::size_t kept = 0;
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    if (!removed[v]) new_id[v] = kept++;
  }
  if (kept == t.vertex_count()) return t;
  // Walk from each kept vertex through chains of removed vertices.
  std::vector<Edge> edges;
  for (Vertex a = 0; a < t.vertex_count(); ++a) {
    if (removed[a]) continue;
    for (Vertex first : t.neighbors(a)) {
      Vertex prev = a, cur = first;
      while (removed[cur]) {
        auto nb = t.neighbors(cur);
        Vertex next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
      }
      if (a < cur) edges.emplace_back(new_id[a], new_id[cur]);
    }
  }
  std::vector<Vertex> leaf_of;
  for (Vertex v : t.leaves()) leaf_of.push_back(new_id[v]);
  return LeafTree::from_edges(kept, edges, leaf_of);
}

/// Adds u' adjacent to {u, v1, v2} and detaches v1, v2 from u. u' gets the next free id.
inline LeafTree split_vertex(const LeafTree& t, Vertex u, Vertex v1, Vertex v2) {
  if (u >= t.vertex_count() || t.is_leaf(u) || t.degree(u) <= 3) {
    throw InvalidInput("split needs an internal vertex of degree > 3");
  }
  auto nb = t.neighbors(u);
  auto adjacent = [&](Vertex v) { return std::find(nb.begin(), nb.end(), v) != nb.end(); };
  if (v1 == v2 || !adjacent(v1) || !adjacent(v2)) throw InvalidInput("split needs two distinct neighbours of u");
  const Vertex fresh = t.vertex_count();
  std::vector<Edge> edges;
  for (Edge e : t.edges()) {
    if (e == Edge(std::min(u, v1), std::max(u, v1)) || e == Edge(std::min(u, v2), std::max(u, v2))) continue;
    edges.push_back(e);
  }
  edges.emplace_back(u, fresh);
  edges.emplace_back(v1, fresh);
  edges.emplace_back(v2, fresh);
  std::vector<Vertex> leaf_of(t.leaves().begin(), t.leaves().end());
  return LeafTree::from_edges(t.vertex_count() + 1, edges, leaf_of);
}

/// How a leaf pair whose path crosses u (degree q) is reweighted by a split
/// of {v1, v2}. The multiplier applies to pi_ij.
struct SplitReweighting {
  std::size_t q;
  /// Path now crosses only u' (both branches split off): 1/(q-1) -> 1/2.
  Rational new_only() const { return Rational(BigInt(q - 1), BigInt(2)); }
  /// Path crosses both u and u' (exactly one branch split off): 1/(q-1) -> 1/(2(q-2)).
  Rational both() const { return Rational(BigInt(q - 1), BigInt(2 * (q - 2))); }
  /// Path crosses only u (neither branch split off): 1/(q-1) -> 1/(q-2).
  Rational old_only() const { return Rational(BigInt(q - 1), BigInt(q - 2)); }

  /// Number of the C(q,2) splits in each class, for a fixed crossing pair.
  std::size_t new_only_count() const { return 1; }
  std::size_t both_count() const { return 2 * (q - 2); }
  std::size_t old_only_count() const { return q * (q - 1) / 2 - 1 - 2 * (q - 2); }
};

struct CubicRounding {
  LeafTree tree;
  std::size_t splits = 0;
};

namespace detail {

template <class Num>
Num as_num(const Rational& r);
template <>
inline Rational as_num<Rational>(const Rational& r) {
  return r;
}
template <>
inline double as_num<double>(const Rational& r) {
  return to_double(r);
}

/// Exact: strict less. Float: less by more than the relative tolerance.
inline bool strictly_better(const Rational& a, const Rational& b) { return a < b; }
inline bool strictly_better(double a, double b) {
  return a < b - kFloatRelativeTolerance * std::max(std::abs(a), std::abs(b));
}

/// Picks the minimising split at u. Returns (v1, v2, change in f).
/// W(a, b) aggregates delta_ij pi_ij over leaf pairs in branches a and b of u,
/// which makes each candidate O(1).
template <class Num>
std::tuple<Vertex, Vertex, Num> best_split(const LeafTree& t, const DissimilarityMatrix& d,
                                           const SquareMatrix<Num>& pi, Vertex u) {
  const auto nb = t.neighbors(u);
  const std::size_t q = nb.size();
  // branch[s] = index of the neighbour of u whose side holds species s.
  std::vector<std::size_t> branch(t.leaf_count());
  for (std::size_t a = 0; a < q; ++a) {
    std::vector<std::pair<Vertex, Vertex>> stack{{nb[a], u}};
    while (!stack.empty()) {
      auto [x, from] = stack.back();
      stack.pop_back();
      if (t.is_leaf(x)) {
        branch[t.species_at(x)] = a;
        continue;
      }
      for (Vertex y : t.neighbors(x)) {
        if (y != from) stack.emplace_back(y, x);
      }
    }
  }
  SquareMatrix<Num> w(q, Num(0));
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    for (std::size_t j = i + 1; j < t.leaf_count(); ++j) {
      std::size_t a = branch[i], b = branch[j];
      if (a == b) continue;
      Num term;
      if constexpr (std::is_same_v<Num, double>) {
        term = d(i, j) * pi(i, j);
      } else {
        if (d.exact(i, j) == 0) continue;
        term = d.exact(i, j) * pi(i, j);
      }
      w(a, b) += term;
      w(b, a) += term;
    }
  }
  std::vector<Num> row(q, Num(0));
  Num total(0);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) row[a] += w(a, b);
    total += row[a];
  }
  total = total / 2;
  const SplitReweighting rw{q};
  const Num m_new = as_num<Num>(rw.new_only()) - 1;
  const Num m_both = as_num<Num>(rw.both()) - 1;
  const Num m_old = as_num<Num>(rw.old_only()) - 1;
  std::optional<std::tuple<Vertex, Vertex, Num>> best;
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = a + 1; b < q; ++b) {
      const Num& inside = w(a, b);
      Num crossing = row[a] + row[b] - inside - inside;
      Num outside = total - row[a] - row[b] + inside;
      Num delta = inside * m_new + crossing * m_both + outside * m_old;
      if (!best || strictly_better(delta, std::get<2>(*best))) best.emplace(nb[a], nb[b], std::move(delta));
    }
  }
  return *best;
}

template <class Num>
CubicRounding round_to_cubic_impl(LeafTree t, const DissimilarityMatrix& d) {
  std::size_t splits = 0;
  while (true) {
    // Largest degree first, smallest id among ties.
    std::optional<Vertex> target;
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      if (t.is_leaf(v) || t.degree(v) <= 3) continue;
      if (!target || t.degree(v) > t.degree(*target)) target = v;
    }
    if (!target) break;
    SquareMatrix<Num> pi;
    if constexpr (std::is_same_v<Num, double>) {
      pi = pi_entries<double>(t);
    } else {
      pi = pi_matrix(t, ValueMode::Exact).exact();
    }
    auto [v1, v2, delta] = best_split<Num>(t, d, pi, *target);
    LeafTree next = split_vertex(t, *target, v1, v2);
#ifndef NDEBUG
    if (t.leaf_count() <= 12) {
      constexpr ValueMode mode = std::is_same_v<Num, double> ? ValueMode::Float : ValueMode::Exact;
      Value before = evaluate(t, d, mode);
      Value after = evaluate(next, d, mode);
      assert(after <= before);
      assert(after == before + Value(delta));
    }
#endif
    t = std::move(next);
    ++splits;
  }
  return {std::move(t), splits};
}

}  // namespace detail

/// Resolves every vertex of degree q > 3 by the split of two neighbours that
/// minimises f, until the tree is cubic. f never increases: the average of the
/// C(q,2) split pi-matrices is the original pi-matrix.
inline CubicRounding round_to_cubic(const LeafTree& t, const DissimilarityMatrix& d, ValueMode mode) {
  detail::check_sizes(t, d);
  d.require_mode(mode);
  LeafTree reduced = suppress_degree_two(t);
  if (mode == ValueMode::Exact) return detail::round_to_cubic_impl<Rational>(std::move(reduced), d);
  return detail::round_to_cubic_impl<double>(std::move(reduced), d);
}

struct ApproxReport {
  LeafTree tree;
  Value objective;
  Value mst_bound;
  double ratio_vs_mst = 0.0;
  std::size_t steps = 0;
  bool metric = false;
};

/// MST, leaf pulling, degree-2 suppression, then rounding to a cubic tree.
/// On metric input the objective is at most twice the MST cost.
inline ApproxReport approximate(const DissimilarityMatrix& d, ValueMode mode) {
  d.require_mode(mode);
  SpanningTree t0 = minimum_spanning_tree(d);
  Value mst = spanning_tree_cost(t0, d, mode);
  CubicRounding rounded = round_to_cubic(suppress_degree_two(pull_leaves(t0)), d, mode);
  ApproxReport report{std::move(rounded.tree), Value(), mst, 0.0, rounded.splits, is_metric(d)};
  report.objective = evaluate(report.tree, d, mode);
  const double m = mst.to_double(), f = report.objective.to_double();
  report.ratio_vs_mst = m > 0 ? f / m : (f > 0 ? std::numeric_limits<double>::infinity() : 1.0);
  return report;
}

inline ApproxReport approximate(const DissimilarityMatrix& d) { return approximate(d, d.default_mode()); }

}  // namespace bmep
