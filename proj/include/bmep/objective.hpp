#pragma once

#include "bmep/matrix.hpp"
#include "bmep/numeric.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <variant>
#include <vector>

namespace bmep {

template <class Num>
struct PathWeight;

template <>
struct PathWeight<double> {
  static double one() { return 1.0; }
  static double reciprocal(std::size_t k) { return 1.0 / static_cast<double>(k); }
};

template <>
struct PathWeight<Rational> {
  static Rational one() { return Rational(1); }
  static Rational reciprocal(std::size_t k) { return Rational(BigInt(1), BigInt(k)); }
};

/// Only usable when every reciprocal is a power of two; see `has_dyadic_weights`.
template <>
struct PathWeight<Dyadic> {
  static Dyadic one() { return Dyadic(1); }
  static Dyadic reciprocal(std::size_t k) {
    assert(is_power_of_two(k));
    return Dyadic::power_of_two(-static_cast<std::int64_t>(std::countr_zero(k)));
  }
};

/// True when deg(u) - 1 is a power of two for every internal vertex, so the
/// weights stay dyadic.
inline bool has_dyadic_weights(const LeafTree& t) {
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    if (!t.is_leaf(v) && !is_power_of_two(t.degree(v) - 1)) return false;
  }
  return true;
}

/// pi(i, j) = 2 * prod over interior path vertices u of 1 / (deg(u) - 1).
/// One traversal per source leaf.
template <class Num>
SquareMatrix<Num> pi_entries(const LeafTree& t) {
  const std::size_t n = t.leaf_count();
  SquareMatrix<Num> pi(n, Num(0));
  std::vector<Num> factor(t.vertex_count(), PathWeight<Num>::one());
  for (Vertex v = 0; v < t.vertex_count(); ++v) {
    if (!t.is_leaf(v)) factor[v] = PathWeight<Num>::reciprocal(t.degree(v) - 1);
  }
  struct Frame {
    Vertex at;
    Vertex from;
    Num weight;
  };
  std::vector<Frame> stack;
  for (Species i = 0; i < n; ++i) {
    const Vertex start = t.leaf(i);
    stack.clear();
    stack.push_back({t.neighbors(start)[0], start, Num(2)});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (t.is_leaf(f.at)) {
        pi(i, t.species_at(f.at)) = std::move(f.weight);
        continue;
      }
      Num next = f.weight * factor[f.at];
      for (Vertex y : t.neighbors(f.at)) {
        if (y != f.from) stack.push_back({y, f.at, next});
      }
    }
  }
  return pi;
}

/// The pi-matrix with exact rational or binary64 entries.
class PiMatrix {
 public:
  PiMatrix(const LeafTree& t, ValueMode mode) : n_(t.leaf_count()), mode_(mode) {
    if (mode == ValueMode::Float) {
      entries_ = pi_entries<double>(t);
    } else if (has_dyadic_weights(t)) {
      auto dyadic = pi_entries<Dyadic>(t);
      SquareMatrix<Rational> exact(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) exact(i, j) = dyadic(i, j).to_rational();
      }
      entries_ = std::move(exact);
    } else {
      entries_ = pi_entries<Rational>(t);
    }
  }

  std::size_t size() const { return n_; }
  ValueMode mode() const { return mode_; }

  Value operator()(std::size_t i, std::size_t j) const {
    if (mode_ == ValueMode::Exact) return Value(exact()(i, j));
    return Value(approx()(i, j));
  }
  const SquareMatrix<Rational>& exact() const { return std::get<SquareMatrix<Rational>>(entries_); }
  const SquareMatrix<double>& approx() const { return std::get<SquareMatrix<double>>(entries_); }

 private:
  std::size_t n_;
  ValueMode mode_;
  std::variant<SquareMatrix<Rational>, SquareMatrix<double>> entries_;
};

inline PiMatrix pi_matrix(const LeafTree& t, ValueMode mode) { return PiMatrix(t, mode); }

using ObjectiveValue = Value;

namespace detail {

inline void check_sizes(const LeafTree& t, const DissimilarityMatrix& d) {
  if (t.leaf_count() != d.size()) {
    throw InvalidInput("tree has " + std::to_string(t.leaf_count()) + " leaves but the matrix has " +
                       std::to_string(d.size()) + " species");
  }
}

/// sum_{i<j} delta_ij 2^{2-d_ij}; exact for integer matrices.
inline Dyadic cubic_objective_exact(const LeafTree& t, const DissimilarityMatrix& d) {
  const auto dist = leaf_distances(t);
  Dyadic total;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const Rational& delta = d.exact(i, j);
      if (delta == 0) continue;
      total += Dyadic(boost::multiprecision::numerator(delta), 2 - dist(i, j));
    }
  }
  return total;
}

inline double cubic_objective_float(const LeafTree& t, const DissimilarityMatrix& d) {
  const auto dist = leaf_distances(t);
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) total += std::ldexp(d(i, j), 2 - dist(i, j));
  }
  return total;
}

}  // namespace detail

/// sum_{i<j} delta_ij * pi_ij for the given pi-matrix.
inline ObjectiveValue evaluate(const PiMatrix& pi, const DissimilarityMatrix& d) {
  if (pi.size() != d.size()) throw InvalidInput("pi-matrix and dissimilarity matrix sizes differ");
  if (pi.mode() == ValueMode::Exact) {
    d.require_mode(ValueMode::Exact);
    Rational total = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        if (d.exact(i, j) != 0) total += d.exact(i, j) * pi.exact()(i, j);
      }
    }
    return Value(std::move(total));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) total += d(i, j) * pi.approx()(i, j);
  }
  return Value(total);
}

/// f(T) = sum_{i<j} delta_ij pi_ij; on cubic trees this is sum delta_ij 2^{2-d_ij}.
inline ObjectiveValue evaluate(const LeafTree& t, const DissimilarityMatrix& d, ValueMode mode) {
  detail::check_sizes(t, d);
  d.require_mode(mode);
  if (!is_cubic(t)) return evaluate(pi_matrix(t, mode), d);
  Value v = mode == ValueMode::Exact ? Value(detail::cubic_objective_exact(t, d).to_rational())
                                     : Value(detail::cubic_objective_float(t, d));
#ifndef NDEBUG
  if (t.leaf_count() <= 12) assert(v == evaluate(pi_matrix(t, mode), d));
#endif
  return v;
}

inline ObjectiveValue evaluate(const LeafTree& t, const DissimilarityMatrix& d) {
  return evaluate(t, d, d.default_mode());
}

/// Row sums of the pi-matrix; each is 2 for every valid tree.
inline std::vector<Value> kraft_row_sums(const LeafTree& t, ValueMode mode) {
  PiMatrix pi(t, mode);
  std::vector<Value> sums;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    Value s = Value::zero(mode);
    for (std::size_t i = 0; i < pi.size(); ++i) {
      if (i != j) s = s + pi(i, j);
    }
    sums.push_back(std::move(s));
  }
  return sums;
}

}  // namespace bmep
