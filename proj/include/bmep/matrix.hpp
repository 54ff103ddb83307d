#pragma once

#include "bmep/value.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmep {

/// Raised for every contract violation on matrix, tree and graph inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Species = std::size_t;  // 0-based internally, printed 1-based

/// Row-major n x n storage.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// Entries above this magnitude disable the 64-bit integer fast paths.
inline constexpr std::int64_t kMaxFastInteger = std::int64_t{1} << 53;

/// Symmetric, zero-diagonal, nonnegative dissimilarities between n >= 3 species.
class DissimilarityMatrix {
 public:
  /// `lower` holds rows 2..n of the strict lower triangle, row-major: d21, d31, d32, ...
  static DissimilarityMatrix from_lower(std::size_t n, const std::vector<Rational>& lower) {
    check_size(n);
    if (lower.size() != n * (n - 1) / 2) {
      throw InvalidInput("dimension mismatch: expected " + std::to_string(n * (n - 1) / 2) +
                         " lower-triangular entries, got " + std::to_string(lower.size()));
    }
    SquareMatrix<Rational> m(n, Rational(0));
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        m(i, j) = m(j, i) = lower[k++];
      }
    }
    return DissimilarityMatrix(std::move(m));
  }

  static DissimilarityMatrix from_square(std::size_t n, const std::vector<Rational>& square) {
    check_size(n);
    if (square.size() != n * n) {
      throw InvalidInput("dimension mismatch: expected " + std::to_string(n * n) + " entries, got " +
                         std::to_string(square.size()));
    }
    SquareMatrix<Rational> m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = square[i * n + j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (m(i, i) != 0) throw InvalidInput("nonzero diagonal at species " + std::to_string(i + 1));
      for (std::size_t j = 0; j < i; ++j) {
        if (m(i, j) != m(j, i)) {
          throw InvalidInput("asymmetric entries at (" + std::to_string(j + 1) + "," + std::to_string(i + 1) + ")");
        }
      }
    }
    return DissimilarityMatrix(std::move(m));
  }

  /// Builds the matrix from a callback over pairs i > j (0-based).
  template <class F>
  static DissimilarityMatrix from_function(std::size_t n, F&& entry) {
    check_size(n);
    std::vector<Rational> lower;
    lower.reserve(n * (n - 1) / 2);
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) lower.emplace_back(entry(i, j));
    }
    return from_lower(n, lower);
  }

  std::size_t size() const { return exact_.size(); }
  const Rational& exact(std::size_t i, std::size_t j) const { return exact_(i, j); }
  double operator()(std::size_t i, std::size_t j) const { return approx_(i, j); }

  /// True when every entry is an integer (the precondition of Exact mode).
  bool is_integral() const { return integral_; }
  /// Entries as int64 when integral and bounded by kMaxFastInteger.
  const std::optional<SquareMatrix<std::int64_t>>& small_integers() const { return small_; }

  Value value(std::size_t i, std::size_t j, ValueMode mode) const {
    return mode == ValueMode::Exact ? Value(exact_(i, j)) : Value(approx_(i, j));
  }

  /// Exact when integral, Float otherwise.
  ValueMode default_mode() const { return integral_ ? ValueMode::Exact : ValueMode::Float; }

  void require_mode(ValueMode mode) const {
    if (mode == ValueMode::Exact && !integral_) {
      throw InvalidInput("exact mode requires integer-valued dissimilarities");
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }
  DissimilarityMatrix with_labels(std::vector<std::string> labels) const {
    if (labels.size() != size()) throw InvalidInput("label count does not match matrix size");
    DissimilarityMatrix copy = *this;
    copy.labels_ = std::move(labels);
    return copy;
  }

  friend bool operator==(const DissimilarityMatrix& a, const DissimilarityMatrix& b) { return a.exact_ == b.exact_; }

 private:
  explicit DissimilarityMatrix(SquareMatrix<Rational> m) : exact_(std::move(m)) {
    const std::size_t n = exact_.size();
    approx_ = SquareMatrix<double>(n);
    integral_ = true;
    bool small = true;
    SquareMatrix<std::int64_t> ints(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Rational& v = exact_(i, j);
        if (v < 0) {
          throw InvalidInput("negative entry at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
        approx_(i, j) = to_double(v);
        if (!is_integer(v)) {
          integral_ = false;
        } else if (v > kMaxFastInteger) {
          small = false;
        } else {
          ints(i, j) = boost::multiprecision::numerator(v).convert_to<std::int64_t>();
        }
      }
    }
    if (integral_ && small) small_ = std::move(ints);
    for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i + 1));
  }

  static void check_size(std::size_t n) {
    if (n < 3) throw InvalidInput("matrix needs at least 3 species, got " + std::to_string(n));
  }

  SquareMatrix<Rational> exact_;
  SquareMatrix<double> approx_;
  bool integral_ = true;
  std::optional<SquareMatrix<std::int64_t>> small_;
  std::vector<std::string> labels_;
};

/// Accepts either the strict lower triangle (n(n-1)/2 values) or the full square.
inline DissimilarityMatrix new_matrix(std::size_t n, const std::vector<Rational>& entries) {
  if (entries.size() == n * n) return DissimilarityMatrix::from_square(n, entries);
  return DissimilarityMatrix::from_lower(n, entries);
}

/// Triangle inequality over all distinct triples.
inline bool is_metric(const DissimilarityMatrix& d) {
  const std::size_t n = d.size();
  const auto& ints = d.small_integers();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        bool violated = ints ? (*ints)(i, k) > (*ints)(i, j) + (*ints)(j, k)
                             : d.exact(i, k) > d.exact(i, j) + d.exact(j, k);
        if (violated) return false;
      }
    }
  }
  return true;
}

}  // namespace bmep
