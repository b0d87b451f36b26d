#pragma once

/**
 * @file gf2.hpp
 * @brief Dense matrices over Z/2 (residue-field linear algebra).
 */

#include <cstddef>
#include <optional>
#include <vector>

#include "ainf/lincomb.hpp"

namespace ainf {

class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  static Gf2Matrix identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return bits_.at(r * cols_ + c) != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_.at(r * cols_ + c) = v ? 1 : 0; }
  void flip(std::size_t r, std::size_t c) { bits_.at(r * cols_ + c) ^= 1; }

  /// Matrix-vector product on a sparse Z/2 vector given by its support.
  std::vector<Index> apply(const std::vector<Index>& support) const {
    std::vector<unsigned char> acc(rows_, 0);
    for (Index c : support) {
      for (std::size_t r = 0; r < rows_; ++r) acc[r] ^= static_cast<unsigned char>(get(r, c));
    }
    std::vector<Index> out;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (acc[r]) out.push_back(static_cast<Index>(r));
    }
    return out;
  }

  Gf2Matrix operator*(const Gf2Matrix& o) const {
    Gf2Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!get(i, k)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) {
          if (o.get(k, j)) out.flip(i, j);
        }
      }
    }
    return out;
  }

  std::size_t rank() const {
    Gf2Matrix m = *this;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
      std::size_t pivot = rank;
      while (pivot < rows_ && !m.get(pivot, c)) ++pivot;
      if (pivot == rows_) continue;
      m.swap_rows(pivot, rank);
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r != rank && m.get(r, c)) m.add_row(rank, r);
      }
      ++rank;
    }
    return rank;
  }

  /// Inverse by Gauss-Jordan; nullopt when singular or not square.
  std::optional<Gf2Matrix> inverse() const {
    if (rows_ != cols_) return std::nullopt;
    Gf2Matrix m = *this;
    Gf2Matrix inv = identity(rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
      std::size_t pivot = c;
      while (pivot < rows_ && !m.get(pivot, c)) ++pivot;
      if (pivot == rows_) return std::nullopt;
      m.swap_rows(pivot, c);
      inv.swap_rows(pivot, c);
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r != c && m.get(r, c)) {
          m.add_row(c, r);
          inv.add_row(c, r);
        }
      }
    }
    return inv;
  }

  friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) = default;

 private:
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap(bits_[a * cols_ + c], bits_[b * cols_ + c]);
  }
  /// row[dst] += row[src]
  void add_row(std::size_t src, std::size_t dst) {
    for (std::size_t c = 0; c < cols_; ++c) bits_[dst * cols_ + c] ^= bits_[src * cols_ + c];
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<unsigned char> bits_;
};

inline Gf2Matrix residue_matrix(const LinearMap& f) {
  Gf2Matrix m(f.rows(), f.cols());
  for (Index r = 0; r < f.rows(); ++r) {
    for (Index c = 0; c < f.cols(); ++c) m.set(r, c, !f.at(r, c).residue().is_zero());
  }
  return m;
}

}  // namespace ainf
