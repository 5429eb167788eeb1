#pragma once

#include <cstddef>
#include <vector>

#include "cccn/errors.hpp"
#include "cccn/gf.hpp"

namespace cccn {

// Dense row-major matrix over F_{2^m}. Field context is passed per operation
// so one matrix value can be reused across experiments with the same layout.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static Matrix identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
    return I;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  FieldElement operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  bool is_zero() const {
    for (FieldElement v : data_)
      if (v) return false;
    return true;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  const std::vector<FieldElement>& data() const { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<FieldElement> data_;
};

inline Matrix mat_add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InconsistentStructure("matrix add: shape mismatch");
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = Field::add(a(i, j), b(i, j));
  return r;
}

inline Matrix mat_mul(const Field& f, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InconsistentStructure("matrix mul: shape mismatch");
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      FieldElement aik = a(i, k);
      if (!aik) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        r(i, j) = Field::add(r(i, j), f.mul(aik, b(k, j)));
    }
  return r;
}

namespace detail {

// Forward elimination to row echelon form, first nonzero pivot per column.
// Returns the rank; `rhs` (may be null) receives the same row operations.
inline std::size_t echelonize(const Field& f, Matrix& a, Matrix* rhs) {
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < a.cols() && pivot_row < a.rows(); ++col) {
    std::size_t sel = pivot_row;
    while (sel < a.rows() && a(sel, col) == 0) ++sel;
    if (sel == a.rows()) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(pivot_row, j), a(sel, j));
    if (rhs)
      for (std::size_t j = 0; j < rhs->cols(); ++j) std::swap((*rhs)(pivot_row, j), (*rhs)(sel, j));
    FieldElement pinv = f.inv(a(pivot_row, col));
    for (std::size_t j = col; j < a.cols(); ++j) a(pivot_row, j) = f.mul(a(pivot_row, j), pinv);
    if (rhs)
      for (std::size_t j = 0; j < rhs->cols(); ++j) (*rhs)(pivot_row, j) = f.mul((*rhs)(pivot_row, j), pinv);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == pivot_row) continue;
      FieldElement factor = a(r, col);
      if (!factor) continue;
      for (std::size_t j = col; j < a.cols(); ++j)
        a(r, j) = Field::add(a(r, j), f.mul(factor, a(pivot_row, j)));
      if (rhs)
        for (std::size_t j = 0; j < rhs->cols(); ++j)
          (*rhs)(r, j) = Field::add((*rhs)(r, j), f.mul(factor, (*rhs)(pivot_row, j)));
    }
    ++pivot_row;
  }
  return pivot_row;
}

}  // namespace detail

inline std::size_t mat_rank(const Field& f, Matrix a) {
  return detail::echelonize(f, a, nullptr);
}

// Gauss-Jordan inverse; throws SingularMatrix (a non-decodable symbol set).
inline Matrix mat_invert(const Field& f, Matrix a) {
  if (a.rows() != a.cols()) throw InconsistentStructure("inverse of non-square matrix");
  Matrix inv = Matrix::identity(a.rows());
  if (detail::echelonize(f, a, &inv) != a.rows()) throw SingularMatrix();
  return inv;
}

// Solves A c = w by elimination with first-nonzero-pivot pivoting.
inline Matrix solve_system(const Field& f, Matrix a, Matrix w) {
  if (a.rows() != w.rows()) throw InconsistentStructure("solve: rhs row mismatch");
  std::size_t r = detail::echelonize(f, a, &w);
  if (r < a.cols()) throw SingularMatrix();
  return w;
}

}  // namespace cccn
