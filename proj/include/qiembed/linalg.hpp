#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qiembed/rational.hpp"

namespace qiembed {

using QVector = std::vector<Rational>;

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline QVector operator+(const QVector& a, const QVector& b) {
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline QVector operator-(const QVector& a, const QVector& b) {
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline QVector operator*(const Rational& c, const QVector& a) {
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline bool is_zero(const QVector& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

/// Dense row-major matrix over the rationals.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static QMatrix from_rows(const std::vector<QVector>& rows) {
    QMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i)
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    return m;
  }

  static QMatrix from_columns(const std::vector<QVector>& cols) {
    QMatrix m(cols.empty() ? 0 : cols.front().size(), cols.size());
    for (std::size_t j = 0; j < m.cols_; ++j)
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  QVector row(std::size_t i) const { return QVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }
  QVector column(std::size_t j) const {
    QVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    QMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend QVector operator*(const QMatrix& a, const QVector& v) {
    QVector r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

  const std::vector<Rational>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

namespace detail {

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = Rational(1) / m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      Rational f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank(QMatrix m) { return detail::rref(m).size(); }

/// Rank of a family of vectors.
inline std::size_t rank_of(const std::vector<QVector>& vs) {
  if (vs.empty()) return 0;
  return rank(QMatrix::from_rows(vs));
}

inline bool in_span(const std::vector<QVector>& basis, const QVector& v) {
  if (basis.empty()) return is_zero(v);
  auto with = basis;
  with.push_back(v);
  return rank_of(with) == rank_of(basis);
}

/// Basis of {x : m x = 0}.
inline std::vector<QVector> nullspace(QMatrix m) {
  auto pivots = detail::rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    QVector v(m.cols());
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Unique solution of a square system, or nullopt if singular.
inline std::optional<QVector> solve(const QMatrix& a, const QVector& b) {
  const std::size_t n = a.rows();
  QMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto pivots = detail::rref(aug);
  if (pivots.size() < n || pivots.back() >= n) return std::nullopt;
  QVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

inline std::optional<QMatrix> inverse(const QMatrix& a) {
  const std::size_t n = a.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = detail::rref(aug);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

inline Rational determinant(QMatrix m) {
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

}  // namespace qiembed
