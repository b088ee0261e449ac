#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qiembed/errors.hpp"

namespace qiembed {

/// Working precision for symmetric-space computations. Eigenvalues of
/// P^-1 Q reach e^(+-180) at desk-scale distances, so double cannot
/// resolve the small end of the spectrum.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<192>, boost::multiprecision::et_off>;

/// Dense square matrix, row-major.
template <class T>
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<T> a;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), a(size * size, T(0)) {}

  static SquareMatrix identity(std::size_t size) {
    SquareMatrix m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = T(1);
    return m;
  }

  T& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  friend SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) {
    SquareMatrix z(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
      for (std::size_t k = 0; k < x.n; ++k) {
        if (x(i, k) == 0) continue;
        for (std::size_t j = 0; j < x.n; ++j) z(i, j) += x(i, k) * y(k, j);
      }
    return z;
  }

  SquareMatrix transpose() const {
    SquareMatrix t(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

/// Lower-triangular L with m = L L^T. Throws NotSPD on a non-positive pivot.
template <class T>
SquareMatrix<T> cholesky(const SquareMatrix<T>& m) {
  using std::sqrt;
  SquareMatrix<T> l(m.n);
  for (std::size_t j = 0; j < m.n; ++j) {
    T d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0)) throw NotSPD("Cholesky pivot is not positive");
    l(j, j) = sqrt(d);
    for (std::size_t i = j + 1; i < m.n; ++i) {
      T s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// L^-1 M L^-T for lower-triangular L.
template <class T>
SquareMatrix<T> congruence_inverse(const SquareMatrix<T>& l, const SquareMatrix<T>& m) {
  const std::size_t n = m.n;
  // Y = L^-1 M by forward substitution on each column
  SquareMatrix<T> y(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      T s = m(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y(k, c);
      y(i, c) = s / l(i, i);
    }
  // Z = Y L^-T, i.e. Z^T = L^-1 Y^T
  SquareMatrix<T> z(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < n; ++i) {
      T s = y(r, i);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z(r, k);
      z(r, i) = s / l(i, i);
    }
  return z;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi. A pair (p, q) is
/// rotated while |a_pq| > eps sqrt(a_pp a_qq), which keeps small
/// eigenvalues of graded positive definite matrices relatively accurate.
template <class T>
std::vector<T> jacobi_eigenvalues(SquareMatrix<T> a, int max_sweeps = 60) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.n;
  const T eps = std::numeric_limits<T>::epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        T apq = a(p, q);
        if (apq == 0) continue;
        if (abs(apq) <= eps * sqrt(abs(a(p, p) * a(q, q)))) {
          a(p, q) = a(q, p) = T(0);
          continue;
        }
        rotated = true;
        T theta = (a(q, q) - a(p, p)) / (2 * apq);
        T t = T(1) / (abs(theta) + sqrt(theta * theta + 1));
        if (theta < 0) t = -t;
        T c = T(1) / sqrt(t * t + 1);
        T s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = T(0);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          T arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
      }
    if (!rotated) break;
  }
  std::vector<T> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  return ev;
}

/// Squared singular values of a square matrix by one-sided (Hestenes)
/// Jacobi on its columns. Works on the matrix itself rather than m m^T, so
/// graded triangular inputs keep their small singular values accurate.
template <class T>
std::vector<T> singular_values_squared(SquareMatrix<T> m, int max_sweeps = 80) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = m.n;
  const T eps = std::numeric_limits<T>::epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        T alpha = 0, beta = 0, gamma = 0;
        for (std::size_t k = 0; k < n; ++k) {
          alpha += m(k, p) * m(k, p);
          beta += m(k, q) * m(k, q);
          gamma += m(k, p) * m(k, q);
        }
        if (abs(gamma) <= eps * sqrt(alpha * beta)) continue;
        rotated = true;
        T zeta = (beta - alpha) / (2 * gamma);
        T t = T(1) / (abs(zeta) + sqrt(1 + zeta * zeta));
        if (zeta < 0) t = -t;
        T c = T(1) / sqrt(1 + t * t), s = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          T x = m(k, p), y = m(k, q);
          m(k, p) = c * x - s * y;
          m(k, q) = s * x + c * y;
        }
      }
    if (!rotated) break;
  }
  std::vector<T> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    T norm = 0;
    for (std::size_t k = 0; k < n; ++k) norm += m(k, j) * m(k, j);
    out[j] = norm;
  }
  return out;
}

}  // namespace qiembed
