#pragma once

#include <array>
#include <climits>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "qiembed/errors.hpp"
#include "qiembed/linalg.hpp"
#include "qiembed/rational.hpp"

namespace qiembed {

constexpr int kInfiniteValuation = INT_MAX;

inline int vp(std::int64_t n, int p) {
  if (n == 0) return kInfiniteValuation;
  int v = 0;
  while (n % p == 0) n /= p, ++v;
  return v;
}

inline int vp(const Rational& r, int p) {
  if (r.is_zero()) return kInfiniteValuation;
  return vp(r.num(), p) - vp(r.den(), p);
}

inline std::int64_t ipow(int p, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

inline Rational ppow(int p, int e) { return e >= 0 ? Rational(ipow(p, e)) : Rational(1, ipow(p, -e)); }

/// The integer in [0, p^a) congruent to the p-integral rational x mod p^a.
inline std::int64_t residue(const Rational& x, int p, int a) {
  if (a <= 0) return 0;
  const __int128 mod = ipow(p, a);
  // inverse of the denominator mod p^a by extended Euclid
  __int128 r0 = mod, r1 = ((x.den() % mod) + mod) % mod, s0 = 0, s1 = 1;
  while (r1 != 0) {
    __int128 q = r0 / r1, t = r0 - q * r1;
    r0 = r1, r1 = t;
    t = s0 - q * s1;
    s0 = s1, s1 = t;
  }
  if (r0 != 1) throw ArithmeticError("denominator not a p-adic unit");
  __int128 inv = ((s0 % mod) + mod) % mod;
  __int128 n = ((static_cast<__int128>(x.num()) % mod) + mod) % mod;
  return static_cast<std::int64_t>(n * inv % mod);
}

/// Hermite normal form of the Z_p-lattice spanned by `cols` (each of length
/// dim, together spanning Q^dim): upper triangular, diagonal p^{a_i},
/// entry (i, j > i) an integer in [0, p^{a_i}). The lattice is first scaled
/// by p^{-shift} so that it lies in Z_p^dim but not in p Z_p^dim; `shift`
/// is returned so that exact lattice equality is (shift, form) equality.
struct LatticeForm {
  int shift = 0;
  std::vector<std::int64_t> h;  // dim x dim row-major

  friend bool operator==(const LatticeForm&, const LatticeForm&) = default;
};

inline LatticeForm lattice_form(std::vector<QVector> cols, std::size_t dim, int p) {
  int m = kInfiniteValuation;
  for (const auto& c : cols)
    for (const auto& x : c) m = std::min(m, vp(x, p));
  if (m == kInfiniteValuation) throw SingularBasis("zero lattice");
  const Rational scale = ppow(p, -m);
  for (auto& c : cols)
    for (auto& x : c) x *= scale;

  std::vector<std::size_t> remaining(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) remaining[j] = j;
  std::vector<QVector> piv(dim);
  std::vector<int> a(dim);
  for (std::size_t ii = dim; ii-- > 0;) {
    std::size_t best = remaining.size();
    int bv = kInfiniteValuation;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      int v = vp(cols[remaining[r]][ii], p);
      if (v < bv) bv = v, best = r;
    }
    if (best == remaining.size()) throw SingularBasis("generators do not span");
    QVector c = cols[remaining[best]];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    const Rational unit = ppow(p, bv) / c[ii];
    for (auto& x : c) x *= unit;
    for (auto j : remaining) {
      const Rational f = cols[j][ii] / c[ii];
      if (f.is_zero()) continue;
      for (std::size_t k = 0; k <= ii; ++k) cols[j][k] -= f * c[k];
    }
    piv[ii] = std::move(c);
    a[ii] = bv;
  }
  for (std::size_t i = dim - 1; i-- > 0;)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const Rational x = piv[j][i];
      const Rational f = (x - Rational(residue(x, p, a[i]))) / ppow(p, a[i]);
      if (f.is_zero()) continue;
      for (std::size_t k = 0; k <= i; ++k) piv[j][k] -= f * piv[i][k];
    }
  LatticeForm out{m, std::vector<std::int64_t>(dim * dim)};
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const Rational& x = piv[j][i];
      if (!x.is_integer()) throw PostconditionViolated("non-integral normal form");
      out.h[i * dim + j] = x.num();
    }
  return out;
}

/// Homothety class of a Z_p-lattice in Q_p^dim, stored as its normal form
/// (the representative in Z_p^dim not contained in p Z_p^dim).
template <std::size_t Dim>
struct LatticeClassT {
  int p = 2;
  std::array<std::int64_t, Dim * Dim> h{};

  static LatticeClassT from_generators(const std::vector<QVector>& cols, int p) {
    auto f = lattice_form(cols, Dim, p);
    LatticeClassT c;
    c.p = p;
    std::copy(f.h.begin(), f.h.end(), c.h.begin());
    return c;
  }

  std::int64_t operator()(std::size_t i, std::size_t j) const { return h[i * Dim + j]; }

  std::vector<QVector> columns() const {
    std::vector<QVector> cols(Dim, QVector(Dim));
    for (std::size_t i = 0; i < Dim; ++i)
      for (std::size_t j = 0; j < Dim; ++j) cols[j][i] = Rational((*this)(i, j));
    return cols;
  }
  QMatrix basis() const { return QMatrix::from_columns(columns()); }

  int det_valuation() const {
    int v = 0;
    for (std::size_t i = 0; i < Dim; ++i) v += vp((*this)(i, i), p);
    return v;
  }
  int type() const { return det_valuation() % static_cast<int>(Dim); }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < Dim; ++i) {
      s += i ? ";" : "";
      for (std::size_t j = 0; j < Dim; ++j) s += (j ? "," : "") + std::to_string((*this)(i, j));
    }
    return s + "]";
  }

  friend bool operator==(const LatticeClassT&, const LatticeClassT&) = default;
  friend auto operator<=>(const LatticeClassT&, const LatticeClassT&) = default;
};

using LatticeClass = LatticeClassT<3>;
using LatticeClass2 = LatticeClassT<2>;

/// Canonical class of the lattice spanned by the columns of `basis`.
inline LatticeClass canonicalize(const QMatrix& basis, int p) {
  if (basis.rows() != 3 || basis.cols() != 3) throw SingularBasis("basis must be 3x3");
  if (determinant(basis).is_zero()) throw SingularBasis("singular basis");
  std::vector<QVector> cols;
  for (std::size_t j = 0; j < 3; ++j) cols.push_back(basis.column(j));
  return LatticeClass::from_generators(cols, p);
}

/// Elementary-divisor exponents e_1 <= ... of span(B') relative to span(B).
inline std::vector<int> relative_exponents(const QMatrix& b, const QMatrix& b2, int p) {
  const QMatrix m = *inverse(b) * b2;
  const std::size_t n = m.rows();
  int e1 = kInfiniteValuation;
  for (const auto& x : m.data()) e1 = std::min(e1, vp(x, p));
  const int vdet = vp(determinant(m), p);
  if (n == 2) return {e1, vdet - e1};
  int m2 = kInfiniteValuation;
  for (std::size_t r0 = 0; r0 < n; ++r0)
    for (std::size_t r1 = r0 + 1; r1 < n; ++r1)
      for (std::size_t c0 = 0; c0 < n; ++c0)
        for (std::size_t c1 = c0 + 1; c1 < n; ++c1)
          m2 = std::min(m2, vp(m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0), p));
  return {e1, m2 - e1, vdet - m2};
}

/// Graph distance in the 1-skeleton of the building (or tree): the spread
/// of the elementary-divisor exponents.
template <std::size_t Dim>
int class_distance(const LatticeClassT<Dim>& a, const LatticeClassT<Dim>& b) {
  auto e = relative_exponents(a.basis(), b.basis(), a.p);
  return e.back() - e.front();
}

/// Nonzero vectors of F_p^3 whose first nonzero coordinate is 1.
inline std::vector<std::array<int, 3>> projective_points(int p) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c) {
        std::array<int, 3> v{a, b, c};
        int lead = a ? a : b ? b : c;
        if (lead == 1) out.push_back(v);
      }
  return out;
}

/// Classes of M with pL < M < L, M/pL a line or a plane of L/pL.
inline std::vector<LatticeClass> neighbors(const LatticeClass& l) {
  const int p = l.p;
  const auto b = l.basis();
  std::vector<QVector> base;
  for (std::size_t j = 0; j < 3; ++j) base.push_back(Rational(p) * b.column(j));
  auto image = [&](const std::array<int, 3>& v) {
    QVector r(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) r[i] += b(i, j) * Rational(v[j]);
    return r;
  };
  const auto pts = projective_points(p);
  std::vector<LatticeClass> out;
  for (const auto& v : pts) {
    auto gens = base;
    gens.push_back(image(v));
    out.push_back(LatticeClass::from_generators(gens, p));
  }
  for (const auto& w : pts) {
    auto gens = base;
    for (const auto& v : pts)
      if ((w[0] * v[0] + w[1] * v[1] + w[2] * v[2]) % p == 0) gens.push_back(image(v));
    out.push_back(LatticeClass::from_generators(gens, p));
  }
  return out;
}

/// Class of span(p^a e1, p^b e2, p^c e3).
inline LatticeClass apartment_vertex(int a, int b, int c, int p) {
  QMatrix m(3, 3);
  m(0, 0) = ppow(p, a);
  m(1, 1) = ppow(p, b);
  m(2, 2) = ppow(p, c);
  return canonicalize(m, p);
}

/// Coefficient vectors spanning {c in Z_p^k : r . c = 0} over Z_p.
inline std::vector<QVector> functional_kernel(const QVector& r, int p) {
  std::size_t j = 0;
  int best = kInfiniteValuation;
  for (std::size_t k = 0; k < r.size(); ++k)
    if (vp(r[k], p) < best) best = vp(r[k], p), j = k;
  std::vector<QVector> out;
  if (best == kInfiniteValuation) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      QVector e(r.size());
      e[k] = 1;
      out.push_back(e);
    }
    return out;
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (k == j) continue;
    QVector e(r.size());
    e[k] = 1;
    e[j] = -r[k] / r[j];
    out.push_back(e);
  }
  return out;
}

/// Generators of L intersected with the coordinate subspace {x_d = 0}, with
/// coordinate d removed.
inline std::vector<QVector> intersect_hyperplane(const std::vector<QVector>& cols, std::size_t d, int p) {
  QVector r;
  for (const auto& c : cols) r.push_back(c[d]);
  std::vector<QVector> out;
  for (const auto& k : functional_kernel(r, p)) {
    QVector v(cols.front().size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += k[j] * cols[j][i];
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(d));
    out.push_back(std::move(v));
  }
  return out;
}

/// Generators of the image of L under the coordinate projection dropping d.
inline std::vector<QVector> drop_coordinate(std::vector<QVector> cols, std::size_t d) {
  for (auto& c : cols) c.erase(c.begin() + static_cast<std::ptrdiff_t>(d));
  return cols;
}

}  // namespace qiembed
