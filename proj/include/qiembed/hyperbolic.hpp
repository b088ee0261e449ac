#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qiembed/precision.hpp"

namespace qiembed {

/// Element (t, s) of the affine group, identified with its orbit point
/// z = e^{2t}(s + i) in the upper half plane. Matrix form: [[e^t, s e^t], [0, e^-t]].
struct HyperbolicPoint {
  double t = 0.0;
  double s = 0.0;

  double x() const { return s * std::exp(2.0 * t); }
  double y() const { return std::exp(2.0 * t); }

  friend bool operator==(const HyperbolicPoint&, const HyperbolicPoint&) = default;
};

/// Group product a * b.
inline HyperbolicPoint compose(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  return {a.t + b.t, b.s + a.s * std::exp(-2.0 * b.t)};
}

/// The point with z = x + i y, y > 0.
inline HyperbolicPoint from_half_plane(double x, double y) { return {0.5 * std::log(y), x / y}; }

/// Distance in the curvature -1 upper half plane,
/// d = 2 asinh(|z_a - z_b| / (2 sqrt(y_a y_b))), evaluated in extended precision.
template <class T = Real>
T hyperbolic_distance_t(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  using std::asinh;
  using std::exp;
  using std::sqrt;
  // |dz|^2 / (y_a y_b) = (s_a e^u - s_b e^-u)^2 + 4 sinh^2 u, u = t_a - t_b
  T u = T(a.t) - T(b.t);
  T eu = exp(u), emu = exp(-u);
  T dx = T(a.s) * eu - T(b.s) * emu;
  T sh = (eu - emu) / 2;
  T q = dx * dx + 4 * sh * sh;
  return 2 * asinh(sqrt(q) / 2);
}

/// Same formula in long double; agrees with the extended-precision version
/// to about 1e-15 relative.
inline double hyperbolic_distance(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  const long double u = static_cast<long double>(a.t) - b.t;
  const long double eu = std::exp(u), emu = std::exp(-u);
  const long double dx = static_cast<long double>(a.s) * eu - static_cast<long double>(b.s) * emu;
  const long double sh = std::sinh(u);
  const long double q = dx * dx + 4.0L * sh * sh;
  return static_cast<double>(2.0L * std::asinh(std::sqrt(q) / 2.0L));
}

/// Point at distance d from i in the direction making angle phi with the
/// upward vertical (rotation about i by phi applied to e^d i).
inline HyperbolicPoint displacement(double d, double phi) {
  const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
  // z = (c e^d i + s) / (-s e^d i + c); Im z = e^d / D, Re z / Im z = -sin(phi) sinh(d)
  // with D = c^2 + s^2 e^{2d}
  double logd;
  if (s == 0.0) {
    logd = 2.0 * std::log(std::abs(c));
  } else if (c == 0.0) {
    logd = 2.0 * std::log(std::abs(s)) + 2.0 * d;
  } else {
    double l1 = 2.0 * std::log(std::abs(c)), l2 = 2.0 * std::log(std::abs(s)) + 2.0 * d;
    double hi = std::max(l1, l2), lo = std::min(l1, l2);
    logd = hi + std::log1p(std::exp(lo - hi));
  }
  return {0.5 * (d - logd), -std::sin(phi) * std::sinh(d)};
}

/// n-fold product of hyperbolic planes with the L1 metric.
struct ProductPoint {
  std::vector<HyperbolicPoint> factors;
  friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
};

inline ProductPoint compose(const ProductPoint& a, const ProductPoint& b) {
  ProductPoint r;
  for (std::size_t i = 0; i < a.factors.size(); ++i) r.factors.push_back(compose(a.factors[i], b.factors[i]));
  return r;
}

template <class T = Real>
T product_distance_t(const ProductPoint& p, const ProductPoint& q) {
  T d = 0;
  for (std::size_t i = 0; i < p.factors.size(); ++i) d += hyperbolic_distance_t<T>(p.factors[i], q.factors[i]);
  return d;
}

inline double product_distance(const ProductPoint& p, const ProductPoint& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.factors.size(); ++i) d += hyperbolic_distance(p.factors[i], q.factors[i]);
  return d;
}

/// The path x -> x'' -> y'' -> y toward the boundary point at infinity.
/// x' is the point of the vertical ray from x on the horocycle of y;
/// x'' and y'' are x' and y pushed up by d(x', y).
struct RankOnePath {
  std::complex<double> x, x_prime, x_second, y_second, y;
  double length = 0.0;
  double distance = 0.0;  // d(x, y)
  double excess() const { return length - 3.0 * distance; }
};

inline RankOnePath rank_one_quasi_path(HyperbolicPoint a, HyperbolicPoint b) {
  // Busemann function of infinity is -2t; orient so that x is the lower point.
  if (a.t > b.t) std::swap(a, b);
  auto to_z = [](const HyperbolicPoint& p) { return std::complex<double>(p.x(), p.y()); };
  RankOnePath path;
  path.x = to_z(a);
  path.y = to_z(b);
  path.distance = hyperbolic_distance(a, b);
  const HyperbolicPoint xp{b.t, a.s * std::exp(2.0 * (a.t - b.t))};
  const double h = hyperbolic_distance(xp, b);
  const HyperbolicPoint xs{b.t + 0.5 * h, xp.s * std::exp(-h)};
  const HyperbolicPoint ys{b.t + 0.5 * h, b.s * std::exp(-h)};
  path.x_prime = to_z(xp);
  path.x_second = to_z(xs);
  path.y_second = to_z(ys);
  const double up = 2.0 * (xs.t - a.t);  // vertical segment x -> x''
  path.length = up + hyperbolic_distance(xs, ys) + h;
  return path;
}

}  // namespace qiembed
