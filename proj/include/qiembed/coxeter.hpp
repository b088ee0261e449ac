#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qiembed/errors.hpp"
#include "qiembed/linalg.hpp"
#include "qiembed/root_system.hpp"

namespace qiembed {

/// Integer matrix acting on simple-root coordinates (column vectors).
/// The Weyl group preserves the root lattice, so every element is integral
/// in this basis.
struct WeylElement {
  std::size_t n = 0;
  std::vector<std::int64_t> m;  // row-major n x n

  std::int64_t operator()(std::size_t i, std::size_t j) const { return m[i * n + j]; }

  friend WeylElement operator*(const WeylElement& a, const WeylElement& b) {
    WeylElement c{a.n, std::vector<std::int64_t>(a.n * a.n, 0)};
    for (std::size_t i = 0; i < a.n; ++i)
      for (std::size_t k = 0; k < a.n; ++k) {
        auto aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < a.n; ++j) c.m[i * a.n + j] += aik * b(k, j);
      }
    return c;
  }

  QVector apply(const QVector& v) const {
    QVector r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i * n + j] != 0) r[i] += Rational(m[i * n + j]) * v[j];
    return r;
  }

  SimpleCoords apply(const SimpleCoords& v) const {
    SimpleCoords r(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i] += m[i * n + j] * v[j];
    return r;
  }

  friend bool operator==(const WeylElement&, const WeylElement&) = default;
};

struct WeylElementHash {
  std::size_t operator()(const WeylElement& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : w.m) h = (h ^ static_cast<std::size_t>(x + 0x9e3779b9)) * 1099511628211ull;
    return h;
  }
};

/// Closed-form order of the Weyl group.
inline std::uint64_t weyl_group_order(const CartanType& t) {
  auto fact = [](std::uint64_t n) {
    std::uint64_t f = 1;
    for (std::uint64_t i = 2; i <= n; ++i) f *= i;
    return f;
  };
  std::uint64_t order = 1;
  for (const auto& f : t.factors()) {
    const auto n = static_cast<std::uint64_t>(f.rank);
    switch (f.family) {
      case 'A': order *= fact(n + 1); break;
      case 'B':
      case 'C': order *= (std::uint64_t{1} << n) * fact(n); break;
      case 'D': order *= (std::uint64_t{1} << (n - 1)) * fact(n); break;
      case 'E': order *= n == 6 ? 51840ull : n == 7 ? 2903040ull : 696729600ull; break;
      case 'F': order *= 1152; break;
      case 'G': order *= 12; break;
      default: break;
    }
  }
  return order;
}

class WeylGroup {
 public:
  static constexpr int kMaxRank = 6;

  const std::vector<WeylElement>& generators() const { return generators_; }
  const std::vector<WeylElement>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }

  friend WeylGroup generate_weyl_group(const RootSystem& r);

 private:
  std::vector<WeylElement> generators_;
  std::vector<WeylElement> elements_;
};

/// Full enumeration of W by closure of the simple reflections (rank <= 6).
inline WeylGroup generate_weyl_group(const RootSystem& r) {
  if (r.rank() > WeylGroup::kMaxRank)
    throw RankTooLarge("Weyl group enumeration is limited to rank " + std::to_string(WeylGroup::kMaxRank));
  const auto n = static_cast<std::size_t>(r.rank());
  const auto& cartan = r.cartan_matrix();
  WeylGroup w;
  for (std::size_t i = 0; i < n; ++i) {
    // s_i(c) = c - <c, a_i^v> e_i, with <c, a_i^v> = sum_k c_k <a_k, a_i^v>
    WeylElement g{n, std::vector<std::int64_t>(n * n, 0)};
    for (std::size_t k = 0; k < n; ++k) g.m[k * n + k] = 1;
    for (std::size_t k = 0; k < n; ++k) g.m[i * n + k] -= cartan[k][i];
    w.generators_.push_back(std::move(g));
  }
  WeylElement id{n, std::vector<std::int64_t>(n * n, 0)};
  for (std::size_t k = 0; k < n; ++k) id.m[k * n + k] = 1;
  std::unordered_map<WeylElement, std::size_t, WeylElementHash> seen;
  seen.emplace(id, 0);
  w.elements_.push_back(id);
  for (std::size_t head = 0; head < w.elements_.size(); ++head)
    for (const auto& g : w.generators_) {
      WeylElement e = g * w.elements_[head];
      if (seen.emplace(e, w.elements_.size()).second) w.elements_.push_back(std::move(e));
    }
  return w;
}

/// A vertex of the spherical Coxeter complex: a W-image of a fundamental
/// coweight ray, stored in simple-root coordinates.
struct SphericalVertex {
  QVector direction;
  int type = 0;  // index k of the fundamental ray it is an image of

  friend bool operator==(const SphericalVertex& a, const SphericalVertex& b) {
    return a.type == b.type && a.direction == b.direction;
  }
};

/// A wall of the complex, identified by its positive root normal.
struct Wall {
  std::size_t root_index = 0;  // into RootSystem::positive_roots()
  friend bool operator==(const Wall&, const Wall&) = default;
};

/// The linear functional x -> (root, x) on simple-root coordinates.
inline QVector root_functional(const RootSystem& r, const SimpleCoords& root) {
  const auto n = static_cast<std::size_t>(r.rank());
  QVector f(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (root[k] != 0) f[j] += Rational(root[k]) * r.gram()(k, j);
  return f;
}

/// Cached wall functionals for one root system.
class WallTable {
 public:
  explicit WallTable(const RootSystem& r) {
    for (const auto& p : r.positive_roots()) functionals_.push_back(root_functional(r, p.simple_coords));
  }
  std::size_t size() const { return functionals_.size(); }
  Rational eval(std::size_t wall, const QVector& x) const { return dot(functionals_[wall], x); }
  const QVector& functional(std::size_t wall) const { return functionals_[wall]; }

 private:
  std::vector<QVector> functionals_;
};

/// Fundamental coweight directions: (a_j, w_k) = delta_jk, in simple-root coordinates.
inline std::vector<QVector> fundamental_coweights(const RootSystem& r) {
  const auto n = static_cast<std::size_t>(r.rank());
  auto ginv = inverse(r.gram());
  if (!ginv) throw PostconditionViolated("singular Gram matrix");
  std::vector<QVector> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(ginv->column(k));
  return out;
}

/// All vertices, sorted canonically: by type, then by direction in
/// descending lexicographic order.
inline std::vector<SphericalVertex> vertex_set(const RootSystem& r, const WeylGroup& w) {
  auto coweights = fundamental_coweights(r);
  std::vector<SphericalVertex> out;
  for (std::size_t k = 0; k < coweights.size(); ++k) {
    std::vector<QVector> orbit;
    for (const auto& e : w.elements()) orbit.push_back(e.apply(coweights[k]));
    std::sort(orbit.begin(), orbit.end(), std::greater<>());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    for (auto& d : orbit) out.push_back({std::move(d), static_cast<int>(k)});
  }
  return out;
}

inline QVector ambient_direction(const RootSystem& r, const QVector& simple) { return r.ambient_of(simple); }

/// True iff b = c a for some c < 0.
inline bool are_opposite(const QVector& a, const QVector& b) {
  std::optional<Rational> ratio;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero() != b[i].is_zero()) return false;
    if (a[i].is_zero()) continue;
    Rational q = b[i] / a[i];
    if (ratio && *ratio != q) return false;
    ratio = q;
  }
  return ratio && ratio->sign() < 0;
}

/// Walls whose hyperplane contains every vector of vs.
inline std::vector<std::size_t> walls_containing(const std::vector<QVector>& vs, const WallTable& walls) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < walls.size(); ++k) {
    bool all = true;
    for (const auto& v : vs)
      if (!walls.eval(k, v).is_zero()) {
        all = false;
        break;
      }
    if (all) out.push_back(k);
  }
  return out;
}

/// The wall spanned by vs, if exactly one wall contains all of them.
inline std::optional<Wall> spanned_wall(const std::vector<QVector>& vs, const WallTable& walls) {
  auto c = walls_containing(vs, walls);
  if (c.size() != 1) return std::nullopt;
  return Wall{c.front()};
}

inline bool spans_wall(const std::vector<SphericalVertex>& vs, const RootSystem& r) {
  WallTable walls(r);
  std::vector<QVector> dirs;
  for (const auto& v : vs) dirs.push_back(v.direction);
  return spanned_wall(dirs, walls).has_value();
}

namespace detail {

inline bool maximally_distributed(const std::vector<QVector>& xi, const WallTable& walls) {
  const std::size_t n = xi.size();
  // (i) not pairwise opposite, not all in one wall
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (are_opposite(xi[i], xi[j]) || xi[i] == xi[j]) return false;
  if (!walls_containing(xi, walls).empty()) return false;
  // (ii) every (n-1)-subset spans a wall
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<QVector> rest;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest.push_back(xi[j]);
    if (!spanned_wall(rest, walls)) return false;
  }
  // (iii) a singular hemisphere containing all has n-1 of them on its boundary
  for (std::size_t k = 0; k < walls.size(); ++k) {
    int pos = 0, neg = 0;
    for (const auto& v : xi) {
      int s = walls.eval(k, v).sign();
      pos += s > 0;
      neg += s < 0;
    }
    if ((pos == 0 || neg == 0) && pos + neg > 1) return false;
  }
  return true;
}

}  // namespace detail

inline bool is_maximally_distributed(const std::vector<SphericalVertex>& vs, const RootSystem& r) {
  if (vs.size() != static_cast<std::size_t>(r.rank()))
    throw WrongCardinality("expected " + std::to_string(r.rank()) + " vertices, got " + std::to_string(vs.size()));
  std::vector<QVector> dirs;
  for (const auto& v : vs) dirs.push_back(v.direction);
  return detail::maximally_distributed(dirs, WallTable(r));
}

/// Maximally distributed vertices with their walls s_i (spanned by the
/// other vertices), interior points eta_i of Hull({xi_j}_{j != i}) and
/// Delta = Hull(xi_1, ..., xi_n) given as the chambers it contains.
struct MaxDistConfig {
  std::vector<SphericalVertex> vertices;
  std::vector<Wall> walls;
  std::vector<QVector> etas;
  std::vector<std::size_t> delta_chambers;  // indices into WeylGroup::elements()
};

/// eta_i: the barycenter of the other vertices when it lies on no wall
/// beyond those containing all of {xi_j}_{j != i}. When the hull is cut by
/// a wall through the barycenter, the first positive integer weighting (by
/// total weight, then lexicographic) that is interior to a top cell is used.
/// Throws DegenerateBarycenter for a zero sum.
inline QVector eta_point(const std::vector<SphericalVertex>& vertices, std::size_t i, const WallTable& walls) {
  std::vector<QVector> rest;
  QVector sum(vertices.front().direction.size());
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    if (j == i) continue;
    rest.push_back(vertices[j].direction);
    sum = sum + vertices[j].direction;
  }
  if (is_zero(sum)) throw DegenerateBarycenter("sum of the remaining vertices is zero");
  const auto required = walls_containing(rest, walls);
  if (walls_containing({sum}, walls) == required) return sum;

  const std::size_t m = rest.size();
  constexpr std::int64_t kMaxWeight = 16;
  for (std::int64_t total = static_cast<std::int64_t>(m) + 1; total <= kMaxWeight * static_cast<std::int64_t>(m);
       ++total) {
    std::vector<std::int64_t> c(m, 1);
    std::optional<QVector> hit;
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t k, std::int64_t left) {
      if (hit) return;
      if (k + 1 == m) {
        if (left < 1 || left > kMaxWeight) return;
        c[k] = left;
        QVector p(sum.size());
        for (std::size_t j = 0; j < m; ++j) p = p + Rational(c[j]) * rest[j];
        if (!is_zero(p) && walls_containing({p}, walls) == required) hit = p;
        return;
      }
      for (std::int64_t v = 1; v <= std::min(kMaxWeight, left - 1); ++v) {
        c[k] = v;
        rec(k + 1, left - v);
        if (hit) return;
      }
    };
    rec(0, total);
    if (hit) return *hit;
  }
  throw PostconditionViolated("no interior point of a top cell of the hull found");
}

inline QVector eta_point(const MaxDistConfig& config, std::size_t i, const RootSystem& r) {
  return eta_point(config.vertices, i, WallTable(r));
}

/// Chambers (as W elements) whose interior point w(rho) lies in the cone
/// spanned by the given independent directions.
inline std::vector<std::size_t> chambers_in_cone(const std::vector<QVector>& gens, const RootSystem& r,
                                                 const WeylGroup& w) {
  QVector rho(static_cast<std::size_t>(r.rank()));
  for (const auto& c : fundamental_coweights(r)) rho = rho + c;
  QMatrix basis = QMatrix::from_columns(gens);
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < w.elements().size(); ++e) {
    auto coeffs = solve(basis, w.elements()[e].apply(rho));
    if (!coeffs) continue;
    if (std::all_of(coeffs->begin(), coeffs->end(), [](const Rational& c) { return c.sign() > 0; }))
      out.push_back(e);
  }
  return out;
}

/// Exhaustive search (rank <= 4) for the first maximally distributed tuple
/// in canonical vertex order.
inline MaxDistConfig find_maximally_distributed(const RootSystem& r, const WeylGroup& w) {
  if (r.rank() > 4) throw RankTooLarge("exhaustive maximally-distributed search is limited to rank 4");
  const auto n = static_cast<std::size_t>(r.rank());
  WallTable walls(r);
  auto verts = vertex_set(r, w);
  std::vector<std::size_t> pick;
  std::optional<std::vector<std::size_t>> found;

  std::function<void(std::size_t)> search = [&](std::size_t start) {
    if (found) return;
    if (pick.size() == n) {
      std::vector<QVector> dirs;
      for (auto k : pick) dirs.push_back(verts[k].direction);
      if (detail::maximally_distributed(dirs, walls)) found = pick;
      return;
    }
    for (std::size_t k = start; k < verts.size() && !found; ++k) {
      bool ok = true;
      for (auto p : pick)
        if (are_opposite(verts[p].direction, verts[k].direction)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      pick.push_back(k);
      search(k + 1);
      pick.pop_back();
    }
  };
  search(0);
  if (!found) throw NotFound("no maximally distributed vertices for " + r.cartan_type().name());

  MaxDistConfig cfg;
  for (auto k : *found) cfg.vertices.push_back(verts[k]);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<QVector> rest;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest.push_back(cfg.vertices[j].direction);
    cfg.walls.push_back(*spanned_wall(rest, walls));
    cfg.etas.push_back(eta_point(cfg.vertices, i, walls));
  }
  // the n wall normals are independent, i.e. the walls have empty common intersection
  std::vector<QVector> normals;
  for (const auto& s : cfg.walls) normals.push_back(walls.functional(s.root_index));
  if (rank_of(normals) != n) throw PostconditionViolated("walls s_i have a common point");
  std::vector<QVector> gens;
  for (const auto& v : cfg.vertices) gens.push_back(v.direction);
  cfg.delta_chambers = chambers_in_cone(gens, r, w);
  return cfg;
}

/// sin^2 of the spherical distance from xi_i to the great sphere s_i.
inline Rational theta_sin2(const MaxDistConfig& cfg, std::size_t i, const RootSystem& r) {
  const auto& root = r.positive_roots()[cfg.walls[i].root_index].simple_coords;
  QVector rc(root.begin(), root.end());
  const QVector& xi = cfg.vertices[i].direction;
  Rational ip = r.inner(rc, xi);
  return ip * ip / (r.inner(rc, rc) * r.inner(xi, xi));
}

/// theta_i = d(xi_i, s_i), each in (0, pi/2].
inline std::vector<double> theta_angles(const MaxDistConfig& cfg, const RootSystem& r) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cfg.vertices.size(); ++i) {
    double s2 = theta_sin2(cfg, i, r).to_double();
    out.push_back(std::asin(std::sqrt(std::min(1.0, s2))));
  }
  return out;
}

/// For every j, the walls {s_k}_{k != j} meet exactly in {xi_j, -xi_j}.
inline bool walls_meet_in_vertex_pairs(const MaxDistConfig& cfg, const RootSystem& r) {
  WallTable walls(r);
  const std::size_t n = cfg.vertices.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<QVector> rows;
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) rows.push_back(walls.functional(cfg.walls[k].root_index));
    auto null = rows.empty() ? std::vector<QVector>{} : nullspace(QMatrix::from_rows(rows));
    if (n == 1) continue;
    if (null.size() != 1) return false;
    if (rank_of({null.front(), cfg.vertices[j].direction}) != 1) return false;
  }
  return true;
}

}  // namespace qiembed
