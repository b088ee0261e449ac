#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qiembed/errors.hpp"
#include "qiembed/linalg.hpp"

namespace qiembed {

/// One irreducible factor of a Cartan type, e.g. {'B', 3}.
struct CartanFactor {
  char family = 'A';
  int rank = 1;
  friend bool operator==(const CartanFactor&, const CartanFactor&) = default;
};

/// A (possibly reducible) finite Cartan type such as A3, G2 or A1xA1.
class CartanType {
 public:
  CartanType() = default;
  explicit CartanType(std::vector<CartanFactor> factors) : factors_(std::move(factors)) { validate(); }
  CartanType(char family, int rank) : CartanType(std::vector<CartanFactor>{{family, rank}}) {}

  /// Parses "A3", "g2", "A1xA1", "B2xA1". Throws IllegalType.
  static CartanType parse(const std::string& text) {
    std::vector<CartanFactor> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find_first_of("xX*", pos);
      std::string part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      if (part.size() < 2) throw IllegalType("cannot parse Cartan type '" + text + "'");
      char fam = static_cast<char>(std::toupper(static_cast<unsigned char>(part[0])));
      int r = 0;
      for (std::size_t i = 1; i < part.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(part[i])))
          throw IllegalType("cannot parse Cartan type '" + text + "'");
        r = r * 10 + (part[i] - '0');
      }
      out.push_back({fam, r});
      if (end == std::string::npos) break;
      pos = end + 1;
    }
    if (out.empty()) throw IllegalType("empty Cartan type");
    return CartanType(std::move(out));
  }

  const std::vector<CartanFactor>& factors() const { return factors_; }
  bool irreducible() const { return factors_.size() == 1; }

  int rank() const {
    int r = 0;
    for (const auto& f : factors_) r += f.rank;
    return r;
  }

  std::string name() const {
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += 'x';
      s += factors_[i].family;
      s += std::to_string(factors_[i].rank);
    }
    return s;
  }

  friend bool operator==(const CartanType&, const CartanType&) = default;

 private:
  void validate() const {
    if (factors_.empty()) throw IllegalType("empty Cartan type");
    for (const auto& f : factors_) {
      bool ok = false;
      switch (f.family) {
        case 'A': ok = f.rank >= 1; break;
        case 'B': ok = f.rank >= 2; break;
        case 'C': ok = f.rank >= 2; break;
        case 'D': ok = f.rank >= 4; break;
        case 'E': ok = f.rank >= 6 && f.rank <= 8; break;
        case 'F': ok = f.rank == 4; break;
        case 'G': ok = f.rank == 2; break;
        default: break;
      }
      if (!ok)
        throw IllegalType(std::string("rank ") + std::to_string(f.rank) + " is not legal for family " + f.family);
    }
  }

  std::vector<CartanFactor> factors_;
};

using SimpleCoords = std::vector<std::int64_t>;

struct Root {
  QVector ambient;
  SimpleCoords simple_coords;

  std::int64_t height() const { return std::accumulate(simple_coords.begin(), simple_coords.end(), std::int64_t{0}); }
  friend bool operator==(const Root& a, const Root& b) { return a.simple_coords == b.simple_coords; }
};

/// Canonical root order: by height, then lexicographic on simple coordinates.
inline bool canonical_less(const SimpleCoords& a, const SimpleCoords& b) {
  auto ha = std::accumulate(a.begin(), a.end(), std::int64_t{0});
  auto hb = std::accumulate(b.begin(), b.end(), std::int64_t{0});
  if (ha != hb) return ha < hb;
  return a < b;
}

namespace detail {

// Standard (Bourbaki) realization of the simple roots of one irreducible factor.
inline std::vector<QVector> factor_simple_roots(const CartanFactor& f, std::size_t& ambient_dim) {
  const int n = f.rank;
  auto unit_diff = [](std::size_t dim, std::size_t i, std::size_t j) {
    QVector v(dim);
    v[i] = 1;
    v[j] = -1;
    return v;
  };
  std::vector<QVector> s;
  switch (f.family) {
    case 'A':
      ambient_dim = n + 1;
      for (int i = 0; i < n; ++i) s.push_back(unit_diff(ambient_dim, i, i + 1));
      break;
    case 'B':
    case 'C':
    case 'D': {
      ambient_dim = n;
      for (int i = 0; i + 1 < n; ++i) s.push_back(unit_diff(ambient_dim, i, i + 1));
      QVector last(ambient_dim);
      if (f.family == 'B') {
        last[n - 1] = 1;
      } else if (f.family == 'C') {
        last[n - 1] = 2;
      } else {
        last[n - 2] = 1;
        last[n - 1] = 1;
      }
      s.push_back(std::move(last));
      break;
    }
    case 'E': {
      ambient_dim = 8;
      const Rational h(1, 2);
      s.push_back(QVector{h, -h, -h, -h, -h, -h, -h, h});
      QVector a2(8);
      a2[0] = 1;
      a2[1] = 1;
      s.push_back(a2);
      for (int i = 0; i + 2 < n; ++i) s.push_back(unit_diff(8, i + 1, i));
      break;
    }
    case 'F': {
      ambient_dim = 4;
      s.push_back(unit_diff(4, 1, 2));
      s.push_back(unit_diff(4, 2, 3));
      s.push_back(QVector{0, 0, 0, 1});
      const Rational h(1, 2);
      s.push_back(QVector{h, -h, -h, -h});
      break;
    }
    case 'G':
      ambient_dim = 3;
      s.push_back(QVector{1, -1, 0});
      s.push_back(QVector{-2, 1, 1});
      break;
    default:
      throw IllegalType(std::string("unknown family ") + f.family);
  }
  return s;
}

}  // namespace detail

/// Closed-form number of positive roots of one irreducible factor.
inline std::size_t positive_root_count(const CartanFactor& f) {
  const std::size_t n = static_cast<std::size_t>(f.rank);
  switch (f.family) {
    case 'A': return n * (n + 1) / 2;
    case 'B':
    case 'C': return n * n;
    case 'D': return n * (n - 1);
    case 'E': return n == 6 ? 36 : n == 7 ? 63 : 120;
    case 'F': return 24;
    case 'G': return 6;
    default: return 0;
  }
}

inline std::size_t positive_root_count(const CartanType& t) {
  std::size_t c = 0;
  for (const auto& f : t.factors()) c += positive_root_count(f);
  return c;
}

/// Finite root system in its standard ambient realization with exact
/// rational coordinates. Immutable after construction.
class RootSystem {
 public:
  explicit RootSystem(CartanType t) : type_(std::move(t)) { build(); }

  const CartanType& cartan_type() const { return type_; }
  int rank() const { return type_.rank(); }
  std::size_t ambient_dim() const { return ambient_dim_; }
  const std::vector<Root>& simple_roots() const { return simple_; }
  const std::vector<Root>& positive_roots() const { return positive_; }

  /// Inner products (a_i, a_j) of the simple roots.
  const QMatrix& gram() const { return gram_; }
  /// Cartan integers <a_i, a_j^v> = 2 (a_i, a_j) / (a_j, a_j).
  const std::vector<std::vector<std::int64_t>>& cartan_matrix() const { return cartan_; }

  /// Simple-root index range [first, last) of factor k.
  std::pair<int, int> factor_range(std::size_t k) const { return factor_ranges_.at(k); }

  std::optional<std::size_t> positive_index(const SimpleCoords& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Membership in the full root set (both signs).
  bool is_root(const SimpleCoords& c) const {
    if (positive_index(c)) return true;
    SimpleCoords neg(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) neg[i] = -c[i];
    return positive_index(neg).has_value();
  }

  QVector ambient_of(const std::vector<Rational>& simple) const {
    QVector v(ambient_dim_);
    for (std::size_t k = 0; k < simple.size(); ++k)
      if (!simple[k].is_zero()) v = v + simple[k] * simple_[k].ambient;
    return v;
  }

  /// Coordinates on the simple roots of an ambient vector in their span.
  std::optional<QVector> simple_coords_of(const QVector& ambient) const {
    QVector rhs(simple_.size());
    for (std::size_t i = 0; i < simple_.size(); ++i) rhs[i] = dot(simple_[i].ambient, ambient);
    auto c = solve(gram_, rhs);
    if (!c) return std::nullopt;
    if (ambient_of(*c) != ambient) return std::nullopt;
    return c;
  }

  /// Inner product of two vectors given in simple-root coordinates.
  Rational inner(const QVector& x, const QVector& y) const {
    Rational s;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (!y[j].is_zero()) s += x[i] * gram_(i, j) * y[j];
    }
    return s;
  }

 private:
  void build() {
    std::vector<std::vector<QVector>> per_factor;
    std::vector<std::size_t> dims;
    for (const auto& f : type_.factors()) {
      std::size_t d = 0;
      per_factor.push_back(detail::factor_simple_roots(f, d));
      dims.push_back(d);
    }
    ambient_dim_ = std::accumulate(dims.begin(), dims.end(), std::size_t{0});
    const std::size_t n = static_cast<std::size_t>(rank());
    std::size_t offset = 0;
    int idx = 0;
    for (std::size_t k = 0; k < per_factor.size(); ++k) {
      factor_ranges_.push_back({idx, idx + static_cast<int>(per_factor[k].size())});
      for (const auto& local : per_factor[k]) {
        Root r;
        r.ambient.assign(ambient_dim_, Rational{});
        for (std::size_t i = 0; i < local.size(); ++i) r.ambient[offset + i] = local[i];
        r.simple_coords.assign(n, 0);
        r.simple_coords[static_cast<std::size_t>(idx)] = 1;
        simple_.push_back(std::move(r));
        ++idx;
      }
      offset += dims[k];
    }

    gram_ = QMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gram_(i, j) = dot(simple_[i].ambient, simple_[j].ambient);
    cartan_.assign(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational c = Rational(2) * gram_(i, j) / gram_(j, j);
        if (!c.is_integer()) throw PostconditionViolated("non-integral Cartan matrix");
        cartan_[i][j] = c.num();
      }

    // Closure of the simple roots under simple reflections, keeping positive images.
    std::vector<SimpleCoords> found;
    std::map<SimpleCoords, bool> seen;
    for (const auto& s : simple_) {
      found.push_back(s.simple_coords);
      seen[s.simple_coords] = true;
    }
    for (std::size_t head = 0; head < found.size(); ++head) {
      for (std::size_t i = 0; i < n; ++i) {
        const SimpleCoords beta = found[head];
        std::int64_t pairing = 0;  // <beta, a_i^v>
        for (std::size_t k = 0; k < n; ++k) pairing += beta[k] * cartan_[k][i];
        if (pairing == 0) continue;
        SimpleCoords img = beta;
        img[i] -= pairing;
        bool positive = std::all_of(img.begin(), img.end(), [](auto x) { return x >= 0; });
        if (!positive || seen.count(img)) continue;
        seen[img] = true;
        found.push_back(std::move(img));
      }
    }
    std::sort(found.begin(), found.end(), canonical_less);
    for (auto& c : found) {
      Root r;
      std::vector<Rational> rc(c.begin(), c.end());
      r.ambient = ambient_of(rc);
      r.simple_coords = std::move(c);
      index_[r.simple_coords] = positive_.size();
      positive_.push_back(std::move(r));
    }
  }

  CartanType type_;
  std::size_t ambient_dim_ = 0;
  std::vector<Root> simple_;
  std::vector<Root> positive_;
  std::vector<std::pair<int, int>> factor_ranges_;
  QMatrix gram_;
  std::vector<std::vector<std::int64_t>> cartan_;
  std::map<SimpleCoords, std::size_t> index_;
};

inline RootSystem enumerate_positive_roots(const CartanType& t) { return RootSystem(t); }

/// alpha <= beta in the dominance order: beta - alpha is a non-negative
/// combination of simple roots.
inline bool dominance_leq(const Root& alpha, const Root& beta, const RootSystem& r) {
  if (!r.positive_index(alpha.simple_coords) || !r.positive_index(beta.simple_coords))
    throw RootNotInSystem("dominance_leq expects positive roots of " + r.cartan_type().name());
  for (std::size_t k = 0; k < alpha.simple_coords.size(); ++k)
    if (beta.simple_coords[k] - alpha.simple_coords[k] < 0) return false;
  return true;
}

/// Linearly independent, and no pairwise sum is a root.
inline bool is_sum_free_independent(const std::vector<Root>& roots, const RootSystem& r) {
  std::vector<QVector> amb;
  for (const auto& a : roots) amb.push_back(a.ambient);
  if (rank_of(amb) != roots.size()) return false;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      SimpleCoords sum(roots[i].simple_coords.size());
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = roots[i].simple_coords[k] + roots[j].simple_coords[k];
      if (r.is_root(sum)) return false;
    }
  return true;
}

/// Greedy choice of rank-many positive roots: repeatedly take the largest
/// root (dominance-maximal, ties broken by the canonical order) outside the
/// span of those already chosen. Factors of a reducible type are processed
/// independently and concatenated.
inline std::vector<Root> select_strongly_commuting_roots(const RootSystem& r) {
  std::vector<Root> result;
  const auto& pos = r.positive_roots();
  for (std::size_t k = 0; k < r.cartan_type().factors().size(); ++k) {
    auto [first, last] = r.factor_range(k);
    auto in_factor = [&, first = first, last = last](const Root& a) {
      for (int i = 0; i < static_cast<int>(a.simple_coords.size()); ++i)
        if ((i < first || i >= last) && a.simple_coords[static_cast<std::size_t>(i)] != 0) return false;
      return true;
    };
    std::vector<QVector> span;
    for (int step = first; step < last; ++step) {
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < pos.size(); ++i)
        if (in_factor(pos[i]) && !in_span(span, pos[i].ambient)) candidates.push_back(i);
      std::optional<std::size_t> pick;
      for (std::size_t c : candidates) {
        bool maximal = true;
        for (std::size_t o : candidates)
          if (o != c && dominance_leq(pos[c], pos[o], r)) {
            maximal = false;
            break;
          }
        // candidates are in canonical order, so the last maximal one wins ties
        if (maximal) pick = c;
      }
      if (!pick) throw PostconditionViolated("no candidate root outside the current span");
      span.push_back(pos[*pick].ambient);
      result.push_back(pos[*pick]);
    }
  }
  if (result.size() != static_cast<std::size_t>(r.rank()) || !is_sum_free_independent(result, r))
    throw PostconditionViolated("greedy selection for " + r.cartan_type().name() + " is not sum-free independent");
  return result;
}

}  // namespace qiembed
