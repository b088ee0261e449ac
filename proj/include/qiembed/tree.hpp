#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qiembed/errors.hpp"
#include "qiembed/rational.hpp"

namespace qiembed {

/// Vertex of the q-regular tree T_q: a word over {0, ..., q-1} (stored as
/// the characters '0' + letter) with no two consecutive letters equal. The
/// empty word is the root.
struct TreeVertex {
  std::string address;

  std::size_t length() const { return address.size(); }
  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
  friend auto operator<=>(const TreeVertex& a, const TreeVertex& b) {
    if (a.address.size() != b.address.size()) return a.address.size() <=> b.address.size();
    return a.address <=> b.address;
  }
};

inline void validate_address(const std::string& w, int q) {
  if (q < 2 || q > 10) throw InvalidAddress("tree valence must be in [2, 10]");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < '0' || w[i] >= '0' + q) throw InvalidAddress("letter out of range in '" + w + "'");
    if (i > 0 && w[i] == w[i - 1]) throw InvalidAddress("repeated letter in '" + w + "'");
  }
}

inline TreeVertex make_vertex(const std::string& w, int q) {
  validate_address(w, q);
  return {w};
}

/// Eventually periodic end of T_q: prefix followed by period repeated forever.
class TreeEnd {
 public:
  TreeEnd() = default;
  TreeEnd(std::string prefix, std::string period, int q) : prefix_(std::move(prefix)), period_(std::move(period)) {
    if (period_.empty()) throw InvalidAddress("end period must be nonempty");
    validate_address(prefix_ + period_ + period_, q);
  }

  char at(std::size_t k) const {
    return k < prefix_.size() ? prefix_[k] : period_[(k - prefix_.size()) % period_.size()];
  }
  std::string head(std::size_t n) const {
    std::string s(n, '0');
    for (std::size_t k = 0; k < n; ++k) s[k] = at(k);
    return s;
  }
  const std::string& prefix() const { return prefix_; }
  const std::string& period() const { return period_; }

  /// Number of leading letters after which two ends agreeing so far agree forever.
  std::size_t agreement_bound(const TreeEnd& o) const {
    return std::max(prefix_.size(), o.prefix_.size()) + std::lcm(period_.size(), o.period_.size());
  }

 private:
  std::string prefix_, period_;
};

/// Longest common prefix of two ends; nullopt when the ends are equal.
inline std::optional<std::size_t> lcp(const TreeEnd& a, const TreeEnd& b) {
  const std::size_t bound = a.agreement_bound(b);
  for (std::size_t k = 0; k < bound; ++k)
    if (a.at(k) != b.at(k)) return k;
  return std::nullopt;
}

inline bool same_end(const TreeEnd& a, const TreeEnd& b) { return !lcp(a, b).has_value(); }

inline std::size_t lcp(const TreeVertex& x, const TreeEnd& e) {
  std::size_t k = 0;
  while (k < x.length() && x.address[k] == e.at(k)) ++k;
  return k;
}

inline std::size_t lcp(const TreeVertex& x, const TreeVertex& y) {
  std::size_t k = 0;
  while (k < x.length() && k < y.length() && x.address[k] == y.address[k]) ++k;
  return k;
}

inline std::int64_t tree_distance(const TreeVertex& u, const TreeVertex& v) {
  return static_cast<std::int64_t>(u.length() + v.length() - 2 * lcp(u, v));
}

/// b(x) = lim d(ray_base(t), x) - t for the ray from base to eta.
inline std::int64_t busemann(const TreeVertex& x, const TreeEnd& eta, const TreeVertex& base = {}) {
  auto part = [&](const TreeVertex& v) {
    return static_cast<std::int64_t>(v.length()) - 2 * static_cast<std::int64_t>(lcp(v, eta));
  };
  return part(x) - part(base);
}

/// First common vertex of the rays [x, eta) and [y, eta).
inline TreeVertex branching_point(const TreeVertex& x, const TreeVertex& y, const TreeEnd& eta) {
  const std::size_t kx = lcp(x, eta), ky = lcp(y, eta), kxy = lcp(x, y);
  if (kxy >= std::max(kx, ky)) return {x.address.substr(0, kxy)};
  return {eta.head(std::max(kx, ky))};
}

/// One step along [x, eta).
inline TreeVertex step_toward(const TreeVertex& x, const TreeEnd& eta) {
  if (lcp(x, eta) == x.length()) return {x.address + eta.at(x.length())};
  return {x.address.substr(0, x.length() - 1)};
}

inline std::vector<TreeVertex> tree_neighbors(const TreeVertex& x, int q) {
  std::vector<TreeVertex> out;
  if (x.length() > 0) out.push_back({x.address.substr(0, x.length() - 1)});
  for (int c = 0; c < q; ++c) {
    const char ch = static_cast<char>('0' + c);
    if (x.length() > 0 && x.address.back() == ch) continue;
    out.push_back({x.address + ch});
  }
  return out;
}

/// All vertices within distance r of the root, sorted by length then lexicographically.
inline std::vector<TreeVertex> tree_ball(int q, int r) {
  std::vector<TreeVertex> out{{}};
  for (std::size_t head = 0; head < out.size(); ++head) {
    if (static_cast<int>(out[head].length()) >= r) continue;
    for (auto& nb : tree_neighbors(out[head], q))
      if (nb.length() > out[head].length()) out.push_back(std::move(nb));
  }
  return out;
}

/// Bi-infinite geodesic between two distinct ends.
struct TreeLine {
  TreeEnd plus, minus;

  bool contains(const TreeVertex& x) const {
    const auto split = lcp(plus, minus);
    if (!split) throw InvalidAddress("line ends coincide");
    if (x.length() < *split) return false;
    return lcp(x, plus) == x.length() || lcp(x, minus) == x.length();
  }
};

/// The standard line of T_q through the root, with ends (01)^oo and (10)^oo.
inline TreeLine standard_line(int q) { return {TreeEnd("", "01", q), TreeEnd("", "10", q)}; }

/// Apartment of a product of trees: one line per factor.
struct ApartmentT {
  std::vector<TreeLine> lines;
};

inline ApartmentT standard_apartment(int q, int n) {
  return {std::vector<TreeLine>(static_cast<std::size_t>(n), standard_line(q))};
}

using ProductPointT = std::vector<TreeVertex>;

inline std::int64_t l1_distance(const ProductPointT& x, const ProductPointT& y) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += tree_distance(x[i], y[i]);
  return d;
}

/// Squared CAT(0) (L2) product distance, exact.
inline std::int64_t l2_distance_squared(const ProductPointT& x, const ProductPointT& y) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto t = tree_distance(x[i], y[i]);
    d += t * t;
  }
  return d;
}

inline double l2_distance(const ProductPointT& x, const ProductPointT& y) {
  return std::sqrt(static_cast<double>(l2_distance_squared(x, y)));
}

/// pi_i in the product case: the cross section of s_i is the i-th factor.
inline TreeVertex projection_pi(std::size_t i, const ProductPointT& x) { return x.at(i); }

/// Ray-following version of pi_i: walk [x, eta_i), where eta_i moves factor
/// j toward the plus (minus) end of the apartment's line when its weight is
/// positive (negative) and leaves weight-zero factors fixed, until the point
/// lies in the parallel set of s_i (every moving factor on its line). The
/// flat reached is named by its coordinate in the factors eta_i fixes.
inline TreeVertex projection_pi_oracle(std::size_t i, const ProductPointT& x, const std::vector<Rational>& eta_i,
                                       const ApartmentT& f) {
  ProductPointT p = x;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (eta_i[j].is_zero() != (j == i)) throw PostconditionViolated("eta_i must fix exactly factor i");
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == i) continue;
    const TreeEnd& end = eta_i[j].sign() > 0 ? f.lines[j].plus : f.lines[j].minus;
    std::size_t guard = 0;
    while (!f.lines[j].contains(p[j])) {
      p[j] = step_toward(p[j], end);
      if (++guard > 4 * (x[j].length() + f.lines[j].plus.agreement_bound(f.lines[j].minus)) + 8)
        throw PostconditionViolated("ray did not enter the parallel set");
    }
  }
  return p[i];
}

}  // namespace qiembed
