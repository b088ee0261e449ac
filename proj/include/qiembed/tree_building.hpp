#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qiembed/coxeter.hpp"
#include "qiembed/report.hpp"
#include "qiembed/tree.hpp"

namespace qiembed {

namespace detail {

inline std::string join_address(const ProductPointT& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + (x[i].address.empty() ? std::string("e") : x[i].address);
  return s + ")";
}

/// Vertices of the line within distance r of the root.
inline std::vector<TreeVertex> line_window(const TreeLine& l, int r) {
  std::vector<TreeVertex> out;
  const std::size_t split = *lcp(l.plus, l.minus);
  for (const TreeEnd* e : {&l.minus, &l.plus})
    for (std::size_t len = split; len <= static_cast<std::size_t>(r); ++len) {
      TreeVertex v{e->head(len)};
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  std::sort(out.begin(), out.end());
  return out;
}

template <class F>
void for_each_product(const std::vector<std::vector<TreeVertex>>& factors, F&& f) {
  ProductPointT x(factors.size());
  std::vector<std::size_t> idx(factors.size(), 0);
  for (const auto& fs : factors)
    if (fs.empty()) return;
  for (;;) {
    for (std::size_t j = 0; j < factors.size(); ++j) x[j] = factors[j][idx[j]];
    f(x);
    std::size_t j = 0;
    while (j < factors.size() && ++idx[j] == factors[j].size()) idx[j++] = 0;
    if (j == factors.size()) return;
  }
}

}  // namespace detail

/// The A1^n configuration from the Coxeter module: theta_i and eta_i.
struct ProductConfig {
  int n = 0;
  MaxDistConfig config;
  std::vector<double> theta;
};

inline ProductConfig product_config(int n) {
  std::string type = "A1";
  for (int i = 1; i < n; ++i) type += "xA1";
  RootSystem r(CartanType::parse(type));
  ProductConfig pc;
  pc.n = n;
  pc.config = find_maximally_distributed(r, generate_weyl_group(r));
  pc.theta = theta_angles(pc.config, r);
  return pc;
}

/// pi_i against the ray-following oracle on every point of the product of
/// radius-r balls, the 1-Lipschitz property over all product edges inside
/// the window, and injectivity of (pi_1, ..., pi_n).
inline VerificationReport check_projections(int q, int n, int radius) {
  auto t0 = std::chrono::steady_clock::now();
  const auto pc = product_config(n);
  const auto f = standard_apartment(q, n);
  const auto ball = tree_ball(q, radius);
  std::vector<std::vector<TreeVertex>> factors(static_cast<std::size_t>(n), ball);

  VerificationReport rep;
  rep.check_name = "trees.projection";
  rep.parameters.set("q", q).set("n", n).set("radius", radius);
  std::int64_t points = 0, edges = 0, mismatches = 0, lipschitz_violations = 0;
  std::int64_t max_step = 0;
  std::map<ProductPointT, ProductPointT> image;
  bool injective = true;
  detail::for_each_product(factors, [&](const ProductPointT& x) {
    ++points;
    ProductPointT pi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      pi[i] = projection_pi(i, x);
      auto oracle = projection_pi_oracle(i, x, pc.config.etas[i], f);
      if (oracle != pi[i]) {
        ++mismatches;
        if (rep.witnesses.size() < 8)
          rep.witnesses.push_back(Record{{"label", std::string("oracle_mismatch")},
                                         {"x", detail::join_address(x)},
                                         {"i", static_cast<std::int64_t>(i)}});
      }
    }
    if (!image.emplace(pi, x).second) injective = false;
    for (std::size_t j = 0; j < x.size(); ++j)
      for (const auto& nb : tree_neighbors(x[j], q)) {
        if (static_cast<int>(nb.length()) > radius) continue;
        ProductPointT y = x;
        y[j] = nb;
        ++edges;
        for (std::size_t i = 0; i < x.size(); ++i) {
          auto d = tree_distance(projection_pi(i, x), projection_pi(i, y));
          max_step = std::max(max_step, d);
          if (d > 1) ++lipschitz_violations;
        }
      }
  });
  rep.constants.set("points", points).set("edges_checked", edges).set("oracle_mismatches", mismatches);
  rep.constants.set("lipschitz_violations", lipschitz_violations).set("max_projection_step", max_step);
  rep.constants.set("injective", injective);
  rep.pass = mismatches == 0 && lipschitz_violations == 0 && injective;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Step-1 constant on a window of the standard apartment F0: with
/// alpha = max_i 1/sin(theta_i), d_X(x, y) <= alpha sum_i d_i(pi_i x, pi_i y)
/// for the L1 metric over all pairs, with equality for moves in a single
/// coordinate. The value 1/tan(theta_i) is reported alongside.
inline VerificationReport step1_constant_check(int q, int n, int radius) {
  auto t0 = std::chrono::steady_clock::now();
  const auto pc = product_config(n);
  const auto f = standard_apartment(q, n);
  double alpha = 0.0, alpha_tan = 0.0;
  for (double th : pc.theta) {
    alpha = std::max(alpha, 1.0 / std::sin(th));
    alpha_tan = std::max(alpha_tan, std::cos(th) / std::sin(th));
  }
  std::vector<std::vector<TreeVertex>> factors;
  for (const auto& l : f.lines) factors.push_back(detail::line_window(l, radius));
  std::vector<ProductPointT> pts;
  detail::for_each_product(factors, [&](const ProductPointT& x) { pts.push_back(x); });

  VerificationReport rep;
  rep.check_name = "trees.step1_constant";
  rep.parameters.set("q", q).set("n", n).set("radius", radius);
  std::int64_t pairs = 0, violations = 0, single_moves = 0, single_move_failures = 0;
  double max_ratio_l1 = 0.0, max_ratio_l2 = 0.0;
  ProductPointT wx, wy;
  for (const auto& x : pts)
    for (const auto& y : pts) {
      if (x == y) continue;
      ++pairs;
      std::int64_t sum = 0, changed = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto d = tree_distance(projection_pi(i, x), projection_pi(i, y));
        sum += d;
        changed += d != 0;
      }
      const double l1 = static_cast<double>(l1_distance(x, y));
      const double ratio = l1 / static_cast<double>(sum);
      if (ratio > max_ratio_l1) max_ratio_l1 = ratio, wx = x, wy = y;
      max_ratio_l2 = std::max(max_ratio_l2, l2_distance(x, y) / static_cast<double>(sum));
      if (l1 > alpha * static_cast<double>(sum) * (1.0 + 1e-12)) ++violations;
      if (changed == 1) {
        ++single_moves;
        if (l1_distance(x, y) != sum || l2_distance_squared(x, y) != sum * sum) ++single_move_failures;
      }
    }
  rep.constants.set("alpha", alpha).set("alpha_one_over_tan", alpha_tan).set("max_ratio_l1", max_ratio_l1);
  rep.constants.set("max_ratio_l2", max_ratio_l2).set("pairs", pairs).set("violations", violations);
  rep.constants.set("single_coordinate_pairs", single_moves).set("single_coordinate_failures", single_move_failures);
  if (!wx.empty())
    rep.witnesses.push_back(Record{{"label", std::string("witness_max_ratio")},
                                   {"x", detail::join_address(wx)},
                                   {"y", detail::join_address(wy)},
                                   {"ratio", max_ratio_l1}});
  rep.pass = violations == 0 && single_move_failures == 0;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Outcome of one branching-lemma evaluation for a strongly asymptotic pair.
struct BranchingMeasure {
  std::vector<std::int64_t> D;  // per-factor distance to the factor branching vertex
  Rational tick;                // max_j D_j / k_j: ray parameter of the product branching point
  std::int64_t d2 = 0;          // d_X(x, y)^2 = 4 sum D_j^2
};

/// Rays [x, eta) and [y, eta) for eta with integer speeds k toward the plus
/// ends. Throws NotAsymptotic unless every factor Busemann value agrees.
inline BranchingMeasure branching_measure(const ProductPointT& x, const ProductPointT& y,
                                          const std::vector<std::int64_t>& k, const std::vector<TreeEnd>& ends) {
  BranchingMeasure m;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (busemann(x[j], ends[j]) != busemann(y[j], ends[j]))
      throw NotAsymptotic("factor " + std::to_string(j) + " Busemann values differ");
    auto z = branching_point(x[j], y[j], ends[j]);
    const auto dx = tree_distance(x[j], z), dy = tree_distance(y[j], z);
    if (dx != dy) throw PostconditionViolated("branching vertex not equidistant");
    m.D.push_back(dx);
    m.tick = std::max(m.tick, Rational(dx, k[j]));
    m.d2 += 4 * dx * dx;
  }
  return m;
}

inline double speed_norm(const std::vector<std::int64_t>& k) {
  double s = 0.0;
  for (auto v : k) s += static_cast<double>(v * v);
  return std::sqrt(s);
}

/// beta = 1 / sqrt(2 (1 - cos theta)), theta = 2 d_T(eta, boundary of the
/// chamber); for eta = k / |k| in the positive orthant this is |k| / (2 k_min).
inline double branching_beta(const std::vector<std::int64_t>& k) {
  const double kmin = static_cast<double>(*std::min_element(k.begin(), k.end()));
  const double theta = 2.0 * std::asin(kmin / speed_norm(k));
  return 1.0 / std::sqrt(2.0 * (1.0 - std::cos(theta)));
}

/// Exhaustive branching lemma over all strongly asymptotic pairs in the
/// product of radius-r balls: d_X(x, z) <= beta d_X(x, y), checked exactly
/// as tick^2 k_min^2 <= sum D_j^2.
inline VerificationReport branching_bound_check(int q, int n, int radius, const std::vector<std::int64_t>& k) {
  auto t0 = std::chrono::steady_clock::now();
  if (k.size() != static_cast<std::size_t>(n)) throw WrongCardinality("speed vector length must equal n");
  for (auto v : k)
    if (v <= 0) throw ConfigError("eta must be interior to the chamber (positive speeds)");
  const auto f = standard_apartment(q, n);
  std::vector<TreeEnd> ends;
  for (const auto& l : f.lines) ends.push_back(l.plus);
  const auto ball = tree_ball(q, radius);
  // per factor: vertices grouped by Busemann value
  std::map<std::int64_t, std::vector<TreeVertex>> groups;
  for (const auto& v : ball) groups[busemann(v, ends[0])].push_back(v);

  const double norm = speed_norm(k), beta = branching_beta(k);
  const std::int64_t kmin = *std::min_element(k.begin(), k.end());
  VerificationReport rep;
  rep.check_name = "trees.branching_bound";
  std::string ks;
  for (auto v : k) ks += (ks.empty() ? "" : ",") + std::to_string(v);
  rep.parameters.set("q", q).set("n", n).set("radius", radius).set("speeds", ks);
  std::int64_t pairs = 0, violations = 0;
  double max_ratio = 0.0;
  ProductPointT wx, wy;

  // enumerate x, y factor by factor inside equal-Busemann groups
  std::vector<std::pair<TreeVertex, TreeVertex>> factor_pairs;
  for (const auto& [b, vs] : groups)
    for (const auto& a : vs)
      for (const auto& c : vs) factor_pairs.push_back({a, c});
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  ProductPointT x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (;;) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      x[j] = factor_pairs[idx[j]].first;
      y[j] = factor_pairs[idx[j]].second;
    }
    ++pairs;
    auto m = branching_measure(x, y, k, ends);
    std::int64_t sum = 0;
    for (auto d : m.D) sum += d * d;
    if (m.tick * m.tick * Rational(kmin * kmin) > Rational(sum)) {
      ++violations;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back(Record{{"label", std::string("violation")},
                                       {"x", detail::join_address(x)},
                                       {"y", detail::join_address(y)}});
    }
    if (sum > 0) {
      const double ratio = norm * m.tick.to_double() / std::sqrt(static_cast<double>(m.d2));
      if (ratio > max_ratio) max_ratio = ratio, wx = x, wy = y;
    }
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == factor_pairs.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  rep.constants.set("beta", beta).set("max_ratio", max_ratio).set("pairs", pairs).set("violations", violations);
  if (!wx.empty())
    rep.witnesses.push_back(Record{{"label", std::string("witness_max_ratio")},
                                   {"x", detail::join_address(wx)},
                                   {"y", detail::join_address(wy)},
                                   {"ratio", max_ratio}});
  rep.pass = violations == 0 && max_ratio <= beta * (1.0 + 1e-12);
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// Paths in a union of two apartments sharing a chamber at infinity.

/// Two lines of one factor sharing their plus end; points are named by the
/// Busemann coordinate beta toward that end (root as base). For beta at or
/// below `branch` the lines coincide.
struct SharedLinePair {
  std::optional<Rational> branch;  // nullopt: identical lines

  Rational distance(int line_a, const Rational& a, int line_b, const Rational& b) const {
    if (line_a == line_b || !branch || a <= *branch || b <= *branch) return abs(a - b);
    return a + b - Rational(2) * *branch;
  }
};

/// Busemann value (toward `plus`, root base) at which two lines with a
/// common plus end separate.
inline std::optional<Rational> line_branch(const TreeLine& l1, const TreeLine& l2) {
  if (!same_end(l1.plus, l2.plus)) throw NoSharedChamber("lines do not share the chamber end");
  if (same_end(l1.minus, l2.minus)) return std::nullopt;
  // first common vertex of the rays from the two minus ends toward plus
  const std::size_t k1 = *lcp(l1.minus, l1.plus), k2 = *lcp(l2.minus, l2.plus);
  const std::size_t k12 = *lcp(l1.minus, l2.minus);
  TreeVertex c = k12 >= std::max(k1, k2) ? TreeVertex{l1.minus.head(k12)} : TreeVertex{l1.plus.head(std::max(k1, k2))};
  return Rational(busemann(c, l1.plus));
}

struct FlatPath {
  std::vector<std::vector<Rational>> points;  // Busemann coordinates of x, x', z, y1, y
  std::vector<int> flats;                     // 1 or 2: which apartment each point is taken in
  bool asymptotic = false;                    // case 1: y1 = y
  double length = 0.0;
  double distance = 0.0;  // d_X(x, y)
  double lemma_ratio = 0.0;  // d(x', z) / d(x', y1), zero if x' = y1
};

/// The path x -> x' -> z -> y1 -> y through F_x cup F_y (x' on [x, eta)
/// at the Busemann level of y, y1 in F_y on the ray class of x, z the
/// branching point). Coordinates are Busemann values per factor; the
/// ordering b(x) >= b(y) is enforced by swapping.
inline FlatPath union_of_flats_path(const std::vector<SharedLinePair>& pairs, std::vector<Rational> bx, int fx,
                                    std::vector<Rational> by, int fy, const std::vector<std::int64_t>& k) {
  const std::size_t n = pairs.size();
  auto B = [&](const std::vector<Rational>& b) {
    Rational s;
    for (std::size_t j = 0; j < n; ++j) s += Rational(k[j]) * b[j];
    return s;
  };
  auto flat_distance = [&](const std::vector<Rational>& a, int fa, const std::vector<Rational>& b, int fb) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = pairs[j].distance(fa, a[j], fb, b[j]).to_double();
      s += d * d;
    }
    return std::sqrt(s);
  };
  if (B(bx) < B(by)) {
    std::swap(bx, by);
    std::swap(fx, fy);
  }
  Rational k2;
  for (auto v : k) k2 += Rational(v * v);
  const double norm = std::sqrt(k2.to_double());
  const Rational s = (B(bx) - B(by)) / k2;  // ray parameter from x to x'
  std::vector<Rational> xp(n);
  for (std::size_t j = 0; j < n; ++j) xp[j] = bx[j] - s * Rational(k[j]);
  // y1: the point of F_y with the coordinates of x'; z: where the rays from x' and y1 merge
  const std::vector<Rational>& y1 = xp;
  Rational tick;
  for (std::size_t j = 0; j < n; ++j) {
    Rational d = pairs[j].distance(fx, xp[j], fy, y1[j]) / Rational(2);
    tick = std::max(tick, d / Rational(k[j]));
  }
  std::vector<Rational> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = xp[j] - tick * Rational(k[j]);

  FlatPath p;
  p.points = {bx, xp, z, y1, by};
  p.flats = {fx, fx, fx, fy, fy};
  p.asymptotic = flat_distance(y1, fy, by, fy) == 0.0;
  p.distance = flat_distance(bx, fx, by, fy);
  const double d_xp_y1 = flat_distance(xp, fx, y1, fy);
  p.length = norm * (s + tick + tick).to_double() + flat_distance(y1, fy, by, fy);
  p.lemma_ratio = d_xp_y1 > 0.0 ? norm * tick.to_double() / d_xp_y1 : 0.0;
  return p;
}

/// All apartments F2 sharing the chamber end of the standard apartment in
/// every factor and separating from it at a vertex within radius r; for
/// each, every pair x in F1, y in F2 with factor coordinates in the radius-r
/// window. Asserts length <= (2 beta + 2) d_X(x, y) and the branching lemma
/// at x'.
inline VerificationReport union_of_flats_check(int q, int n, int radius, const std::vector<std::int64_t>& k) {
  auto t0 = std::chrono::steady_clock::now();
  if (k.size() != static_cast<std::size_t>(n)) throw WrongCardinality("speed vector length must equal n");
  const TreeLine base = standard_line(q);
  // alternative lines: leave the standard line at vertex c by an off-line letter
  std::vector<TreeLine> alternatives{base};
  for (const auto& c : detail::line_window(base, radius - 1)) {
    for (int a = 0; a < q; ++a) {
      const char ch = static_cast<char>('0' + a);
      TreeVertex nb{c.address + ch};
      if (!c.address.empty() && c.address.back() == ch) continue;
      if (base.contains(nb)) continue;
      std::string tail;
      for (int b = 0; b < q && tail.size() < 2; ++b)
        if (static_cast<char>('0' + b) != ch || !tail.empty()) tail += static_cast<char>('0' + b);
      if (tail[0] == ch) std::swap(tail[0], tail[1]);
      alternatives.push_back({base.plus, TreeEnd(nb.address, tail, q)});
      break;  // one off-line branch per vertex suffices up to symmetry
    }
  }
  const double beta = branching_beta(k), lambda = 2.0 * beta + 2.0;
  VerificationReport rep;
  rep.check_name = "trees.union_of_flats";
  std::string ks;
  for (auto v : k) ks += (ks.empty() ? "" : ",") + std::to_string(v);
  rep.parameters.set("q", q).set("n", n).set("radius", radius).set("speeds", ks);
  std::int64_t configs = 0, paths = 0, violations = 0, lemma_violations = 0, asymptotic = 0;
  double max_ratio = 0.0, max_lemma = 0.0;
  Record worst;

  std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
  for (;;) {
    ++configs;
    std::vector<SharedLinePair> pairs;
    std::vector<std::vector<TreeVertex>> wx, wy;
    for (std::size_t j = 0; j < choice.size(); ++j) {
      const TreeLine& l2 = alternatives[choice[j]];
      pairs.push_back({line_branch(base, l2)});
      wx.push_back(detail::line_window(base, radius));
      wy.push_back(detail::line_window(l2, radius));
    }
    std::vector<std::vector<Rational>> xs, ys;
    detail::for_each_product(wx, [&](const ProductPointT& x) {
      std::vector<Rational> b;
      for (const auto& v : x) b.push_back(Rational(busemann(v, base.plus)));
      xs.push_back(std::move(b));
    });
    detail::for_each_product(wy, [&](const ProductPointT& y) {
      std::vector<Rational> b;
      for (const auto& v : y) b.push_back(Rational(busemann(v, base.plus)));
      ys.push_back(std::move(b));
    });
    for (const auto& x : xs)
      for (const auto& y : ys) {
        ++paths;
        auto p = union_of_flats_path(pairs, x, 1, y, 2, k);
        asymptotic += p.asymptotic;
        auto describe = [&](const char* label) {
          Record w{{"label", std::string(label)}};
          for (std::size_t j = 0; j < choice.size(); ++j) {
            const std::string sj = std::to_string(j + 1);
            w.set("x" + sj + "_busemann", p.points.front()[j]);
            w.set("y" + sj + "_busemann", p.points.back()[j]);
            w.set("branch" + sj, pairs[j].branch ? pairs[j].branch->str() : std::string("none"));
          }
          w.set("x_flat", static_cast<std::int64_t>(p.flats.front()));
          w.set("length", p.length).set("distance", p.distance).set("ratio", p.length / p.distance);
          return w;
        };
        if (p.length > lambda * p.distance * (1.0 + 1e-9) + 1e-9) {
          ++violations;
          if (rep.witnesses.size() < 4) rep.witnesses.push_back(describe("violation"));
        }
        if (p.lemma_ratio > beta * (1.0 + 1e-9)) ++lemma_violations;
        max_lemma = std::max(max_lemma, p.lemma_ratio);
        if (p.distance > 0.0 && p.length / p.distance > max_ratio) {
          max_ratio = p.length / p.distance;
          worst = describe("witness_max_ratio");
        }
      }
    std::size_t j = 0;
    while (j < choice.size() && ++choice[j] == alternatives.size()) choice[j++] = 0;
    if (j == choice.size()) break;
  }
  rep.constants.set("beta", beta).set("lambda", lambda).set("max_ratio", max_ratio);
  rep.constants.set("max_branching_ratio", max_lemma).set("apartment_pairs", configs).set("paths", paths);
  rep.constants.set("asymptotic_paths", asymptotic).set("violations", violations);
  rep.constants.set("branching_violations", lemma_violations);
  if (!worst.empty()) rep.witnesses.push_back(worst);
  rep.pass = violations == 0 && lemma_violations == 0;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// All tree checks for the CLI: projections, Step-1 constant, branching
/// bound and union-of-flats paths for the diagonal direction and for one
/// closer to a wall.
inline std::vector<VerificationReport> verify_trees(int q, int n, int radius) {
  std::vector<std::int64_t> diag(static_cast<std::size_t>(n), 1), skew(static_cast<std::size_t>(n), 1);
  for (std::size_t j = 0; j < skew.size(); ++j) skew[j] = static_cast<std::int64_t>(j) + 1;
  std::vector<VerificationReport> out;
  out.push_back(check_projections(q, n, radius));
  out.push_back(step1_constant_check(q, n, radius));
  out.push_back(branching_bound_check(q, n, radius, diag));
  if (n > 1) out.push_back(branching_bound_check(q, n, radius, skew));
  out.push_back(union_of_flats_check(q, n, radius, diag));
  if (n > 1) out.push_back(union_of_flats_check(q, n, radius, skew));
  return out;
}

}  // namespace qiembed
