#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qiembed/coxeter.hpp"
#include "qiembed/lattice.hpp"
#include "qiembed/parallel.hpp"
#include "qiembed/report.hpp"

namespace qiembed {

/// BFS ball of the SL3(Q_p) building around [Z_p^3].
struct BuildingBall {
  int p = 2;
  int radius = 0;
  std::vector<LatticeClass> vertices;            // BFS order, center first
  std::vector<int> depth;                        // graph distance from the center
  std::vector<std::vector<std::size_t>> adjacency;  // within the ball, sorted
  std::vector<bool> in_x_delta;                  // empty until marked
  std::map<LatticeClass, std::size_t> index;

  const LatticeClass& center() const { return vertices.front(); }
  std::size_t size() const { return vertices.size(); }
  std::optional<std::size_t> find(const LatticeClass& l) const {
    auto it = index.find(l);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& a : adjacency) e += a.size();
    return e / 2;
  }
};

inline BuildingBall build_ball(int p, int radius) {
  if (p != 2 && p != 3) throw ConfigError("p must be 2 or 3");
  if (radius < 0) throw ConfigError("radius must be nonnegative");
  if (radius > 4) throw RadiusTooLarge("building balls are limited to radius 4");
  BuildingBall b;
  b.p = p;
  b.radius = radius;
  QMatrix id = QMatrix::identity(3);
  b.vertices.push_back(canonicalize(id, p));
  b.depth.push_back(0);
  b.index[b.vertices.front()] = 0;
  std::vector<std::vector<LatticeClass>> nbs;
  for (std::size_t head = 0; head < b.vertices.size(); ++head) {
    nbs.push_back(neighbors(b.vertices[head]));
    if (b.depth[head] == radius) continue;
    for (const auto& n : nbs.back())
      if (b.index.emplace(n, b.vertices.size()).second) {
        b.vertices.push_back(n);
        b.depth.push_back(b.depth[head] + 1);
      }
  }
  b.adjacency.resize(b.vertices.size());
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    for (const auto& n : nbs[i])
      if (auto j = b.find(n)) b.adjacency[i].push_back(*j);
    std::sort(b.adjacency[i].begin(), b.adjacency[i].end());
    b.adjacency[i].erase(std::unique(b.adjacency[i].begin(), b.adjacency[i].end()), b.adjacency[i].end());
  }
  return b;
}

/// Line D_i killed by the quotient that defines pi_i: D_1 = span(e2), D_2 = span(e1).
inline std::size_t quotient_coordinate(int i) {
  if (i == 1) return 1;
  if (i == 2) return 0;
  throw ConfigError("projection index must be 1 or 2");
}

/// pi_i by the quotient formula: the class of the image of L in Q_p^3 / D_i.
inline LatticeClass2 projection_pi(int i, const LatticeClass& l) {
  return LatticeClass2::from_generators(drop_coordinate(l.columns(), quotient_coordinate(i)), l.p);
}

/// L = (L cap e_d) + (L cap W_d), W_d the complementary coordinate plane.
inline bool splits_along(const std::vector<QVector>& cols, std::size_t d, int p) {
  return lattice_form(drop_coordinate(cols, d), 2, p) == lattice_form(intersect_hyperplane(cols, d, p), 2, p);
}

struct RayProjection {
  LatticeClass2 value;
  int steps = 0;
};

/// pi_i by following [L, eta_i): L_k = L + p^{-k}(L cap D_i) until L_k lies
/// in the parallel set of s_i, i.e. splits as (L_k cap D_i) + (L_k cap W);
/// the flat reached is named by the class of L_k cap W.
inline RayProjection projection_pi_ray(int i, const LatticeClass& l) {
  const std::size_t d = quotient_coordinate(i);
  const int p = l.p;
  auto cols = l.columns();
  QVector ed(3);
  ed[d] = 1;
  const QVector u = *inverse(l.basis()) * ed;
  int m = kInfiniteValuation;
  for (const auto& x : u) m = std::min(m, vp(x, p));
  m = -m;  // L cap D = p^m Z_p e_d
  for (int k = 0; k <= 64; ++k) {
    auto gens = cols;
    gens.push_back(ppow(p, m - k) * ed);
    const auto f = lattice_form(gens, 3, p);
    std::vector<QVector> lk(3, QVector(3));
    const Rational s = ppow(p, f.shift);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) lk[c][r] = s * Rational(f.h[r * 3 + c]);
    if (splits_along(lk, d, p))
      return {LatticeClass2::from_generators(intersect_hyperplane(lk, d, p), p), k};
  }
  throw PostconditionViolated("ray did not reach the parallel set");
}

/// Membership in X_Delta tested directly: L lies in an apartment whose
/// boundary contains both chambers of Delta iff L cap span(e1, e2) splits
/// along e1 and e2 (the third frame line can always be taken through a
/// vector of L with minimal e3-valuation).
inline bool in_x_delta_direct(const LatticeClass& l) {
  const auto n = intersect_hyperplane(l.columns(), 2, l.p);
  return lattice_form(drop_coordinate(n, 1), 1, l.p) == lattice_form(intersect_hyperplane(n, 1, l.p), 1, l.p);
}

/// Class of u(a, b) . span(p^x e1, p^y e2, e3), u(a, b) = I + a E13 + b E23.
inline LatticeClass unipotent_apartment_vertex(const Rational& a, const Rational& b, int x, int y, int p) {
  QMatrix m(3, 3);
  m(0, 0) = ppow(p, x);
  m(1, 1) = ppow(p, y);
  m(0, 2) = a;
  m(1, 2) = b;
  m(2, 2) = 1;
  return canonicalize(m, p);
}

/// Marks ball vertices of the form u(a, b) . apartment_vertex with
/// v_p(a), v_p(b) >= -val_bound. Unipotents u(a, b) fix both chambers of
/// Delta, so they carry F0 to apartments containing Delta.
inline void mark_x_delta(BuildingBall& ball, int val_bound) {
  if (val_bound < 0) throw ConfigError("val_bound must be nonnegative");
  const int p = ball.p, r = ball.radius;
  ball.in_x_delta.assign(ball.size(), false);
  // with e3 normalized to exponent 0, ball vertices have |x|, |y| <= r, and a
  // matters modulo p^x
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y) {
      if (std::max({x, y, 0}) - std::min({x, y, 0}) > r) continue;
      const std::int64_t na = ipow(p, std::max(0, val_bound + x)), nb = ipow(p, std::max(0, val_bound + y));
      const Rational unit = ppow(p, -val_bound);
      for (std::int64_t ka = 0; ka < na; ++ka)
        for (std::int64_t kb = 0; kb < nb; ++kb) {
          auto l = unipotent_apartment_vertex(Rational(ka) * unit, Rational(kb) * unit, x, y, p);
          if (auto j = ball.find(l)) ball.in_x_delta[*j] = true;
        }
    }
}

inline BuildingBall x_delta_ball(int p, int radius, int val_bound) {
  auto b = build_ball(p, radius);
  mark_x_delta(b, val_bound);
  return b;
}

namespace detail {

inline std::vector<int> bfs_distances(const BuildingBall& b, std::size_t src, const std::vector<bool>* allowed) {
  std::vector<int> dist(b.size(), -1);
  std::queue<std::size_t> work;
  dist[src] = 0;
  work.push(src);
  while (!work.empty()) {
    auto u = work.front();
    work.pop();
    for (auto w : b.adjacency[u]) {
      if (dist[w] >= 0 || (allowed && !(*allowed)[w])) continue;
      dist[w] = dist[u] + 1;
      work.push(w);
    }
  }
  return dist;
}

/// Distinct values with a dense index, so pairwise tree distances are computed once.
struct TreeTable {
  std::vector<LatticeClass2> values;
  std::map<LatticeClass2, std::size_t> index;
  std::vector<int> dist;

  std::size_t add(const LatticeClass2& v) {
    auto [it, fresh] = index.emplace(v, values.size());
    if (fresh) values.push_back(v);
    return it->second;
  }
  void finish() {
    const std::size_t n = values.size();
    dist.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = a + 1; c < n; ++c) dist[a * n + c] = dist[c * n + a] = class_distance(values[a], values[c]);
  }
  int operator()(std::size_t a, std::size_t c) const { return dist[a * values.size() + c]; }
};

}  // namespace detail

/// Structural checks on a ball: neighbor counts, type alternation, symmetric
/// adjacency, and BFS depth against the elementary-divisor distance.
inline VerificationReport check_building_structure(const BuildingBall& b) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_name = "building.structure";
  rep.parameters.set("p", b.p).set("radius", b.radius);
  const std::int64_t expected = 2 * (b.p * b.p + b.p + 1);
  const auto base_nbs = neighbors(b.center());
  std::set<LatticeClass> distinct(base_nbs.begin(), base_nbs.end());
  std::int64_t type_failures = 0, asymmetric = 0, depth_failures = 0;
  std::array<std::int64_t, 3> types{};
  for (std::size_t i = 0; i < b.size(); ++i) {
    ++types[static_cast<std::size_t>(b.vertices[i].type())];
    if (class_distance(b.center(), b.vertices[i]) != b.depth[i]) ++depth_failures;
    for (auto j : b.adjacency[i]) {
      if (b.vertices[i].type() == b.vertices[j].type()) ++type_failures;
      if (!std::binary_search(b.adjacency[j].begin(), b.adjacency[j].end(), i)) ++asymmetric;
    }
  }
  std::vector<std::int64_t> shells(static_cast<std::size_t>(b.radius) + 1, 0);
  for (auto d : b.depth) ++shells[static_cast<std::size_t>(d)];
  rep.constants.set("base_neighbors", static_cast<std::int64_t>(distinct.size()));
  rep.constants.set("expected_neighbors", expected);
  rep.constants.set("vertices", static_cast<std::int64_t>(b.size()));
  rep.constants.set("edges", static_cast<std::int64_t>(b.edge_count()));
  for (std::size_t t = 0; t < 3; ++t) rep.constants.set("type" + std::to_string(t) + "_vertices", types[t]);
  rep.constants.set("type_failures", type_failures).set("asymmetric_edges", asymmetric);
  rep.constants.set("depth_failures", depth_failures);
  for (std::size_t d = 0; d < shells.size(); ++d) rep.rows.push_back(Record{{"depth", static_cast<std::int64_t>(d)}, {"vertices", shells[d]}});
  rep.pass = static_cast<std::int64_t>(distinct.size()) == expected && base_nbs.size() == distinct.size() &&
             type_failures == 0 && asymmetric == 0 && depth_failures == 0;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Quotient formula against ray following for pi_1 and pi_2 on every ball vertex.
inline VerificationReport check_projection_oracle(const BuildingBall& b, unsigned threads = 1) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_name = "building.projection_oracle";
  rep.parameters.set("p", b.p).set("radius", b.radius);
  struct Outcome {
    bool ok = true;
    int steps = 0;
  };
  auto out = parallel_map<Outcome>(b.size(), threads, [&](std::size_t k) {
    Outcome o;
    for (int i : {1, 2}) {
      auto r = projection_pi_ray(i, b.vertices[k]);
      o.ok = o.ok && r.value == projection_pi(i, b.vertices[k]);
      o.steps = std::max(o.steps, r.steps);
    }
    return o;
  });
  std::int64_t mismatches = 0, max_steps = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    max_steps = std::max<std::int64_t>(max_steps, out[k].steps);
    if (!out[k].ok) {
      ++mismatches;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back(Record{{"label", std::string("oracle_mismatch")}, {"vertex", b.vertices[k].str()}});
    }
  }
  rep.constants.set("vertices", static_cast<std::int64_t>(b.size())).set("mismatches", mismatches);
  rep.constants.set("max_ray_steps", max_steps);
  rep.pass = mismatches == 0;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Bi-Lipschitz certification of pi = (pi_1, pi_2) on the X_Delta-marked
/// vertices of a ball (the ball must have been marked).
inline VerificationReport certify_building_embedding(const BuildingBall& b, int val_bound, unsigned threads = 1) {
  auto t0 = std::chrono::steady_clock::now();
  if (b.in_x_delta.size() != b.size()) throw ConfigError("ball has no X_Delta marks");
  VerificationReport rep;
  rep.check_name = "building.embedding";
  rep.parameters.set("p", b.p).set("radius", b.radius).set("val_bound", val_bound);
  const int p = b.p;

  // projections of every ball vertex
  detail::TreeTable tree;
  std::vector<std::array<std::size_t, 2>> pi(b.size());
  for (std::size_t k = 0; k < b.size(); ++k)
    for (int i : {1, 2}) pi[k][static_cast<std::size_t>(i - 1)] = tree.add(projection_pi(i, b.vertices[k]));
  tree.finish();

  // marks against the direct membership test, and P(s_i) inside X_Delta
  std::int64_t marked = 0, mark_mismatches = 0, parallel_set_vertices = 0, parallel_set_unmarked = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    marked += b.in_x_delta[k];
    if (b.in_x_delta[k] != in_x_delta_direct(b.vertices[k])) ++mark_mismatches;
    const auto cols = b.vertices[k].columns();
    for (std::size_t d : {std::size_t{1}, std::size_t{0}})
      if (splits_along(cols, d, p)) {
        ++parallel_set_vertices;
        if (!b.in_x_delta[k]) ++parallel_set_unmarked;
      }
  }
  std::optional<std::size_t> unmarked_witness;
  for (std::size_t k = 0; k < b.size() && !unmarked_witness; ++k)
    if (!b.in_x_delta[k]) unmarked_witness = k;

  // 1-Lipschitz of each pi_i over every ball edge
  std::int64_t lipschitz_violations = 0, edges = 0;
  for (std::size_t u = 0; u < b.size(); ++u)
    for (auto w : b.adjacency[u]) {
      if (w < u) continue;
      ++edges;
      for (std::size_t i = 0; i < 2; ++i)
        if (tree(pi[u][i], pi[w][i]) > 1) ++lipschitz_violations;
    }

  // injectivity on marked vertices, and a collision on the whole ball
  std::map<std::array<std::size_t, 2>, std::size_t> seen_marked, seen_all;
  std::int64_t marked_collisions = 0;
  std::optional<std::pair<std::size_t, std::size_t>> collision;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b.in_x_delta[k]) {
      auto [it, fresh] = seen_marked.emplace(pi[k], k);
      if (!fresh) {
        ++marked_collisions;
        if (rep.witnesses.size() < 8)
          rep.witnesses.push_back(Record{{"label", std::string("marked_collision")},
                                         {"u", b.vertices[it->second].str()},
                                         {"v", b.vertices[k].str()}});
      }
    }
    auto [it, fresh] = seen_all.emplace(pi[k], k);
    if (!fresh && !collision) collision = std::make_pair(it->second, k);
  }

  // X_Delta-internal graph metric against d_1 + d_2
  std::vector<std::size_t> marked_idx;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b.in_x_delta[k]) marked_idx.push_back(k);
  struct PairStats {
    double upper = 0.0, lower = 0.0, detour = 0.0;  // d_XD/(d1+d2), (d1+d2)/d_XD, d_XD/d_X
    std::size_t up_v = 0, low_v = 0;
    bool disconnected = false;
  };
  auto stats = parallel_map<PairStats>(marked_idx.size(), threads, [&](std::size_t s) {
    PairStats st;
    const std::size_t u = marked_idx[s];
    auto internal = detail::bfs_distances(b, u, &b.in_x_delta);
    for (std::size_t t = s + 1; t < marked_idx.size(); ++t) {
      const std::size_t v = marked_idx[t];
      if (internal[v] < 0) {
        st.disconnected = true;
        continue;
      }
      const int sum = tree(pi[u][0], pi[v][0]) + tree(pi[u][1], pi[v][1]);
      if (sum == 0) continue;
      const double up = static_cast<double>(internal[v]) / sum, low = static_cast<double>(sum) / internal[v];
      if (up > st.upper) st.upper = up, st.up_v = v;
      if (low > st.lower) st.lower = low, st.low_v = v;
      st.detour = std::max(st.detour, static_cast<double>(internal[v]) / class_distance(b.vertices[u], b.vertices[v]));
    }
    return st;
  });
  PairStats worst;
  std::size_t up_u = 0, low_u = 0;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    if (stats[s].disconnected) throw DisconnectedXDelta("marked vertices are not connected inside the ball");
    if (stats[s].upper > worst.upper) worst.upper = stats[s].upper, worst.up_v = stats[s].up_v, up_u = marked_idx[s];
    if (stats[s].lower > worst.lower) worst.lower = stats[s].lower, worst.low_v = stats[s].low_v, low_u = marked_idx[s];
    worst.detour = std::max(worst.detour, stats[s].detour);
  }

  // Step-1 constant inside F0 with the Euclidean apartment metric: the
  // s_i-flats of F0 are parallel lines whose Hausdorff distance is the
  // tree distance divided by sqrt 2
  RootSystem a2(CartanType('A', 2));
  const auto cfg = find_maximally_distributed(a2, generate_weyl_group(a2));
  double sin_theta = 1.0;
  for (std::size_t i = 0; i < cfg.vertices.size(); ++i)
    sin_theta = std::min(sin_theta, std::sqrt(theta_sin2(cfg, i, a2).to_double()));
  const double alpha = 1.0 / sin_theta, alpha_tan = std::sqrt(1.0 - sin_theta * sin_theta) / sin_theta;
  std::vector<std::array<int, 3>> flat;
  for (int x = -b.radius; x <= b.radius; ++x)
    for (int y = -b.radius; y <= b.radius; ++y)
      if (std::max({x, y, 0}) - std::min({x, y, 0}) <= b.radius) flat.push_back({x, y, 0});
  double step1_max = 0.0, step1_graph_max = 0.0;
  std::int64_t step1_violations = 0;
  for (const auto& f : flat)
    for (const auto& g : flat) {
      if (f == g) continue;
      const double dx = f[0] - g[0], dy = f[1] - g[1], dz = f[2] - g[2], mean = (dx + dy + dz) / 3.0;
      const double euclid = std::sqrt((dx - mean) * (dx - mean) + (dy - mean) * (dy - mean) + (dz - mean) * (dz - mean));
      const double d1 = std::abs(dx - dz), d2 = std::abs(dy - dz);
      const double h = (d1 + d2) / std::sqrt(2.0);
      step1_max = std::max(step1_max, euclid / h);
      if (euclid > alpha * h * (1.0 + 1e-12)) ++step1_violations;
      const double graph = std::max({dx, dy, dz}) - std::min({dx, dy, dz});
      step1_graph_max = std::max(step1_graph_max, graph / (d1 + d2));
    }

  // image coverage of the product of tree balls
  std::int64_t tree_ball = 1, shell = p + 1;
  for (int r = 1; r <= b.radius; ++r, shell *= p) tree_ball += shell;
  const LatticeClass2 base2 = projection_pi(1, b.center());
  std::set<std::array<std::size_t, 2>> covered;
  for (const auto& [img, k] : seen_marked)
    if (class_distance(base2, tree.values[img[0]]) <= b.radius && class_distance(base2, tree.values[img[1]]) <= b.radius)
      covered.insert(img);

  rep.constants.set("vertices", static_cast<std::int64_t>(b.size())).set("marked_vertices", marked);
  rep.constants.set("mark_mismatches", mark_mismatches);
  rep.constants.set("parallel_set_vertices", parallel_set_vertices).set("parallel_set_unmarked", parallel_set_unmarked);
  rep.constants.set("edges_checked", edges).set("lipschitz_violations", lipschitz_violations);
  rep.constants.set("marked_collisions", marked_collisions);
  rep.constants.set("unmarked_collision_found", collision.has_value());
  rep.constants.set("lipschitz_upper", worst.upper).set("lipschitz_lower", worst.lower);
  rep.constants.set("internal_over_ambient_max", worst.detour);
  rep.constants.set("alpha", alpha).set("alpha_one_over_tan", alpha_tan).set("step1_max_ratio", step1_max);
  rep.constants.set("step1_violations", step1_violations).set("step1_graph_max_ratio", step1_graph_max);
  rep.constants.set("hausdorff_per_tree_edge", 1.0 / std::sqrt(2.0));
  rep.constants.set("image_coverage", static_cast<double>(covered.size()) / static_cast<double>(tree_ball * tree_ball));
  if (!marked_idx.empty() && worst.upper > 0.0) {
    rep.witnesses.push_back(Record{{"label", std::string("witness_max_internal_over_sum")},
                                   {"u", b.vertices[up_u].str()},
                                   {"v", b.vertices[worst.up_v].str()},
                                   {"ratio", worst.upper}});
    rep.witnesses.push_back(Record{{"label", std::string("witness_max_sum_over_internal")},
                                   {"u", b.vertices[low_u].str()},
                                   {"v", b.vertices[worst.low_v].str()},
                                   {"ratio", worst.lower}});
  }
  if (collision)
    rep.witnesses.push_back(Record{{"label", std::string("unmarked_collision")},
                                   {"u", b.vertices[collision->first].str()},
                                   {"v", b.vertices[collision->second].str()},
                                   {"u_marked", static_cast<bool>(b.in_x_delta[collision->first])},
                                   {"v_marked", static_cast<bool>(b.in_x_delta[collision->second])}});
  if (unmarked_witness)
    rep.witnesses.push_back(Record{{"label", std::string("unmarked_vertex")}, {"v", b.vertices[*unmarked_witness].str()}});
  // a complete ball of radius >= 1 must exhibit the collision; radius 0 has a single vertex
  const bool collision_ok = collision.has_value() || b.radius == 0;
  rep.pass = mark_mismatches == 0 && parallel_set_unmarked == 0 && lipschitz_violations == 0 && marked_collisions == 0 &&
             step1_violations == 0 && collision_ok;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Full building suite: structure, projection oracle (radius <= 2) and the
/// embedding certificate on the marked ball.
inline std::vector<VerificationReport> verify_building(int p, int radius, int val_bound, unsigned threads = 1) {
  auto ball = x_delta_ball(p, radius, val_bound);
  std::vector<VerificationReport> out;
  out.push_back(check_building_structure(ball));
  if (radius <= 2) {
    out.push_back(check_projection_oracle(ball, threads));
  } else {
    out.push_back(check_projection_oracle(build_ball(p, 2), threads));
  }
  out.push_back(certify_building_embedding(ball, val_bound, threads));
  return out;
}

/// Ball as JSON: vertices as canonical basis matrices of "num/den" strings,
/// edges by vertex index, X_Delta marks.
inline nlohmann::ordered_json ball_to_json(const BuildingBall& b) {
  nlohmann::ordered_json j;
  j["p"] = b.p;
  j["radius"] = b.radius;
  j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : b.vertices) {
    auto m = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < 3; ++r) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < 3; ++c) row.push_back(Rational(v(r, c)).str());
      m.push_back(row);
    }
    j["vertices"].push_back(m);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (std::size_t u = 0; u < b.size(); ++u)
    for (auto w : b.adjacency[u])
      if (u < w) j["edges"].push_back({u, w});
  j["in_x_delta"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < b.size(); ++k) j["in_x_delta"].push_back(b.in_x_delta.empty() ? false : static_cast<bool>(b.in_x_delta[k]));
  return j;
}

}  // namespace qiembed
