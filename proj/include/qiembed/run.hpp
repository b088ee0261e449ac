#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qiembed/coxeter.hpp"
#include "qiembed/padic_building.hpp"
#include "qiembed/random.hpp"
#include "qiembed/report.hpp"
#include "qiembed/root_system.hpp"
#include "qiembed/symmetric_space.hpp"
#include "qiembed/tree_building.hpp"

namespace qiembed {

inline std::vector<CartanType> root_selection_types() {
  std::vector<CartanType> t;
  for (int n = 1; n <= 7; ++n) t.emplace_back('A', n);
  for (int n = 2; n <= 7; ++n) t.emplace_back('B', n);
  for (int n = 2; n <= 7; ++n) t.emplace_back('C', n);
  for (int n = 4; n <= 7; ++n) t.emplace_back('D', n);
  t.emplace_back('G', 2);
  t.emplace_back('F', 4);
  for (int n = 6; n <= 8; ++n) t.emplace_back('E', n);
  return t;
}

/// Strongly commuting root selection for every listed type: rank-many,
/// independent, and no pairwise sum (of either sign) in the full root list.
inline VerificationReport verify_roots(const std::vector<CartanType>& types = root_selection_types()) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_name = "roots.select";
  std::string names;
  for (const auto& t : types) names += (names.empty() ? "" : " ") + t.name();
  rep.parameters.set("types", names);
  bool all = true;
  for (const auto& t : types) {
    RootSystem r(t);
    auto sel = select_strongly_commuting_roots(r);
    std::set<QVector> roots;
    for (const auto& p : r.positive_roots()) {
      roots.insert(p.ambient);
      roots.insert(Rational(-1) * p.ambient);
    }
    std::vector<QVector> amb;
    std::string coords;
    for (const auto& a : sel) {
      amb.push_back(a.ambient);
      std::string c;
      for (auto x : a.simple_coords) c += std::to_string(x);
      coords += (coords.empty() ? "" : " ") + c;
    }
    std::int64_t sum_hits = 0;
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t j = i + 1; j < sel.size(); ++j) sum_hits += roots.count(sel[i].ambient + sel[j].ambient);
    const bool ok = sel.size() == static_cast<std::size_t>(r.rank()) && rank_of(amb) == sel.size() && sum_hits == 0;
    all = all && ok;
    rep.rows.push_back(Record{{"type", t.name()},
                              {"selected", coords},
                              {"independent", rank_of(amb) == sel.size()},
                              {"root_sums", sum_hits},
                              {"pass", ok}});
    if (!ok) rep.witnesses.push_back(Record{{"label", std::string("failed_type")}, {"type", t.name()}});
  }
  rep.constants.set("types_checked", static_cast<std::int64_t>(types.size()));
  rep.pass = all;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

inline std::vector<std::string> weyl_order_types() {
  return {"A1", "A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "B5", "B6", "C2", "C3", "C4", "C5",
          "C6", "D4", "D5", "D6", "G2", "F4", "E6", "A1xA1", "A2xB2"};
}

inline std::vector<std::string> max_distributed_types() { return {"A1xA1", "A2", "A3", "B2", "B3"}; }

/// Weyl group orders by enumeration against the closed form, and the
/// maximally distributed configurations.
inline std::vector<VerificationReport> verify_coxeter() {
  std::vector<VerificationReport> out;
  {
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.check_name = "coxeter.weyl_orders";
    bool all = true;
    for (const auto& name : weyl_order_types()) {
      RootSystem r(CartanType::parse(name));
      const auto got = generate_weyl_group(r).order();
      const auto want = weyl_group_order(r.cartan_type());
      all = all && got == want;
      rep.rows.push_back(Record{{"type", name},
                                {"enumerated", static_cast<std::int64_t>(got)},
                                {"closed_form", static_cast<std::int64_t>(want)}});
    }
    rep.pass = all;
    rep.runtime_ms = detail::elapsed_ms(t0);
    out.push_back(std::move(rep));
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.check_name = "coxeter.max_distributed";
    bool all = true;
    for (const auto& name : max_distributed_types()) {
      RootSystem r(CartanType::parse(name));
      auto cfg = find_maximally_distributed(r, generate_weyl_group(r));
      WallTable walls(r);
      std::vector<QVector> normals;
      for (const auto& w : cfg.walls) normals.push_back(walls.functional(w.root_index));
      const bool empty_intersection = rank_of(normals) == cfg.walls.size();
      const bool ok = is_maximally_distributed(cfg.vertices, r) && empty_intersection &&
                      walls_meet_in_vertex_pairs(cfg, r);
      Record row{{"type", name}, {"maximally_distributed", ok}, {"walls_meet_empty", empty_intersection}};
      std::string dirs;
      for (const auto& v : cfg.vertices) {
        std::string d;
        for (const auto& x : r.ambient_of(v.direction)) d += (d.empty() ? "" : ",") + x.str();
        dirs += "(" + d + ")";
      }
      row.set("xi_ambient", dirs);
      if (name == "A1xA1") {
        // axes pair: orthogonal, of different factors
        auto a = r.ambient_of(cfg.vertices[0].direction), b = r.ambient_of(cfg.vertices[1].direction);
        const bool axes = dot(a, b).is_zero();
        row.set("figure_match", axes);
        if (!axes) all = false;
      } else if (name == "A2") {
        auto a = r.ambient_of(cfg.vertices[0].direction), b = r.ambient_of(cfg.vertices[1].direction);
        const Rational c = dot(a, b);
        const bool angle = c.sign() < 0 && c * c / (dot(a, a) * dot(b, b)) == Rational(1, 4);
        const bool same_type = cfg.vertices[0].type == cfg.vertices[1].type;
        row.set("figure_match", angle && same_type);
        if (!(angle && same_type)) all = false;
      }
      std::string th;
      for (std::size_t i = 0; i < cfg.vertices.size(); ++i) th += (th.empty() ? "" : ",") + theta_sin2(cfg, i, r).str();
      row.set("sin2_theta", th);
      all = all && ok;
      rep.rows.push_back(std::move(row));
    }
    rep.pass = all;
    rep.runtime_ms = detail::elapsed_ms(t0);
    out.push_back(std::move(rep));
  }
  return out;
}

/// Run configuration. Parsed from JSON; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool timing = false;  // runtime_ms is zeroed otherwise, for byte-identical output

  struct Symmetric {
    std::size_t samples = 10000;
    std::size_t sl2_samples = 1000;
    std::size_t rank_one_samples = 1000;
    double d_min = 1.0, d_max = 64.0, c_hat_floor = 10.0;
    double slack = 1.05, c_floor = 0.05, stability = 0.05;
    std::vector<int> dims{2, 3};
  } symmetric;

  struct Trees {
    int q = 3, n = 2, radius = 5;
  } trees;

  struct Building {
    int p = 2, radius = 3, val_bound = 3;
  } building;

  bool run_roots = true, run_coxeter = true, run_symmetric = true, run_trees = true, run_building = true;
};

namespace detail {

template <class T>
T config_get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for key '" + key + "'");
  }
}

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::config_get;
  RunConfig c;
  detail::reject_unknown(j, {"seed", "threads", "timing", "checks", "symmetric", "trees", "building"}, "");
  if (j.contains("seed")) c.seed = config_get<std::uint64_t>(j["seed"], "seed");
  if (j.contains("threads")) c.threads = config_get<unsigned>(j["threads"], "threads");
  if (j.contains("timing")) c.timing = config_get<bool>(j["timing"], "timing");
  if (j.contains("checks")) {
    auto list = config_get<std::vector<std::string>>(j["checks"], "checks");
    c.run_roots = c.run_coxeter = c.run_symmetric = c.run_trees = c.run_building = false;
    for (const auto& s : list) {
      if (s == "roots") c.run_roots = true;
      else if (s == "coxeter") c.run_coxeter = true;
      else if (s == "symmetric") c.run_symmetric = true;
      else if (s == "trees") c.run_trees = true;
      else if (s == "building") c.run_building = true;
      else throw ConfigError("unknown check '" + s + "' in 'checks'");
    }
  }
  if (j.contains("symmetric")) {
    const auto& s = j["symmetric"];
    detail::reject_unknown(s, {"samples", "sl2_samples", "rank_one_samples", "d_min", "d_max", "c_hat_floor", "slack",
                               "c_floor", "stability", "dims"},
                           "symmetric");
    auto& o = c.symmetric;
    if (s.contains("samples")) o.samples = config_get<std::size_t>(s["samples"], "symmetric.samples");
    if (s.contains("sl2_samples")) o.sl2_samples = config_get<std::size_t>(s["sl2_samples"], "symmetric.sl2_samples");
    if (s.contains("rank_one_samples"))
      o.rank_one_samples = config_get<std::size_t>(s["rank_one_samples"], "symmetric.rank_one_samples");
    if (s.contains("d_min")) o.d_min = config_get<double>(s["d_min"], "symmetric.d_min");
    if (s.contains("d_max")) o.d_max = config_get<double>(s["d_max"], "symmetric.d_max");
    if (s.contains("c_hat_floor")) o.c_hat_floor = config_get<double>(s["c_hat_floor"], "symmetric.c_hat_floor");
    if (s.contains("slack")) o.slack = config_get<double>(s["slack"], "symmetric.slack");
    if (s.contains("c_floor")) o.c_floor = config_get<double>(s["c_floor"], "symmetric.c_floor");
    if (s.contains("stability")) o.stability = config_get<double>(s["stability"], "symmetric.stability");
    if (s.contains("dims")) o.dims = config_get<std::vector<int>>(s["dims"], "symmetric.dims");
  }
  if (j.contains("trees")) {
    const auto& t = j["trees"];
    detail::reject_unknown(t, {"q", "n", "radius"}, "trees");
    if (t.contains("q")) c.trees.q = config_get<int>(t["q"], "trees.q");
    if (t.contains("n")) c.trees.n = config_get<int>(t["n"], "trees.n");
    if (t.contains("radius")) c.trees.radius = config_get<int>(t["radius"], "trees.radius");
  }
  if (j.contains("building")) {
    const auto& b = j["building"];
    detail::reject_unknown(b, {"p", "radius", "val_bound"}, "building");
    if (b.contains("p")) c.building.p = config_get<int>(b["p"], "building.p");
    if (b.contains("radius")) c.building.radius = config_get<int>(b["radius"], "building.radius");
    if (b.contains("val_bound")) c.building.val_bound = config_get<int>(b["val_bound"], "building.val_bound");
  }
  if (c.threads == 0) throw ConfigError("'threads' must be positive");
  if (c.trees.q < 2 || c.trees.n < 1 || c.trees.radius < 0) throw ConfigError("bad 'trees' parameters");
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

/// Seeds of the individual checks, derived from the run seed. Kept below 2^63
/// so they print as non-negative integers and can be fed back verbatim.
inline std::uint64_t check_seed(const RunConfig& c, std::initializer_list<std::uint64_t> path) {
  return derive_seed(c.seed, path) >> 1;
}

inline std::vector<VerificationReport> verify_symmetric(const RunConfig& c) {
  const auto& s = c.symmetric;
  std::vector<VerificationReport> out;
  out.push_back(certify_sl2_exactness(check_seed(c, {1}), s.sl2_samples));
  for (int n : s.dims) {
    QISamplerConfig q;
    q.seed = check_seed(c, {2, static_cast<std::uint64_t>(n)});
    q.samples = s.samples;
    q.d_min = s.d_min;
    q.d_max = s.d_max;
    q.c_hat_floor = s.c_hat_floor;
    q.threads = c.threads;
    out.push_back(certify_qi(build_an_embedding(n), q, check_seed(c, {3, static_cast<std::uint64_t>(n)}), s.slack,
                             s.c_floor));
  }
  out.push_back(certify_rank_one_path(check_seed(c, {4}), check_seed(c, {5}), s.rank_one_samples, s.stability));
  return out;
}

/// Every module's suite in a fixed order: roots, coxeter, symmetric,
/// trees, building. Errors are rethrown with the failing module named.
inline std::vector<VerificationReport> run_all(const RunConfig& c) {
  std::vector<VerificationReport> out;
  auto append = [&](const char* module, auto&& fn) {
    try {
      for (auto& r : fn()) out.push_back(std::move(r));
    } catch (const Error& e) {
      throw e.with_context(module);
    }
  };
  if (c.run_roots) append("roots", [] { return std::vector<VerificationReport>{verify_roots()}; });
  if (c.run_coxeter) append("coxeter", [] { return verify_coxeter(); });
  if (c.run_symmetric) append("symmetric", [&] { return verify_symmetric(c); });
  if (c.run_trees) append("trees", [&] { return verify_trees(c.trees.q, c.trees.n, c.trees.radius); });
  if (c.run_building)
    append("building", [&] {
      return verify_building(c.building.p, c.building.radius, c.building.val_bound, c.threads);
    });
  for (auto& r : out) {
    r.parameters.set("run_seed", c.seed);
    if (!c.timing) r.runtime_ms = 0;
  }
  return out;
}

inline bool all_pass(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace qiembed
