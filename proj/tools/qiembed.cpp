#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "qiembed/run.hpp"

using namespace qiembed;

namespace {

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::string format = "json";
  bool json = false;
  bool timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "run seed");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "write output to this file instead of stdout");
  app->add_option("--format", c.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app->add_flag("--json", c.json, "shorthand for --format json");
  app->add_flag("--timing", c.timing, "keep measured runtime_ms (output is then not reproducible)");
}

void write(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + c.out + "'");
  f << text;
}

int finish(const Common& c, std::vector<VerificationReport> reports) {
  if (!c.timing)
    for (auto& r : reports) r.runtime_ms = 0;
  const Format f = c.json ? Format::json : *parse_format(c.format);
  write(c, emit(reports, f));
  if (!c.out.empty()) std::cerr << emit(reports, Format::text);
  return all_pass(reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification lab for quasi-isometric embeddings of products of trees and hyperbolic planes"};
  app.require_subcommand(1);
  Common common;

  auto* roots = app.add_subcommand("roots", "root selection: list one type, or verify all types");
  std::string roots_type;
  roots->add_option("--type", roots_type, "Cartan type such as A3 or A1xA1");
  add_common(roots, common);

  auto* coxeter = app.add_subcommand("coxeter", "Weyl orders and maximally distributed configurations");
  std::string cox_type;
  coxeter->add_option("--type", cox_type, "show the configuration for one type");
  add_common(coxeter, common);

  auto* symmetric = app.add_subcommand("symmetric", "AN-map certificates");
  std::size_t sym_samples = 10000;
  std::vector<int> sym_dims{2, 3};
  symmetric->add_option("--samples", sym_samples, "pairs per dimension");
  symmetric->add_option("--n", sym_dims, "dimensions to certify");
  add_common(symmetric, common);

  auto* trees = app.add_subcommand("trees", "products of trees");
  auto* trees_verify = trees->add_subcommand("verify", "projection, Step-1, branching and union-of-flats checks");
  trees->require_subcommand(1);
  int tq = 3, tn = 2, tr = 5;
  trees_verify->add_option("--q", tq, "tree valence")->check(CLI::Range(2, 9));
  trees_verify->add_option("--n", tn, "number of factors")->check(CLI::Range(1, 4));
  trees_verify->add_option("--radius", tr, "window radius")->check(CLI::Range(0, 8));
  add_common(trees_verify, common);

  auto* building = app.add_subcommand("building", "SL3(Q_p) building");
  building->require_subcommand(1);
  int bp = 2, br = 3, bv = 3;
  auto* building_build = building->add_subcommand("build", "write a ball with X_Delta marks as JSON");
  auto* building_verify = building->add_subcommand("verify", "structure, projection oracle and embedding certificate");
  for (auto* s : {building_build, building_verify}) {
    s->add_option("--p", bp, "prime (2 or 3)");
    s->add_option("--radius", br, "ball radius (<= 4)");
    s->add_option("--valbound", bv, "denominator bound for the unipotent marking");
    add_common(s, common);
  }

  auto* all = app.add_subcommand("all", "run every suite");
  std::string config_path;
  all->add_option("--config", config_path, "JSON run configuration");
  add_common(all, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (roots->parsed()) {
      if (!roots_type.empty()) {
        RootSystem r(CartanType::parse(roots_type));
        nlohmann::ordered_json j;
        j["type"] = r.cartan_type().name();
        for (const auto& p : r.positive_roots()) j["positive_roots"].push_back(p.simple_coords);
        for (const auto& s : select_strongly_commuting_roots(r)) j["selected"].push_back(s.simple_coords);
        write(common, j.dump(2) + "\n");
        return 0;
      }
      return finish(common, {verify_roots()});
    }
    if (coxeter->parsed()) {
      if (!cox_type.empty()) {
        RootSystem r(CartanType::parse(cox_type));
        auto w = generate_weyl_group(r);
        auto cfg = find_maximally_distributed(r, w);
        nlohmann::ordered_json j;
        j["type"] = r.cartan_type().name();
        j["weyl_order"] = w.order();
        for (std::size_t i = 0; i < cfg.vertices.size(); ++i) {
          nlohmann::ordered_json v;
          for (const auto& x : r.ambient_of(cfg.vertices[i].direction)) v["xi_ambient"].push_back(x.str());
          v["vertex_type"] = cfg.vertices[i].type;
          v["wall_root"] = r.positive_roots()[cfg.walls[i].root_index].simple_coords;
          for (const auto& x : cfg.etas[i]) v["eta"].push_back(x.str());
          v["sin2_theta"] = theta_sin2(cfg, i, r).str();
          j["config"].push_back(v);
        }
        j["delta_chambers"] = cfg.delta_chambers.size();
        write(common, j.dump(2) + "\n");
        return 0;
      }
      return finish(common, verify_coxeter());
    }
    if (symmetric->parsed()) {
      RunConfig c;
      c.seed = common.seed;
      c.threads = common.threads;
      c.symmetric.samples = sym_samples;
      c.symmetric.dims = sym_dims;
      return finish(common, verify_symmetric(c));
    }
    if (trees_verify->parsed()) return finish(common, verify_trees(tq, tn, tr));
    if (building_build->parsed()) {
      auto ball = x_delta_ball(bp, br, bv);
      write(common, ball_to_json(ball).dump() + "\n");
      return 0;
    }
    if (building_verify->parsed()) return finish(common, verify_building(bp, br, bv, common.threads));
    if (all->parsed()) {
      RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (all->count("--seed")) c.seed = common.seed;
      if (all->count("--threads")) c.threads = common.threads;
      c.timing = c.timing || common.timing;
      common.timing = c.timing;
      return finish(common, run_all(c));
    }
  } catch (const Error& e) {
    // run_all rethrows with context as a plain Error, so dispatch on kind
    std::cerr << e.what() << "\n";
    const auto& k = e.kind();
    return (k == "ConfigError" || k == "IllegalType" || k == "RadiusTooLarge" || k == "RankTooLarge") ? 2 : 1;
  }
  return 2;
}
