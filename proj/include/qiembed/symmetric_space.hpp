#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "qiembed/errors.hpp"
#include "qiembed/hyperbolic.hpp"
#include "qiembed/linalg.hpp"
#include "qiembed/parallel.hpp"
#include "qiembed/precision.hpp"
#include "qiembed/random.hpp"
#include "qiembed/report.hpp"
#include "qiembed/root_system.hpp"

namespace qiembed {

/// Elementary matrix E_ab (0-based indices).
struct Elementary {
  std::size_t a = 0, b = 0;
  friend bool operator==(const Elementary&, const Elementary&) = default;
};

/// The product of n affine groups inside the AN part of SL_{n+1}(R): one
/// diagonal X_i and one nilpotent Z_i = E_ab per selected root e_a - e_b.
struct ANEmbedding {
  int n = 0;
  std::vector<Root> roots;
  std::vector<QVector> X;  // diagonals of the traceless X_i
  std::vector<Elementary> Z;
};

namespace detail {

inline QMatrix elementary_matrix(std::size_t m, const Elementary& e) {
  QMatrix z(m, m);
  z(e.a, e.b) = 1;
  return z;
}

inline void verify_an_embedding(const ANEmbedding& e) {
  const std::size_t m = static_cast<std::size_t>(e.n) + 1;
  for (std::size_t i = 0; i < e.X.size(); ++i) {
    Rational tr;
    for (const auto& x : e.X[i]) tr += x;
    if (!tr.is_zero()) throw PostconditionViolated("X_i is not traceless");
    for (std::size_t j = 0; j < e.Z.size(); ++j) {
      Rational v = e.X[i][e.Z[j].a] - e.X[i][e.Z[j].b];
      if (v != Rational(i == j ? 2 : 0)) throw PostconditionViolated("alpha_j(X_i) != 2 delta_ij");
    }
  }
  // exp(tX_i) commutes with I + sZ_j (j != i) iff X_i has equal entries at a, b;
  // the Z's commute with each other iff their products vanish symmetrically.
  for (std::size_t i = 0; i < e.X.size(); ++i)
    for (std::size_t j = 0; j < e.Z.size(); ++j)
      if (i != j && e.X[i][e.Z[j].a] != e.X[i][e.Z[j].b])
        throw PostconditionViolated("exp(X_i) and exp(Z_j) do not commute");
  for (std::size_t i = 0; i < e.Z.size(); ++i)
    for (std::size_t j = 0; j < e.Z.size(); ++j) {
      auto zi = elementary_matrix(m, e.Z[i]), zj = elementary_matrix(m, e.Z[j]);
      if (zi * zj != zj * zi) throw PostconditionViolated("Z_i and Z_j do not commute");
    }
}

}  // namespace detail

inline ANEmbedding build_an_embedding(int n) {
  if (n < 1 || n > 6) throw IllegalType("AN embedding requires 1 <= n <= 6");
  RootSystem r(CartanType('A', n));
  ANEmbedding e;
  e.n = n;
  e.roots = select_strongly_commuting_roots(r);
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  for (const auto& root : e.roots) {
    Elementary z;
    for (std::size_t k = 0; k < m; ++k) {
      if (root.ambient[k] == Rational(1)) z.a = k;
      if (root.ambient[k] == Rational(-1)) z.b = k;
    }
    e.Z.push_back(z);
  }
  // rows: alpha_j(X) = x_a - x_b for each root, then the trace
  QMatrix sys(m, m);
  for (std::size_t j = 0; j < e.Z.size(); ++j) {
    sys(j, e.Z[j].a) = 1;
    sys(j, e.Z[j].b) = -1;
  }
  for (std::size_t k = 0; k < m; ++k) sys(m - 1, k) = 1;
  for (std::size_t i = 0; i < e.Z.size(); ++i) {
    QVector rhs(m);
    rhs[i] = 2;
    auto x = solve(sys, rhs);
    if (!x) throw PostconditionViolated("selected roots are not independent");
    e.X.push_back(*x);
  }
  detail::verify_an_embedding(e);
  return e;
}

/// Point of SL_{n+1}(R)/SO(n+1) as a unit-determinant SPD matrix.
struct SPDPoint {
  SquareMatrix<Real> P;
};

/// The AN element g = prod_i exp(t_i X_i)(I + s_i Z_i).
inline SquareMatrix<Real> an_element(const ANEmbedding& e, const ProductPoint& p) {
  using std::exp;
  const std::size_t m = static_cast<std::size_t>(e.n) + 1;
  if (p.factors.size() != static_cast<std::size_t>(e.n)) throw WrongCardinality("product point has wrong number of factors");
  auto g = SquareMatrix<Real>::identity(m);
  for (std::size_t i = 0; i < p.factors.size(); ++i) {
    SquareMatrix<Real> f(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& x = e.X[i][k];
      f(k, k) = exp(Real(p.factors[i].t) * Real(x.num()) / Real(x.den()));
    }
    // exp(tX)(I + sZ): column b gains s * exp(tX)_{aa} at row a
    f(e.Z[i].a, e.Z[i].b) = f(e.Z[i].a, e.Z[i].a) * Real(p.factors[i].s);
    g = g * f;
  }
  return g;
}

inline SPDPoint embed(const ANEmbedding& e, const ProductPoint& p) {
  auto g = an_element(e, p);
  return {g * g.transpose()};
}

/// Throws NotSPD unless P is symmetric with det 1 (relative 1e-9) and positive definite.
inline void validate_spd(const SPDPoint& p) {
  using std::abs;
  const auto& P = p.P;
  for (std::size_t i = 0; i < P.n; ++i)
    for (std::size_t j = i + 1; j < P.n; ++j) {
      Real scale = abs(P(i, j)) + abs(P(j, i)) + 1;
      if (abs(P(i, j) - P(j, i)) > Real(1e-12) * scale) throw NotSPD("matrix is not symmetric");
    }
  auto l = cholesky(P);
  Real det = 1;
  for (std::size_t i = 0; i < P.n; ++i) det *= l(i, i) * l(i, i);
  if (abs(det - 1) > Real(1e-9)) throw NotSPD("determinant is not 1");
}

/// sqrt(sum_k log^2 lambda_k), lambda the eigenvalues of P^-1 Q.
inline Real spd_distance_t(const SPDPoint& p, const SPDPoint& q) {
  using std::log;
  using std::sqrt;
  auto l = cholesky(p.P);
  auto ev = jacobi_eigenvalues(congruence_inverse(l, q.P));
  Real s = 0;
  for (const auto& v : ev) {
    if (!(v > 0)) throw NotSPD("pencil has a non-positive eigenvalue");
    Real lv = log(v);
    s += lv * lv;
  }
  return sqrt(s);
}

inline double spd_distance(const SPDPoint& p, const SPDPoint& q) { return static_cast<double>(spd_distance_t(p, q)); }

/// d(embed p, embed q) computed from the single AN element m = g(p^-1 q).
/// The embedding is a homomorphism, so the distance equals d(I, m m^T) and
/// only the singular values of m are needed. Moving the exponentials to
/// the right gives m = (I + sum_i c_i Z_i) exp(sum_i tau_i X_i), where
/// tau_i = t_q - t_p and c_i = s_q e^{2 tau_i} - s_p is the real part of the
/// factor-i point p_i^-1 q_i.
inline double an_distance(const ANEmbedding& e, const ProductPoint& p, const ProductPoint& q) {
  const std::size_t m = static_cast<std::size_t>(e.n) + 1;
  if (p.factors.size() != static_cast<std::size_t>(e.n) || q.factors.size() != p.factors.size())
    throw WrongCardinality("product point has wrong number of factors");
  std::vector<long double> tau(p.factors.size()), c(p.factors.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    tau[i] = static_cast<long double>(q.factors[i].t) - p.factors[i].t;
    c[i] = static_cast<long double>(q.factors[i].s) * std::exp(2.0L * tau[i]) - p.factors[i].s;
  }
  SquareMatrix<double> g(m);
  for (std::size_t k = 0; k < m; ++k) {
    long double a = 0.0L;
    for (std::size_t i = 0; i < tau.size(); ++i) a += tau[i] * static_cast<long double>(e.X[i][k].to_double());
    g(k, k) = static_cast<double>(std::exp(a));
  }
  for (std::size_t i = 0; i < tau.size(); ++i) g(e.Z[i].a, e.Z[i].b) = static_cast<double>(c[i]) * g(e.Z[i].b, e.Z[i].b);
  double s = 0.0;
  for (double v : singular_values_squared(g)) {
    if (!(v > 0.0)) throw NotSPD("AN element is singular");
    const double l = std::log(v);
    s += l * l;
  }
  return std::sqrt(s);
}

/// d(embed 0, embed p) for p equal to the base point except h in factor i.
/// With Y_i = X_i - H_i, H_i = E_aa - E_bb: d^2 = 2 d_H^2 + 4 t^2 |Y_i|^2.
inline double single_factor_closed_form(const ANEmbedding& e, std::size_t i, const HyperbolicPoint& h) {
  double y2 = 0.0;
  for (std::size_t k = 0; k < e.X[i].size(); ++k) {
    double y = e.X[i][k].to_double();
    if (k == e.Z[i].a) y -= 1.0;
    if (k == e.Z[i].b) y += 1.0;
    y2 += y * y;
  }
  double dh = hyperbolic_distance({}, h);
  return std::sqrt(2.0 * dh * dh + 4.0 * h.t * h.t * y2);
}

struct QISamplerConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  double d_min = 1.0;
  double d_max = 64.0;
  double c_hat_floor = 10.0;  // c_hat is taken over samples with d >= this
  unsigned threads = 1;
};

struct QISample {
  ProductPoint p, q;
  double product_distance = 0.0;
  double spd_distance = 0.0;
  double ratio() const { return spd_distance / product_distance; }
};

struct QIBin {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  double max_ratio = 0.0, min_ratio = 0.0;
  std::size_t argmax = 0, argmin = 0;  // indices into QIResult::samples
};

struct QIResult {
  std::vector<QIBin> bins;
  std::vector<QISample> samples;
  double lambda_hat = 0.0;
  double c_hat = 0.0;
  std::size_t argmax = 0, argmin = 0;
};

/// Dyadic bin edges d_min, 2 d_min, ... with the last bin ending at d_max.
inline std::vector<std::pair<double, double>> dyadic_bins(double d_min, double d_max) {
  if (!(d_min > 0.0) || !(d_max > d_min)) throw ConfigError("require 0 < d_min < d_max");
  std::vector<std::pair<double, double>> out;
  for (double lo = d_min; lo < d_max * (1.0 - 1e-12); lo *= 2.0) out.push_back({lo, std::min(2.0 * lo, d_max)});
  return out;
}

namespace detail {

inline std::size_t bin_of(const std::vector<std::pair<double, double>>& bins, double d) {
  for (std::size_t b = 0; b < bins.size(); ++b)
    if (d < bins[b].second) return b;
  return bins.size() - 1;
}

/// Pair whose product distance is close to `target`: independent random
/// base points, the target split across factors by a flat Dirichlet draw,
/// each factor displaced by a geodesic of its share in a uniform direction.
inline QISample draw_pair(const ANEmbedding& e, Stream& rng, double target) {
  const std::size_t n = static_cast<std::size_t>(e.n);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.exponential());
  QISample s;
  for (std::size_t i = 0; i < n; ++i) {
    HyperbolicPoint base{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    HyperbolicPoint h = displacement(target * w[i] / total, rng.angle());
    s.p.factors.push_back(base);
    s.q.factors.push_back(compose(base, h));
  }
  return s;
}

}  // namespace detail

/// Stratified Monte Carlo over dyadic distance bins of the ratio
/// d_spd(embed p, embed q) / d_prod(p, q).
inline QIResult sample_qi(const ANEmbedding& e, const QISamplerConfig& cfg) {
  auto bins = dyadic_bins(cfg.d_min, cfg.d_max);
  if (cfg.samples < bins.size())
    throw EmptyBin("need at least one sample per bin (" + std::to_string(bins.size()) + " bins)");
  const std::size_t per = cfg.samples / bins.size(), extra = cfg.samples % bins.size();
  std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (bin, index in bin)
  for (std::size_t b = 0; b < bins.size(); ++b)
    for (std::size_t k = 0; k < per + (b < extra ? 1 : 0); ++k) jobs.push_back({b, k});

  QIResult res;
  res.samples = parallel_map<QISample>(jobs.size(), cfg.threads, [&](std::size_t j) {
    auto [b, k] = jobs[j];
    Stream rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(e.n), b, k}));
    double target = rng.uniform(bins[b].first, bins[b].second);
    QISample s = detail::draw_pair(e, rng, target);
    s.product_distance = product_distance(s.p, s.q);
    s.spd_distance = an_distance(e, s.p, s.q);
    return s;
  });

  for (const auto& [lo, hi] : bins) res.bins.push_back({lo, hi, 0, 0.0, 0.0, 0, 0});
  bool have_c = false;
  for (std::size_t j = 0; j < res.samples.size(); ++j) {
    const auto& s = res.samples[j];
    double r = s.ratio();
    auto& bin = res.bins[detail::bin_of(bins, s.product_distance)];
    if (bin.count == 0 || r > bin.max_ratio) bin.max_ratio = r, bin.argmax = j;
    if (bin.count == 0 || r < bin.min_ratio) bin.min_ratio = r, bin.argmin = j;
    ++bin.count;
    if (j == 0 || r > res.lambda_hat) res.lambda_hat = r, res.argmax = j;
    if (s.product_distance >= cfg.c_hat_floor && (!have_c || r < res.c_hat)) {
      res.c_hat = r, res.argmin = j;
      have_c = true;
    }
  }
  for (const auto& bin : res.bins)
    if (bin.count == 0)
      throw EmptyBin("no samples landed in [" + std::to_string(bin.lo) + ", " + std::to_string(bin.hi) + ")");
  if (!have_c) {
    res.c_hat = res.samples[res.argmin].ratio();
    for (std::size_t j = 0; j < res.samples.size(); ++j)
      if (res.samples[j].ratio() < res.c_hat) res.c_hat = res.samples[j].ratio(), res.argmin = j;
  }
  return res;
}

namespace detail {

inline Record sample_record(const std::string& label, const QISample& s) {
  Record r;
  r.set("label", label);
  for (std::size_t i = 0; i < s.p.factors.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    r.set("p" + k + "_t", s.p.factors[i].t).set("p" + k + "_s", s.p.factors[i].s);
    r.set("q" + k + "_t", s.q.factors[i].t).set("q" + k + "_s", s.q.factors[i].s);
  }
  r.set("product_distance", s.product_distance).set("spd_distance", s.spd_distance).set("ratio", s.ratio());
  return r;
}

}  // namespace detail

/// Quasi-isometry certificate. (a) every bin's max ratio is at most
/// `slack` times the largest bin max of an independent pilot run of the
/// same size; (b) the min ratio over d >= c_hat_floor is at least c_floor.
/// Ratios are also reported divided by sqrt 2, the n = 1 constant.
inline VerificationReport certify_qi(const ANEmbedding& e, const QISamplerConfig& cfg, std::uint64_t pilot_seed,
                                     double slack = 1.05, double c_floor = 0.05) {
  auto t0 = std::chrono::steady_clock::now();
  auto main = sample_qi(e, cfg);
  QISamplerConfig pcfg = cfg;
  pcfg.seed = pilot_seed;
  auto pilot = sample_qi(e, pcfg);
  double pilot_max = 0.0;
  for (const auto& b : pilot.bins) pilot_max = std::max(pilot_max, b.max_ratio);
  const double threshold = slack * pilot_max;
  const double root2 = std::sqrt(2.0);

  VerificationReport rep;
  rep.check_name = "symmetric.certify_qi.n" + std::to_string(e.n);
  rep.parameters.set("n", e.n).set("seed", cfg.seed).set("pilot_seed", pilot_seed).set("samples", cfg.samples);
  rep.parameters.set("d_min", cfg.d_min).set("d_max", cfg.d_max).set("c_hat_floor", cfg.c_hat_floor);
  rep.parameters.set("slack", slack).set("c_floor", c_floor);

  bool bounded = true;
  for (std::size_t b = 0; b < main.bins.size(); ++b) {
    const auto& bin = main.bins[b];
    bool ok = bin.max_ratio <= threshold;
    bounded = bounded && ok;
    Record row;
    row.set("lo", bin.lo).set("hi", bin.hi).set("count", bin.count).set("max_ratio", bin.max_ratio);
    row.set("min_ratio", bin.min_ratio).set("max_ratio_normalized", bin.max_ratio / root2);
    row.set("min_ratio_normalized", bin.min_ratio / root2).set("within_threshold", ok);
    rep.rows.push_back(std::move(row));
    if (!ok) rep.witnesses.push_back(detail::sample_record("bin_max_exceeds_threshold", main.samples[bin.argmax]));
  }
  const bool below = main.c_hat >= c_floor;
  rep.pass = bounded && below;
  rep.constants.set("lambda_hat", main.lambda_hat).set("c_hat", main.c_hat);
  rep.constants.set("lambda_hat_normalized", main.lambda_hat / root2).set("c_hat_normalized", main.c_hat / root2);
  rep.constants.set("pilot_max_ratio", pilot_max).set("threshold_max_ratio", threshold);
  rep.constants.set("normalization", root2);
  rep.witnesses.push_back(detail::sample_record("witness_max", main.samples[main.argmax]));
  rep.witnesses.push_back(detail::sample_record("witness_min", main.samples[main.argmin]));
  rep.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace detail {

inline double log_uniform(Stream& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

inline Record hyperbolic_pair_record(const std::string& label, const HyperbolicPoint& a, const HyperbolicPoint& b) {
  Record r;
  r.set("label", label).set("a_t", a.t).set("a_s", a.s).set("b_t", b.t).set("b_s", b.s);
  return r;
}

}  // namespace detail

/// n = 1: d_spd = sqrt 2 d_H on `samples` seeded pairs with d_H log-uniform
/// in [d_min, d_max], within tol (1 + d). Every tenth pair is also run
/// through the general SPD pipeline (embed, Cholesky, Jacobi).
inline VerificationReport certify_sl2_exactness(std::uint64_t seed, std::size_t samples = 1000, double d_min = 0.01,
                                                double d_max = 50.0, double tol = 1e-8) {
  auto t0 = std::chrono::steady_clock::now();
  const auto e = build_an_embedding(1);
  const double root2 = std::sqrt(2.0);
  double worst = -1.0, worst_general = 0.0;
  Record witness;
  for (std::size_t k = 0; k < samples; ++k) {
    Stream rng(derive_seed(seed, {0x51, k}));
    HyperbolicPoint a{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    HyperbolicPoint b = compose(a, displacement(detail::log_uniform(rng, d_min, d_max), rng.angle()));
    ProductPoint p{{a}}, q{{b}};
    const double dh = hyperbolic_distance(a, b);
    const double ds = an_distance(e, p, q);
    const double err = std::abs(ds - root2 * dh) / (1.0 + dh);
    if (err > worst) {
      worst = err;
      witness = detail::hyperbolic_pair_record("worst_error", a, b);
      witness.set("hyperbolic_distance", dh).set("spd_distance", ds).set("scaled_error", err);
    }
    if (k % 10 == 0) {
      const double dg = spd_distance(embed(e, p), embed(e, q));
      worst_general = std::max(worst_general, std::abs(dg - root2 * dh) / (1.0 + dh));
    }
  }
  VerificationReport rep;
  rep.check_name = "symmetric.sl2_exactness";
  rep.parameters.set("seed", seed).set("samples", samples).set("d_min", d_min).set("d_max", d_max).set("tol", tol);
  rep.constants.set("ratio", root2).set("max_scaled_error", worst).set("max_scaled_error_general", worst_general);
  rep.witnesses.push_back(std::move(witness));
  rep.pass = worst <= tol && worst_general <= tol;
  rep.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct RankOneEstimate {
  double delta_hat = 0.0;
  std::size_t argmax = 0;
  HyperbolicPoint a, b;
  RankOnePath worst;
};

/// max over seeded pairs of length - 3 d for the rank-one path, with d
/// log-uniform in [d_min, d_max] and a uniform direction.
inline RankOneEstimate estimate_rank_one_delta(std::uint64_t seed, std::size_t samples, double d_min = 0.01,
                                               double d_max = 50.0) {
  RankOneEstimate est;
  for (std::size_t k = 0; k < samples; ++k) {
    Stream rng(derive_seed(seed, {0x52, k}));
    HyperbolicPoint a{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    HyperbolicPoint b = compose(a, displacement(detail::log_uniform(rng, d_min, d_max), rng.angle()));
    auto path = rank_one_quasi_path(a, b);
    if (k == 0 || path.excess() > est.delta_hat) {
      est.delta_hat = path.excess();
      est.argmax = k;
      est.a = a;
      est.b = b;
      est.worst = path;
    }
  }
  return est;
}

/// delta_hat from two disjoint seeds must agree to within `stability`
/// (relative), and be finite.
inline VerificationReport certify_rank_one_path(std::uint64_t seed, std::uint64_t second_seed,
                                                std::size_t samples = 1000, double stability = 0.05) {
  auto t0 = std::chrono::steady_clock::now();
  auto first = estimate_rank_one_delta(seed, samples);
  auto second = estimate_rank_one_delta(second_seed, samples);
  const double delta = std::max(first.delta_hat, second.delta_hat);
  const double spread = std::abs(first.delta_hat - second.delta_hat) / std::max(std::abs(delta), 1e-300);
  VerificationReport rep;
  rep.check_name = "symmetric.rank_one_path";
  rep.parameters.set("seed", seed).set("second_seed", second_seed).set("samples", samples);
  rep.parameters.set("stability", stability);
  rep.constants.set("delta_hat", first.delta_hat).set("delta_hat_second_seed", second.delta_hat);
  rep.constants.set("relative_spread", spread);
  for (const auto* est : {&first, &second}) {
    auto w = detail::hyperbolic_pair_record(est == &first ? "witness_max_excess" : "witness_max_excess_second_seed",
                                            est->a, est->b);
    w.set("distance", est->worst.distance).set("length", est->worst.length).set("excess", est->worst.excess());
    rep.witnesses.push_back(std::move(w));
  }
  rep.pass = std::isfinite(delta) && spread <= stability;
  rep.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace qiembed
