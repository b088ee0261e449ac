#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qiembed/symmetric_space.hpp"

using namespace qiembed;

namespace {

// Independent oracle: textbook arccosh form with complex arithmetic.
double acosh_distance(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  std::complex<double> za(a.x(), a.y()), zb(b.x(), b.y());
  return std::acosh(1.0 + std::norm(za - zb) / (2.0 * za.imag() * zb.imag()));
}

SquareMatrix<double> to_double(const SquareMatrix<Real>& m) {
  SquareMatrix<double> d(m.n);
  for (std::size_t i = 0; i < m.a.size(); ++i) d.a[i] = static_cast<double>(m.a[i]);
  return d;
}

ProductPoint random_point(Stream& rng, int n, double range = 2.0) {
  ProductPoint p;
  for (int i = 0; i < n; ++i) p.factors.push_back({rng.uniform(-range, range), rng.uniform(-range, range)});
  return p;
}

}  // namespace

TEST(ANEmbedding, RankOneMatchesAffineMatrix) {
  auto e = build_an_embedding(1);
  EXPECT_EQ(e.X[0], (QVector{1, -1}));
  EXPECT_EQ(e.Z[0], (Elementary{0, 1}));
  auto g = to_double(an_element(e, ProductPoint{{{0.3, -0.7}}}));
  EXPECT_NEAR(g(0, 0), std::exp(0.3), 1e-15);
  EXPECT_NEAR(g(0, 1), -0.7 * std::exp(0.3), 1e-15);
  EXPECT_NEAR(g(1, 0), 0.0, 0.0);
  EXPECT_NEAR(g(1, 1), std::exp(-0.3), 1e-15);
}

TEST(ANEmbedding, RankTwoMatrices) {
  auto e = build_an_embedding(2);
  EXPECT_EQ(e.X[0], (QVector{Rational(2, 3), Rational(2, 3), Rational(-4, 3)}));
  EXPECT_EQ(e.X[1], (QVector{Rational(2, 3), Rational(-4, 3), Rational(2, 3)}));
  EXPECT_EQ(e.Z[0], (Elementary{0, 2}));
  EXPECT_EQ(e.Z[1], (Elementary{0, 1}));
}

TEST(ANEmbedding, InvariantsAllRanks) {
  for (int n = 1; n <= 6; ++n) {
    auto e = build_an_embedding(n);
    ASSERT_EQ(e.X.size(), static_cast<std::size_t>(n));
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    for (std::size_t i = 0; i < e.X.size(); ++i) {
      Rational tr;
      for (const auto& x : e.X[i]) tr += x;
      EXPECT_TRUE(tr.is_zero());
      for (std::size_t j = 0; j < e.Z.size(); ++j)
        EXPECT_EQ(e.X[i][e.Z[j].a] - e.X[i][e.Z[j].b], Rational(i == j ? 2 : 0)) << n;
    }
    // numerical commutation of exp(X_i) and exp(Z_j) = I + Z_j for i != j
    for (std::size_t i = 0; i < e.X.size(); ++i)
      for (std::size_t j = 0; j < e.Z.size(); ++j) {
        if (i == j) continue;
        SquareMatrix<double> ex(m), ez = SquareMatrix<double>::identity(m);
        for (std::size_t k = 0; k < m; ++k) ex(k, k) = std::exp(e.X[i][k].to_double());
        ez(e.Z[j].a, e.Z[j].b) = 1.0;
        auto l = ex * ez, r = ez * ex;
        for (std::size_t k = 0; k < m * m; ++k) EXPECT_NEAR(l.a[k], r.a[k], 1e-14);
      }
  }
  EXPECT_THROW(build_an_embedding(0), IllegalType);
  EXPECT_THROW(build_an_embedding(7), IllegalType);
}

TEST(Embed, Examples) {
  auto e = build_an_embedding(1);
  auto id = to_double(embed(e, ProductPoint{{{0.0, 0.0}}}).P);
  EXPECT_EQ(id(0, 0), 1.0);
  EXPECT_EQ(id(0, 1), 0.0);
  EXPECT_EQ(id(1, 1), 1.0);
  auto diag = to_double(embed(e, ProductPoint{{{0.8, 0.0}}}).P);
  EXPECT_NEAR(diag(0, 0), std::exp(1.6), 1e-14);
  EXPECT_NEAR(diag(1, 1), std::exp(-1.6), 1e-15);
  const double s = 1.7;
  auto shear = to_double(embed(e, ProductPoint{{{0.0, s}}}).P);
  EXPECT_NEAR(shear(0, 0), 1.0 + s * s, 1e-14);
  EXPECT_NEAR(shear(0, 1), s, 1e-15);
  EXPECT_NEAR(shear(1, 0), s, 1e-15);
  EXPECT_NEAR(shear(1, 1), 1.0, 1e-15);
}

TEST(Embed, OutputsAreValidSPD) {
  Stream rng(11);
  for (int n = 1; n <= 4; ++n) {
    auto e = build_an_embedding(n);
    for (int k = 0; k < 20; ++k) EXPECT_NO_THROW(validate_spd(embed(e, random_point(rng, n, 5.0))));
  }
  SPDPoint bad{SquareMatrix<Real>::identity(2)};
  bad.P(1, 1) = -1;
  EXPECT_THROW(validate_spd(bad), NotSPD);
  SPDPoint scaled{SquareMatrix<Real>::identity(2)};
  scaled.P(0, 0) = 2;
  EXPECT_THROW(validate_spd(scaled), NotSPD);
}

TEST(SpdDistance, Examples) {
  SPDPoint id{SquareMatrix<Real>::identity(2)};
  SPDPoint d{SquareMatrix<Real>::identity(2)};
  d.P(0, 0) = exp(Real(2));
  d.P(1, 1) = exp(Real(-2));
  EXPECT_NEAR(spd_distance(id, d), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(spd_distance(d, d), 0.0, 1e-14);
}

TEST(SpdDistance, SymmetryAndCongruenceInvariance) {
  Stream rng(3);
  auto e = build_an_embedding(3);
  for (int k = 0; k < 20; ++k) {
    auto p = embed(e, random_point(rng, 3));
    auto q = embed(e, random_point(rng, 3));
    const double d = spd_distance(p, q);
    EXPECT_NEAR(spd_distance(q, p), d, 1e-12 * (1 + d));
    // random unimodular g: unit lower-triangular times unit upper-triangular
    SquareMatrix<Real> lo = SquareMatrix<Real>::identity(4), up = SquareMatrix<Real>::identity(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        lo(i, j) = Real(rng.uniform(-1.0, 1.0));
        up(j, i) = Real(rng.uniform(-1.0, 1.0));
      }
    auto g = lo * up;
    SPDPoint gp{g * p.P * g.transpose()}, gq{g * q.P * g.transpose()};
    EXPECT_NEAR(spd_distance(gp, gq), d, 1e-10 * (1 + d));
  }
}

TEST(HyperbolicDistance, Examples) {
  EXPECT_NEAR(hyperbolic_distance({0, 0}, {1.25, 0}), 2.5, 1e-15);
  EXPECT_NEAR(hyperbolic_distance({0, 0}, {-3.0, 0}), 6.0, 1e-14);
  EXPECT_EQ(hyperbolic_distance({0.4, -2.0}, {0.4, -2.0}), 0.0);
  for (double s : {0.1, 1.0, 3.0, 40.0}) EXPECT_NEAR(hyperbolic_distance({0, 0}, {0, s}), std::acosh(1 + s * s / 2), 1e-13);
}

TEST(HyperbolicDistance, AgreesWithOracleAndExtendedPrecision) {
  Stream rng(17);
  for (int k = 0; k < 1000; ++k) {
    HyperbolicPoint a{rng.uniform(-2, 2), rng.uniform(-2, 2)}, b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double d = hyperbolic_distance(a, b);
    EXPECT_NEAR(d, acosh_distance(a, b), 1e-7 * (1 + d));
    EXPECT_NEAR(d, static_cast<double>(hyperbolic_distance_t(a, b)), 1e-14 * (1 + d));
    EXPECT_NEAR(d, hyperbolic_distance(b, a), 1e-14 * (1 + d));
  }
}

TEST(HyperbolicDistance, DisplacementHasRequestedLength) {
  Stream rng(5);
  for (int k = 0; k < 500; ++k) {
    const double d = std::exp(rng.uniform(std::log(0.01), std::log(64.0)));
    HyperbolicPoint base{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    auto q = compose(base, displacement(d, rng.angle()));
    EXPECT_NEAR(hyperbolic_distance(base, q), d, 1e-12 * (1 + d));
  }
}

TEST(HyperbolicDistance, LeftMultiplicationIsIsometry) {
  Stream rng(6);
  for (int k = 0; k < 200; ++k) {
    HyperbolicPoint g{rng.uniform(-2, 2), rng.uniform(-2, 2)}, a{rng.uniform(-2, 2), rng.uniform(-2, 2)},
        b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double d = hyperbolic_distance(a, b);
    EXPECT_NEAR(hyperbolic_distance(compose(g, a), compose(g, b)), d, 1e-12 * (1 + d));
  }
}

TEST(ProductDistance, IsSumOfFactors) {
  ProductPoint p{{{0, 0}, {0, 0}, {0, 0}}}, q{{{1, 0}, {0, 2}, {-0.5, 0}}};
  EXPECT_NEAR(product_distance(p, q), 2.0 + std::acosh(3.0) + 1.0, 1e-14);
}

TEST(AnDistance, MatchesGeneralSpdPipeline) {
  for (int n = 1; n <= 3; ++n) {
    auto e = build_an_embedding(n);
    Stream rng(100 + n);
    for (int k = 0; k < 40; ++k) {
      auto s = detail::draw_pair(e, rng, rng.uniform(0.5, 64.0));
      const double a = an_distance(e, s.p, s.q);
      const double g = spd_distance(embed(e, s.p), embed(e, s.q));
      EXPECT_NEAR(a, g, 1e-10 * g) << n;
    }
  }
}

TEST(AnDistance, HighPrecisionReferenceAtLargeDistance) {
  using R400 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<400>, boost::multiprecision::et_off>;
  auto e = build_an_embedding(2);
  Stream rng(77);
  for (int k = 0; k < 5; ++k) {
    auto s = detail::draw_pair(e, rng, 64.0);
    // two-sided Jacobi at 400 bits on P^-1/2 Q P^-1/2
    auto to400 = [](const SPDPoint& p) {
      SquareMatrix<R400> m(p.P.n);
      for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] = static_cast<R400>(p.P.a[i]);
      return m;
    };
    auto P = to400(embed(e, s.p)), Q = to400(embed(e, s.q));
    auto ev = jacobi_eigenvalues(congruence_inverse(cholesky(P), Q));
    R400 acc = 0;
    for (auto& v : ev) acc += log(v) * log(v);
    const double ref = static_cast<double>(sqrt(acc));
    EXPECT_NEAR(an_distance(e, s.p, s.q), ref, 1e-12 * ref);
  }
}

TEST(Invariants, SL2Exactness) {
  auto e = build_an_embedding(1);
  Stream rng(2024);
  for (int k = 0; k < 1000; ++k) {
    HyperbolicPoint a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    auto b = compose(a, displacement(std::exp(rng.uniform(std::log(0.01), std::log(50.0))), rng.angle()));
    const double dh = hyperbolic_distance(a, b);
    EXPECT_LE(std::abs(an_distance(e, {{a}}, {{b}}) - std::sqrt(2.0) * dh), 1e-8 * (1 + dh));
  }
}

TEST(Invariants, LeftInvariance) {
  Stream rng(8);
  for (int n = 2; n <= 3; ++n) {
    auto e = build_an_embedding(n);
    for (int k = 0; k < 100; ++k) {
      auto h = random_point(rng, n), p = random_point(rng, n), q = random_point(rng, n);
      const double d = an_distance(e, p, q);
      EXPECT_NEAR(an_distance(e, compose(h, p), compose(h, q)), d, 1e-8 * (1 + d));
      if (k % 10 == 0) {
        const double g = spd_distance(embed(e, compose(h, p)), embed(e, compose(h, q)));
        EXPECT_NEAR(g, d, 1e-8 * (1 + d));
      }
    }
  }
}

TEST(Invariants, SingleFactorClosedForm) {
  Stream rng(9);
  for (int n = 1; n <= 4; ++n) {
    auto e = build_an_embedding(n);
    ProductPoint base;
    base.factors.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
      for (int k = 0; k < 10; ++k) {
        HyperbolicPoint h{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        auto p = base;
        p.factors[i] = h;
        const double d = spd_distance(embed(e, base), embed(e, p));
        EXPECT_NEAR(d, single_factor_closed_form(e, i, h), 1e-8 * (1 + d));
        // pure translations in one factor are scaled isometries
        auto tr = base;
        tr.factors[i] = {0.0, h.s};
        EXPECT_NEAR(spd_distance(embed(e, base), embed(e, tr)), std::sqrt(2.0) * hyperbolic_distance({}, {0.0, h.s}),
                    1e-8);
      }
  }
}

TEST(Invariants, TriangleInequality) {
  Stream rng(10);
  auto e = build_an_embedding(2);
  for (int k = 0; k < 1000; ++k) {
    auto a = random_point(rng, 2, 4.0), b = random_point(rng, 2, 4.0), c = random_point(rng, 2, 4.0);
    EXPECT_LE(an_distance(e, a, c), an_distance(e, a, b) + an_distance(e, b, c) + 1e-9);
  }
}

TEST(CertifyQI, DyadicBins) {
  auto b = dyadic_bins(1.0, 64.0);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(b.front(), (std::pair<double, double>{1.0, 2.0}));
  EXPECT_EQ(b.back(), (std::pair<double, double>{32.0, 64.0}));
  auto c = dyadic_bins(1.0, 5.0);
  EXPECT_EQ(c.back(), (std::pair<double, double>{4.0, 5.0}));
  EXPECT_THROW(dyadic_bins(0.0, 1.0), ConfigError);
}

TEST(CertifyQI, RankOneRatiosAreRootTwo) {
  auto e = build_an_embedding(1);
  QISamplerConfig cfg;
  cfg.samples = 300;
  auto r = sample_qi(e, cfg);
  for (const auto& s : r.samples) EXPECT_NEAR(s.ratio(), std::sqrt(2.0), 1e-8);
}

TEST(CertifyQI, DeterministicAcrossThreadCounts) {
  auto e = build_an_embedding(2);
  QISamplerConfig cfg;
  cfg.samples = 600;
  cfg.seed = 99;
  auto r1 = certify_qi(e, cfg, 100);
  cfg.threads = 4;
  auto r4 = certify_qi(e, cfg, 100);
  r1.runtime_ms = r4.runtime_ms = 0;
  EXPECT_EQ(emit_json({r1}), emit_json({r4}));
  EXPECT_EQ(r1, r4);
}

TEST(CertifyQI, RankTwoBoundedRatios) {
  auto e = build_an_embedding(2);
  QISamplerConfig cfg;
  cfg.samples = 1200;
  auto rep = certify_qi(e, cfg, 2);
  EXPECT_TRUE(rep.pass);
  // supremum over single-factor vertical moves: sqrt(2 + 4 |Y|^2 / 4) = sqrt(8/3)
  EXPECT_LE(rep.constants.number("lambda_hat"), std::sqrt(8.0 / 3.0) + 1e-9);
  EXPECT_GE(rep.constants.number("c_hat"), 0.05);
  EXPECT_EQ(rep.rows.size(), 6u);
}

TEST(CertifyQI, EmptyBinWhenTooFewSamples) {
  auto e = build_an_embedding(2);
  QISamplerConfig cfg;
  cfg.samples = 3;
  EXPECT_THROW(sample_qi(e, cfg), EmptyBin);
}

TEST(RankOnePath, DegenerateAndVertical) {
  auto same = rank_one_quasi_path({0.3, 1.0}, {0.3, 1.0});
  EXPECT_NEAR(same.length, 0.0, 1e-15);
  auto vert = rank_one_quasi_path({0, 0}, {0.5, 0});
  EXPECT_NEAR(vert.distance, 1.0, 1e-15);
  EXPECT_NEAR(vert.length, 1.0, 1e-15);
  // orientation does not matter
  auto swapped = rank_one_quasi_path({0.5, 0}, {0, 0});
  EXPECT_NEAR(swapped.length, vert.length, 1e-15);
}

TEST(RankOnePath, SameHorocycle) {
  for (double s : {0.01, 0.5, 1.0, 5.0, 100.0, 1e4}) {
    HyperbolicPoint a{0, 0}, b{0, s};
    auto p = rank_one_quasi_path(a, b);
    // x'' and y'' lie on a common horocycle at height e^d, so their distance
    // is the horizontal distance s e^-d at that height
    const double top = hyperbolic_distance({0.5 * p.distance, 0}, {0.5 * p.distance, s * std::exp(-p.distance)});
    EXPECT_NEAR(p.length, 2.0 * p.distance + top, 1e-9 * (1 + p.length));
    EXPECT_LE(p.excess(), 2.0 * top + 1e-12);
    EXPECT_LE(top, 2.0);
  }
}

TEST(RankOnePath, LengthBetweenDistanceAndThreeDistancePlusDelta) {
  Stream rng(12);
  for (int k = 0; k < 2000; ++k) {
    HyperbolicPoint a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    auto b = compose(a, displacement(std::exp(rng.uniform(std::log(0.01), std::log(50.0))), rng.angle()));
    auto p = rank_one_quasi_path(a, b);
    EXPECT_GE(p.length, p.distance * (1 - 1e-12) - 1e-12);
    EXPECT_LE(p.excess(), 0.01);
    EXPECT_NEAR(p.x_prime.imag(), p.y.imag(), 1e-12 * p.y.imag());
    EXPECT_NEAR(p.x_second.real(), p.x.real(), 1e-9 * (1 + std::abs(p.x.real())));
  }
}

TEST(RankOnePath, DeltaStableAcrossSeeds) {
  auto a = estimate_rank_one_delta(1, 1000), b = estimate_rank_one_delta(2, 1000);
  EXPECT_GT(a.delta_hat, 0.0);
  EXPECT_NEAR(a.delta_hat, b.delta_hat, 0.05 * std::max(a.delta_hat, b.delta_hat));
}

TEST(Reports, Sl2AndRankOneChecksPass) {
  EXPECT_TRUE(certify_sl2_exactness(3, 200).pass);
  EXPECT_TRUE(certify_rank_one_path(3, 4).pass);
}
