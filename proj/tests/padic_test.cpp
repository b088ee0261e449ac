#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include <json.hpp>

#include "qiembed/padic_building.hpp"
#include "qiembed/random.hpp"

using namespace qiembed;

namespace {

QMatrix mat(std::initializer_list<std::initializer_list<Rational>> rows) {
  std::vector<QVector> r;
  for (auto row : rows) r.emplace_back(row);
  return QMatrix::from_rows(r);
}

// Oracle for homothety-class equality: p^k B^-1 B' lies in GL_3(Z_p) for
// some k, i.e. after removing the minimal valuation the determinant is a unit.
bool same_class_oracle(const QMatrix& b, const QMatrix& b2, int p) {
  const QMatrix m = *inverse(b) * b2;
  int e = kInfiniteValuation;
  for (const auto& x : m.data()) e = std::min(e, vp(x, p));
  return vp(determinant(m), p) == 3 * e;
}

// Oracle for the ball: every upper triangular integer matrix with diagonal
// p^{a_i}, a_i <= r, entries (i, j > i) in [0, p^{a_i}) and not all entries
// divisible by p; kept when its Smith exponents relative to Z_p^3 spread <= r.
std::set<LatticeClass> enumerate_ball(int p, int r) {
  std::set<LatticeClass> out;
  for (int a0 = 0; a0 <= r; ++a0)
    for (int a1 = 0; a1 <= r; ++a1)
      for (int a2 = 0; a2 <= r; ++a2) {
        const std::int64_t m0 = ipow(p, a0), m1 = ipow(p, a1);
        for (std::int64_t x01 = 0; x01 < m0; ++x01)
          for (std::int64_t x02 = 0; x02 < m0; ++x02)
            for (std::int64_t x12 = 0; x12 < m1; ++x12) {
              LatticeClass l;
              l.p = p;
              l.h = {m0, x01, x02, 0, m1, x12, 0, 0, ipow(p, a2)};
              bool primitive = false;
              for (auto v : l.h) primitive = primitive || (v % p != 0);
              if (!primitive) continue;
              // Smith exponents from gcds of minors
              const auto& h = l.h;
              int g1 = kInfiniteValuation, g2 = kInfiniteValuation;
              for (auto v : h) g1 = std::min(g1, vp(v, p));
              for (int r0 = 0; r0 < 3; ++r0)
                for (int r1 = r0 + 1; r1 < 3; ++r1)
                  for (int c0 = 0; c0 < 3; ++c0)
                    for (int c1 = c0 + 1; c1 < 3; ++c1)
                      g2 = std::min(g2, vp(h[static_cast<std::size_t>(r0 * 3 + c0)] * h[static_cast<std::size_t>(r1 * 3 + c1)] -
                                               h[static_cast<std::size_t>(r0 * 3 + c1)] * h[static_cast<std::size_t>(r1 * 3 + c0)],
                                           p));
              const int g3 = a0 + a1 + a2;
              if ((g3 - g2) - g1 <= r) out.insert(l);
            }
      }
  return out;
}

QMatrix random_unimodular(Stream& s, int p) {
  // product of elementary matrices with p-adic unit multipliers
  QMatrix m = QMatrix::identity(3);
  for (int k = 0; k < 6; ++k) {
    const auto i = static_cast<std::size_t>(s.next() % 3), j = static_cast<std::size_t>(s.next() % 3);
    QMatrix e = QMatrix::identity(3);
    if (i == j) {
      std::int64_t u = static_cast<std::int64_t>(s.next() % 5) + 1;
      if (u % p == 0) ++u;
      e(i, i) = (s.next() % 2) ? Rational(u) : Rational(1, u);
    } else {
      std::int64_t num = static_cast<std::int64_t>(s.next() % 7) - 3, den = static_cast<std::int64_t>(s.next() % 3) * 2 + 1;
      if (den % p == 0) den += 1;
      e(i, j) = Rational(num, den);
    }
    m = m * e;
  }
  return m;
}

}  // namespace

TEST(Lattice, CanonicalizeExamples) {
  auto base = canonicalize(QMatrix::identity(3), 2);
  EXPECT_EQ(base.type(), 0);
  EXPECT_EQ(base.h, (std::array<std::int64_t, 9>{1, 0, 0, 0, 1, 0, 0, 0, 1}));
  auto d = canonicalize(mat({{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 2);
  EXPECT_EQ(d.type(), 1);
  EXPECT_EQ(canonicalize(mat({{4, 0, 0}, {0, 2, 0}, {0, 0, 2}}), 2), d);
  EXPECT_EQ(canonicalize(mat({{Rational(1, 2), 0, 0}, {0, Rational(1, 4), 0}, {0, 0, Rational(1, 4)}}), 2), d);
  EXPECT_THROW(canonicalize(mat({{1, 2, 0}, {2, 4, 0}, {0, 0, 1}}), 2), SingularBasis);
}

TEST(Lattice, CanonicalFormAgreesWithClassOracle) {
  Stream s(derive_seed(7, {1}));
  for (int p : {2, 3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      QMatrix b(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b(i, j) = Rational(static_cast<std::int64_t>(s.next() % 9) - 4);
      if (determinant(b).is_zero()) continue;
      auto c = canonicalize(b, p);
      EXPECT_EQ(canonicalize(c.basis(), p), c);  // idempotent
      // unimodular change of basis and p-scaling keep the class
      const int k = static_cast<int>(s.next() % 5) - 2;
      QMatrix b2 = b * random_unimodular(s, p);
      for (auto i = 0u; i < 3; ++i)
        for (auto j = 0u; j < 3; ++j) b2(i, j) *= ppow(p, k);
      ASSERT_TRUE(same_class_oracle(b, b2, p));
      EXPECT_EQ(canonicalize(b2, p), c);
      // an arbitrary second lattice: equality of forms iff the oracle says so
      QMatrix b3(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b3(i, j) = Rational(static_cast<std::int64_t>(s.next() % 5) - 2);
      if (determinant(b3).is_zero()) continue;
      EXPECT_EQ(canonicalize(b3, p) == c, same_class_oracle(b, b3, p));
    }
  }
}

TEST(Lattice, NeighborsOfBase) {
  for (int p : {2, 3}) {
    auto base = canonicalize(QMatrix::identity(3), p);
    auto nbs = neighbors(base);
    std::set<LatticeClass> distinct(nbs.begin(), nbs.end());
    EXPECT_EQ(distinct.size(), static_cast<std::size_t>(2 * (p * p + p + 1)));
    for (const auto& n : nbs) {
      EXPECT_NE(n.type(), base.type());
      EXPECT_EQ(class_distance(base, n), 1);
      auto back = neighbors(n);
      EXPECT_NE(std::find(back.begin(), back.end(), base), back.end());
    }
  }
}

TEST(Ball, MatchesEnumerationOracleAndGolden) {
  std::ifstream in(QIEMBED_GOLDEN_DIR "/building_ball_sizes.json");
  ASSERT_TRUE(in.good());
  auto golden = nlohmann::json::parse(in);
  for (int r = 0; r <= 3; ++r) {
    auto ball = build_ball(2, r);
    auto oracle = enumerate_ball(2, r);
    std::set<LatticeClass> got(ball.vertices.begin(), ball.vertices.end());
    EXPECT_EQ(got.size(), ball.size());
    EXPECT_EQ(got, oracle) << "radius " << r;
    EXPECT_EQ(ball.size(), golden["p2"][static_cast<std::size_t>(r)].get<std::size_t>());
    auto rep = check_building_structure(ball);
    EXPECT_TRUE(rep.pass);
  }
  EXPECT_EQ(build_ball(2, 1).size(), 15u);
  EXPECT_EQ(build_ball(2, 0).size(), 1u);
  EXPECT_EQ(build_ball(3, 1).size(), 27u);
  EXPECT_THROW(build_ball(2, 5), RadiusTooLarge);
  EXPECT_THROW(build_ball(5, 1), ConfigError);
}

TEST(Ball, DeterministicOrder) {
  auto a = build_ball(2, 2), b = build_ball(2, 2);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.adjacency, b.adjacency);
}

TEST(Apartment, VertexExamples) {
  const int p = 2;
  EXPECT_EQ(apartment_vertex(0, 0, 0, p), canonicalize(QMatrix::identity(3), p));
  EXPECT_EQ(apartment_vertex(1, 0, 0, p), apartment_vertex(0, -1, -1, p));
  std::set<LatticeClass> seen;
  std::size_t count = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      seen.insert(apartment_vertex(a, b, 0, p));
      ++count;
    }
  EXPECT_EQ(seen.size(), count);
}

TEST(Projection, Examples) {
  const int p = 2;
  auto base = canonicalize(QMatrix::identity(3), p);
  LatticeClass2 base2 = LatticeClass2::from_generators({{1, 0}, {0, 1}}, p);
  EXPECT_EQ(projection_pi(1, base), base2);
  EXPECT_EQ(projection_pi(2, base), base2);
  auto l = canonicalize(mat({{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}), p);
  EXPECT_EQ(class_distance(projection_pi(2, l), base2), 1);
  EXPECT_EQ(projection_pi(1, l), base2);
  // pi_1 on F0 only sees the (a, c) exponents
  for (int a = -2; a <= 2; ++a)
    for (int c = -2; c <= 2; ++c)
      for (int b = -2; b <= 2; ++b) {
        EXPECT_EQ(projection_pi(1, apartment_vertex(a, b, c, p)), projection_pi(1, apartment_vertex(a, 0, c, p)));
        EXPECT_EQ(class_distance(projection_pi(1, apartment_vertex(a, b, c, p)), base2), std::abs(a - c));
      }
  EXPECT_THROW(projection_pi(3, base), ConfigError);
}

TEST(Projection, RayOracleAgreesOnRadiusTwo) {
  for (int p : {2, 3}) {
    auto rep = check_projection_oracle(build_ball(p, p == 2 ? 2 : 1), 2);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.constants.number("mismatches"), 0.0);
  }
}

TEST(XDelta, MarksAgreeWithDirectTest) {
  auto ball = x_delta_ball(2, 2, 2);
  for (std::size_t k = 0; k < ball.size(); ++k) EXPECT_EQ(ball.in_x_delta[k], in_x_delta_direct(ball.vertices[k]));
  // F0 and both parallel sets are marked; something is not
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      if (auto j = ball.find(apartment_vertex(a, b, 0, 2))) {
        EXPECT_TRUE(ball.in_x_delta[*j]);
      }
  EXPECT_NE(std::find(ball.in_x_delta.begin(), ball.in_x_delta.end(), false), ball.in_x_delta.end());
  // the unipotent witness of the base vertex neighborhood: span(e1 + e2) mod 2 is outside
  auto outside = canonicalize(mat({{2, 1, 0}, {0, 1, 0}, {0, 0, 2}}), 2);
  EXPECT_FALSE(in_x_delta_direct(outside));
}

TEST(XDelta, SmallValBoundIsIncomplete) {
  auto ball = x_delta_ball(2, 2, 0);
  std::size_t missing = 0;
  for (std::size_t k = 0; k < ball.size(); ++k) missing += !ball.in_x_delta[k] && in_x_delta_direct(ball.vertices[k]);
  EXPECT_GT(missing, 0u);
}

TEST(Certificate, RadiusThree) {
  auto ball = x_delta_ball(2, 3, 3);
  auto rep = certify_building_embedding(ball, 3, 2);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.constants.number("marked_collisions"), 0.0);
  EXPECT_EQ(rep.constants.number("lipschitz_violations"), 0.0);
  EXPECT_EQ(rep.constants.number("mark_mismatches"), 0.0);
  EXPECT_TRUE(std::get<bool>(*rep.constants.find("unmarked_collision_found")));
  EXPECT_NEAR(rep.constants.number("step1_max_ratio"), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_GT(rep.constants.number("lipschitz_upper"), 0.0);
  EXPECT_GT(rep.constants.number("lipschitz_lower"), 0.0);
  bool collision = false;
  for (const auto& w : rep.witnesses) collision = collision || std::get<std::string>(*w.find("label")) == "unmarked_collision";
  EXPECT_TRUE(collision);
  // thread count does not change the report
  auto rep1 = certify_building_embedding(ball, 3, 1);
  rep1.runtime_ms = rep.runtime_ms;
  EXPECT_EQ(rep1, rep);
}

TEST(Certificate, TrivialAndErrors) {
  auto zero = x_delta_ball(2, 0, 0);
  EXPECT_TRUE(certify_building_embedding(zero, 0).pass);
  auto ball = build_ball(2, 2);
  EXPECT_THROW(certify_building_embedding(ball, 2), ConfigError);
  ball.in_x_delta.assign(ball.size(), false);
  ball.in_x_delta[0] = true;
  ball.in_x_delta[ball.size() - 1] = true;
  EXPECT_THROW(certify_building_embedding(ball, 2), DisconnectedXDelta);
}
