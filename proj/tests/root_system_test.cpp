#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include "qiembed/root_system.hpp"

using namespace qiembed;

namespace {

// Independent oracle: close the full root set (both signs) under every
// reflection s_a(b) = b - 2(b,a)/(a,a) a, working purely in ambient
// coordinates, then keep the positive half by the sign of a generic
// linear functional built from the dual of the simple roots.
std::set<QVector, bool (*)(const QVector&, const QVector&)> ambient_closure(const RootSystem& r) {
  auto less = +[](const QVector& a, const QVector& b) { return a < b; };
  std::set<QVector, bool (*)(const QVector&, const QVector&)> all(less);
  std::vector<QVector> queue;
  for (const auto& s : r.simple_roots()) {
    all.insert(s.ambient);
    queue.push_back(s.ambient);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::vector<QVector> snapshot(all.begin(), all.end());
    for (const auto& a : snapshot) {
      const QVector& b = queue[head];
      QVector img = b - (Rational(2) * dot(b, a) / dot(a, a)) * a;
      if (all.insert(img).second) queue.push_back(img);
      QVector neg = Rational(-1) * img;
      if (all.insert(neg).second) queue.push_back(neg);
    }
  }
  return all;
}

SimpleCoords sc(std::initializer_list<std::int64_t> v) { return SimpleCoords(v); }

std::vector<SimpleCoords> coords_of(const std::vector<Root>& rs) {
  std::vector<SimpleCoords> out;
  for (const auto& r : rs) out.push_back(r.simple_coords);
  return out;
}

}  // namespace

TEST(CartanType, ParseAndValidate) {
  EXPECT_EQ(CartanType::parse("A3").name(), "A3");
  EXPECT_EQ(CartanType::parse("a1xa1").rank(), 2);
  EXPECT_THROW(CartanType('D', 3), IllegalType);
  EXPECT_THROW(CartanType('E', 9), IllegalType);
  EXPECT_THROW(CartanType('G', 3), IllegalType);
  EXPECT_THROW(CartanType('A', 0), IllegalType);
  EXPECT_THROW(CartanType::parse("Q2"), IllegalType);
}

TEST(EnumeratePositiveRoots, SmallExamples) {
  RootSystem a1(CartanType('A', 1));
  EXPECT_EQ(coords_of(a1.positive_roots()), (std::vector<SimpleCoords>{sc({1})}));

  RootSystem a2(CartanType('A', 2));
  EXPECT_EQ(coords_of(a2.positive_roots()), (std::vector<SimpleCoords>{sc({0, 1}), sc({1, 0}), sc({1, 1})}));

  RootSystem g2(CartanType('G', 2));
  // a short, b long: {a, b, a+b, 2a+b, 3a+b, 3a+2b}
  EXPECT_EQ(coords_of(g2.positive_roots()),
            (std::vector<SimpleCoords>{sc({0, 1}), sc({1, 0}), sc({1, 1}), sc({2, 1}), sc({3, 1}), sc({3, 2})}));
}

TEST(EnumeratePositiveRoots, MatchesClosureOracleAndClosedFormCounts) {
  std::vector<CartanType> types;
  for (int n = 1; n <= 7; ++n) types.emplace_back('A', n);
  for (int n = 2; n <= 7; ++n) types.emplace_back('B', n);
  for (int n = 2; n <= 7; ++n) types.emplace_back('C', n);
  for (int n = 4; n <= 7; ++n) types.emplace_back('D', n);
  for (int n = 6; n <= 8; ++n) types.emplace_back('E', n);
  types.emplace_back('F', 4);
  types.emplace_back('G', 2);
  types.push_back(CartanType::parse("A1xA1"));
  types.push_back(CartanType::parse("B2xG2"));
  for (const auto& t : types) {
    RootSystem r(t);
    SCOPED_TRACE(t.name());
    ASSERT_EQ(r.positive_roots().size(), positive_root_count(t));
    if (r.rank() <= 6) {
      auto oracle = ambient_closure(r);
      ASSERT_EQ(oracle.size(), 2 * r.positive_roots().size());
      for (const auto& p : r.positive_roots()) {
        EXPECT_TRUE(oracle.count(p.ambient));
        EXPECT_TRUE(oracle.count(Rational(-1) * p.ambient));
      }
    }
    // ambient = sum of simple coords * simple roots, and canonical order
    for (std::size_t i = 0; i < r.positive_roots().size(); ++i) {
      const auto& p = r.positive_roots()[i];
      std::vector<Rational> c(p.simple_coords.begin(), p.simple_coords.end());
      EXPECT_EQ(r.ambient_of(c), p.ambient);
      if (i > 0) {
        EXPECT_TRUE(canonical_less(r.positive_roots()[i - 1].simple_coords, p.simple_coords));
      }
    }
  }
}

TEST(EnumeratePositiveRoots, ClosedUnderReflectionsUpToSign) {
  for (auto t : {CartanType('B', 3), CartanType('F', 4), CartanType('G', 2), CartanType('D', 5)}) {
    RootSystem r(t);
    for (const auto& a : r.positive_roots())
      for (const auto& b : r.positive_roots()) {
        QVector img = b.ambient - (Rational(2) * dot(b.ambient, a.ambient) / dot(a.ambient, a.ambient)) * a.ambient;
        auto c = r.simple_coords_of(img);
        ASSERT_TRUE(c.has_value());
        SimpleCoords ic;
        for (auto& x : *c) {
          ASSERT_TRUE(x.is_integer());
          ic.push_back(x.num());
        }
        EXPECT_TRUE(r.is_root(ic)) << t.name();
      }
  }
}

TEST(DominanceOrder, Examples) {
  RootSystem a2(CartanType('A', 2));
  const auto& p2 = a2.positive_roots();  // a2, a1, a1+a2
  EXPECT_TRUE(dominance_leq(p2[1], p2[2], a2));
  EXPECT_FALSE(dominance_leq(p2[1], p2[0], a2));

  RootSystem a3(CartanType('A', 3));
  auto idx = [&](SimpleCoords c) { return a3.positive_roots()[*a3.positive_index(c)]; };
  EXPECT_FALSE(dominance_leq(idx({1, 1, 1}), idx({0, 1, 0}), a3));

  Root foreign{QVector{1, 1}, SimpleCoords{5, 5}};
  EXPECT_THROW(dominance_leq(foreign, p2[0], a2), RootNotInSystem);
}

TEST(DominanceOrder, IsPartialOrderExhaustively) {
  for (auto t : {CartanType('A', 5), CartanType('B', 5), CartanType('C', 4), CartanType('D', 5), CartanType('G', 2),
                 CartanType('F', 4)}) {
    RootSystem r(t);
    const auto& p = r.positive_roots();
    for (const auto& a : p) {
      EXPECT_TRUE(dominance_leq(a, a, r));
      for (const auto& b : p) {
        if (dominance_leq(a, b, r) && dominance_leq(b, a, r)) {
          EXPECT_EQ(a, b);
        }
        if (!dominance_leq(a, b, r)) continue;
        for (const auto& c : p)
          if (dominance_leq(b, c, r)) {
            EXPECT_TRUE(dominance_leq(a, c, r));
          }
      }
    }
  }
}

TEST(SelectStronglyCommutingRoots, SpecExamples) {
  EXPECT_EQ(coords_of(select_strongly_commuting_roots(RootSystem(CartanType('A', 2)))),
            (std::vector<SimpleCoords>{sc({1, 1}), sc({1, 0})}));
  EXPECT_EQ(coords_of(select_strongly_commuting_roots(RootSystem(CartanType('A', 3)))),
            (std::vector<SimpleCoords>{sc({1, 1, 1}), sc({1, 1, 0}), sc({0, 1, 1})}));
  EXPECT_EQ(coords_of(select_strongly_commuting_roots(RootSystem(CartanType('G', 2)))),
            (std::vector<SimpleCoords>{sc({3, 2}), sc({3, 1})}));
  EXPECT_EQ(coords_of(select_strongly_commuting_roots(RootSystem(CartanType::parse("A1xA1")))),
            (std::vector<SimpleCoords>{sc({1, 0}), sc({0, 1})}));
}

TEST(SelectStronglyCommutingRoots, PairwiseSumsAreNotRootsBruteForce) {
  // Brute force: sums are compared against the explicit list of all roots,
  // independent of the index used by is_root.
  auto check = [](const CartanType& t) {
    RootSystem r(t);
    auto sel = select_strongly_commuting_roots(r);
    ASSERT_EQ(sel.size(), static_cast<std::size_t>(r.rank()));
    std::vector<QVector> amb;
    for (auto& a : sel) amb.push_back(a.ambient);
    EXPECT_EQ(rank_of(amb), sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t j = i + 1; j < sel.size(); ++j) {
        QVector s = sel[i].ambient + sel[j].ambient;
        for (const auto& p : r.positive_roots()) {
          EXPECT_NE(s, p.ambient) << t.name();
          EXPECT_NE(s, Rational(-1) * p.ambient) << t.name();
        }
      }
    EXPECT_TRUE(is_sum_free_independent(sel, r));
    // the first root is the highest root for irreducible types
    if (t.irreducible()) {
      for (const auto& p : r.positive_roots()) EXPECT_TRUE(dominance_leq(p, sel.front(), r));
    }
  };
  for (int n = 1; n <= 7; ++n) check(CartanType('A', n));
  for (int n = 2; n <= 7; ++n) check(CartanType('B', n));
  for (int n = 2; n <= 7; ++n) check(CartanType('C', n));
  for (int n = 4; n <= 7; ++n) check(CartanType('D', n));
  for (int n = 6; n <= 8; ++n) check(CartanType('E', n));
  check(CartanType('F', 4));
  check(CartanType('G', 2));
}

TEST(IsSumFreeIndependent, Examples) {
  RootSystem a2(CartanType('A', 2));
  EXPECT_FALSE(is_sum_free_independent({a2.simple_roots()[0], a2.simple_roots()[1]}, a2));
  RootSystem a1(CartanType('A', 1));
  EXPECT_TRUE(is_sum_free_independent({a1.simple_roots()[0]}, a1));
  // dependent family
  EXPECT_FALSE(is_sum_free_independent({a2.simple_roots()[0], a2.simple_roots()[0]}, a2));
}
