#include <gtest/gtest.h>

#include "qiembed/rational.hpp"

using qiembed::Rational;

TEST(Rational, NormalizesSignAndGcd) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(0, 5).den(), 1);
}

TEST(Rational, FieldOperations) {
  Rational a(1, 3), b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_LT(b, a);
  EXPECT_THROW(a / Rational(0), qiembed::ArithmeticError);
}

TEST(Rational, OverflowIsReported) {
  Rational big(INT64_MAX / 2);
  EXPECT_THROW(big * Rational(4), qiembed::ArithmeticOverflow);
}

TEST(Rational, StringRoundTrip) {
  for (auto r : {Rational(-7, 3), Rational(5), Rational(0), Rational(1, 1024)}) {
    EXPECT_EQ(Rational::parse(r.str()), r);
  }
  EXPECT_EQ(Rational(3).str(), "3/1");
  EXPECT_THROW(Rational::parse("1/x"), std::exception);
}
