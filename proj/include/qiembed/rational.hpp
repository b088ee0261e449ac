#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qiembed/errors.hpp"

namespace qiembed {

/// Exact rational number with 64-bit numerator/denominator.
///
/// Intermediate products are carried in 128 bits and every result is
/// reduced; anything that does not fit back into 64 bits throws
/// ArithmeticOverflow rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT implicit
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    // cross-reduce first to keep the 128-bit product small
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    __int128 n = static_cast<__int128>(a.num_ / g1) * (b.num_ / g2);
    __int128 d = static_cast<__int128>(a.den_ / g2) * (b.den_ / g1);
    return from_wide(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ArithmeticError("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  /// "num/den", always with an explicit denominator.
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  /// Accepts "n", "n/d" (with optional sign on n).
  static Rational parse(std::string_view s) {
    auto slash = s.find('/');
    auto to_i64 = [](std::string_view v) {
      if (v.empty()) throw ParseError("empty rational component");
      std::size_t pos = 0;
      std::string tmp(v);
      long long x = std::stoll(tmp, &pos);
      if (pos != tmp.size()) throw ParseError("bad rational: " + tmp);
      return static_cast<std::int64_t>(x);
    };
    if (slash == std::string_view::npos) return Rational(to_i64(s));
    return Rational(to_i64(s.substr(0, slash)), to_i64(s.substr(slash + 1)));
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ArithmeticError("rational with zero denominator");
    *this = from_wide(n, d);
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) throw ArithmeticOverflow("rational exceeds 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    if (r.num_ == 0) r.den_ = 1;
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace qiembed
