#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace qiembed {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic sub-seed for a position in a sampling grid.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(seed);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ull));
  return s;
}

/// Small counter-based stream; all draws are computed from the bits
/// directly so results do not depend on the standard library's
/// distribution implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_++ * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential(1), used for Dirichlet splits.
  double exponential() { return -std::log1p(-uniform()); }

  double angle() { return 2.0 * std::numbers::pi * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace qiembed
