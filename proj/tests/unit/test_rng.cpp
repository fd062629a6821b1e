#include <gtest/gtest.h>

#include <array>
#include <set>

#include "bustop/rng.hpp"

using bustop::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next() == b.next();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, DerivedStreamsAreDistinctAndReproducible) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t t = 0; t < 64; ++t) {
    Rng r = Rng::derive(9, {t});
    firsts.insert(r.next());
    EXPECT_EQ(Rng::derive(9, {t}).next(), Rng::derive(9, {t}).next());
  }
  EXPECT_EQ(firsts.size(), 64u);
  // Path order matters.
  EXPECT_NE(Rng::derive_seed(9, {1, 2}), Rng::derive_seed(9, {2, 1}));
  EXPECT_NE(Rng::derive_seed(9, {1}), Rng::derive_seed(9, {1, 0}));
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1 - 1e-3);
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng r(5);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  // Each bucket expects 10000; 5 sigma is about 450.
  for (int c : counts) EXPECT_NEAR(c, 10000, 450);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(Rng, SplitMixKnownValue) {
  // Reference output of SplitMix64 seeded with 0.
  std::uint64_t s = 0;
  EXPECT_EQ(bustop::splitmix64(s), 0xE220A8397B1DCDAFULL);
}
