#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bustop/error.hpp"
#include "bustop/learner.hpp"
#include "learn_util.hpp"

using namespace bustop;

namespace {

std::vector<Row> random_rows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-50, 50);
  std::vector<Row> rows(n);
  for (auto& r : rows) {
    for (auto& v : r) v = u(gen);
    r[feat::kHighlyPopulated] = gen() % 2;
    r[feat::kWifiStay] = 7.0;  // constant column
  }
  return rows;
}

}  // namespace

TEST(Smote, SyntheticPointsLieOnTheSegment) {
  const auto rows = random_rows(30, 1);
  Rng rng(2);
  const auto syn = smote(rows, 5, 500, rng);
  ASSERT_EQ(syn.size(), 500u);
  for (const auto& s : syn) {
    ASSERT_LT(s.base, rows.size());
    ASSERT_LT(s.neighbor, rows.size());
    EXPECT_NE(s.base, s.neighbor);
    EXPECT_GE(s.u, 0.0);
    EXPECT_LT(s.u, 1.0);
    const auto& a = rows[s.base];
    const auto& b = rows[s.neighbor];
    for (std::size_t f = 0; f + 1 < kNumFeatures; ++f) {
      EXPECT_NEAR(s.row[f], a[f] + s.u * (b[f] - a[f]), 1e-9);
    }
    EXPECT_EQ(s.row[feat::kWifiStay], 7.0);
    const double f13 = s.row[feat::kHighlyPopulated];
    EXPECT_TRUE(f13 == 0.0 || f13 == 1.0);
    EXPECT_EQ(f13, std::round(a[12] + s.u * (b[12] - a[12])));
  }
}

TEST(Smote, NeighbourIsAmongTheKNearestScaled) {
  const auto rows = random_rows(25, 3);
  // Independent scaled distances.
  Row lo = rows[0], hi = rows[0];
  for (const auto& r : rows)
    for (std::size_t f = 0; f < kNumFeatures; ++f) lo[f] = std::min(lo[f], r[f]), hi[f] = std::max(hi[f], r[f]);
  auto dist = [&](std::size_t i, std::size_t j) {
    double d = 0;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (hi[f] == lo[f]) continue;
      const double a = (rows[i][f] - lo[f]) / (hi[f] - lo[f]), b = (rows[j][f] - lo[f]) / (hi[f] - lo[f]);
      d += (a - b) * (a - b);
    }
    return d;
  };
  Rng rng(4);
  for (const auto& s : smote(rows, 3, 300, rng)) {
    std::size_t closer = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j != s.base && dist(s.base, j) < dist(s.base, s.neighbor)) ++closer;
    }
    EXPECT_LT(closer, 3u);
  }
}

TEST(Smote, KIsClampedToAvailableNeighbours) {
  const auto rows = random_rows(3, 5);
  Rng rng(6);
  for (const auto& s : smote(rows, 10, 50, rng)) EXPECT_NE(s.base, s.neighbor);
}

TEST(Smote, ZeroRequestedAndTooFewRows) {
  Rng rng(1);
  EXPECT_TRUE(smote(random_rows(5, 1), 5, 0, rng).empty());
  try {
    smote(random_rows(1, 1), 5, 10, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewMinoritySamples);
  }
}

TEST(Smote, DeterministicForASeed) {
  const auto rows = random_rows(20, 7);
  Rng a(9), b(9);
  const auto sa = smote(rows, 5, 40, a), sb = smote(rows, 5, 40, b);
  for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_EQ(sa[i].row, sb[i].row);
}

TEST(SmoteBalance, EqualisesClassCounts) {
  const auto s = bustop::testing::noise_set(200, 8, [](const Row& r) { return r[0] > 0.85; });
  const auto pos = s.positives();
  ASSERT_LT(pos, 100u);
  Rng rng(10);
  const auto b = smote_balance(s, 5, rng);
  EXPECT_EQ(b.positives(), b.size() - b.positives());
  EXPECT_EQ(b.size(), 2 * (s.size() - pos));
  // Originals come first, unchanged.
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(b.x[i], s.x[i]);
    EXPECT_EQ(b.y[i], s.y[i]);
  }
  for (std::size_t i = s.size(); i < b.size(); ++i) EXPECT_EQ(b.y[i], 1);

  // Positive majority oversamples negatives instead.
  const auto inv = bustop::testing::noise_set(100, 9, [](const Row& r) { return r[0] > 0.2; });
  const auto bi = smote_balance(inv, 5, rng);
  EXPECT_EQ(bi.positives() * 2, bi.size());
}
