#include <gtest/gtest.h>

#include <random>

#include "bustop/error.hpp"
#include "bustop/learner.hpp"
#include "learn_util.hpp"

using namespace bustop;
using bustop::testing::noise_set;
using bustop::testing::predict_all;

namespace {

bool same_forest(const Forest& a, const Forest& b) {
  if (a.trees().size() != b.trees().size()) return false;
  for (std::size_t t = 0; t < a.trees().size(); ++t) {
    const auto &na = a.trees()[t].nodes(), &nb = b.trees()[t].nodes();
    if (na.size() != nb.size()) return false;
    for (std::size_t i = 0; i < na.size(); ++i) {
      if (na[i].feature != nb[i].feature || na[i].threshold != nb[i].threshold ||
          na[i].leaf_prob != nb[i].leaf_prob)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST(Forest, FitsASeparableSet) {
  const auto s = noise_set(50, 1, [](const Row& r) { return r[3] > 0.5; });
  ForestParams p;
  p.seed = 3;
  const auto f = train_forest(s, all_features(), p);
  EXPECT_EQ(f.trees().size(), 100u);
  EXPECT_DOUBLE_EQ(weighted_f1(predict_all(f, s), s.y), 1.0);
  EXPECT_LE(f.max_depth(), 8);
}

TEST(Forest, ThreadCountDoesNotChangeTheResult) {
  const auto s = noise_set(200, 2, [](const Row& r) { return r[0] * r[5] > 0.2; });
  ForestParams p;
  p.seed = 11;
  const auto one = train_forest(s, all_features(), p);
  p.threads = 4;
  const auto four = train_forest(s, all_features(), p);
  EXPECT_TRUE(same_forest(one, four));
  ASSERT_EQ(one.oob_votes().size(), s.size());
  EXPECT_EQ(one.oob_votes(), four.oob_votes());
  p.seed = 12;
  EXPECT_FALSE(same_forest(one, train_forest(s, all_features(), p)));
}

TEST(Forest, RespectsMaskAndDepth) {
  const auto s = noise_set(300, 3, [](const Row& r) { return r[0] > 0.5; });
  ForestParams p;
  p.max_depth = 3;
  const FeatureMask mask = {2, 4};
  const auto f = train_forest(s, mask, p);
  EXPECT_LE(f.max_depth(), 3);
  EXPECT_EQ(f.mask(), mask);
  for (const auto& t : f.trees())
    for (const auto& n : t.nodes()) EXPECT_TRUE(n.feature < 0 || n.feature == 2 || n.feature == 4);
}

TEST(Forest, OutOfBagVotesCoverMostRows) {
  const auto s = noise_set(100, 4, [](const Row& r) { return r[1] > 0.3; });
  const auto f = train_forest(s, all_features(), ForestParams{});
  std::size_t have = 0;
  for (const auto& v : f.oob_votes()) {
    if (!v) continue;
    ++have;
    EXPECT_GE(*v, 0.0);
    EXPECT_LE(*v, 1.0);
  }
  // P(row in every one of 100 bags) is negligible.
  EXPECT_EQ(have, s.size());
}

TEST(Forest, NeedsBothClasses) {
  const auto s = noise_set(20, 5, [](const Row&) { return true; });
  try {
    train_forest(s, all_features(), ForestParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClassDataset);
  }
  EXPECT_THROW(train_forest(BinarySet{}, all_features(), ForestParams{}), Error);
}

TEST(Importance, SingleInformativeFeatureDominates) {
  double worst_noise = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = noise_set(400, 100 + seed, [](const Row& r) { return r[0] > 0.5; });
    const auto imp = feature_importance(s, 100, seed);
    double sum = 0;
    for (double v : imp.values) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_GT(imp.values[0], 0.9);
    EXPECT_EQ(imp.ranking.front(), 0u);
    for (std::size_t f = 1; f < kNumFeatures; ++f) worst_noise = std::max(worst_noise, imp.values[f]);
  }
  EXPECT_LE(worst_noise, 0.25);
}

TEST(Importance, PureNoiseSpreadsAcrossFeatures) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 coin(seed);
    const auto s = noise_set(400, 200 + seed, [&](const Row&) { return coin() % 2 == 0; });
    const auto imp = feature_importance(s, 250, seed);
    for (double v : imp.values) worst = std::max(worst, v);
  }
  RecordProperty("max_noise_importance", std::to_string(worst));
  EXPECT_LE(worst, 0.25);
}

TEST(Importance, RankingIsStableOnTies) {
  // Nothing splits a constant-feature set, so every feature ties.
  BinarySet s;
  for (int i = 0; i < 10; ++i) s.push(Row{}, i % 2 == 0);
  const auto imp = feature_importance(s, 10, 1);
  EXPECT_EQ(imp.ranking, all_features());
  for (double v : imp.values) EXPECT_DOUBLE_EQ(v, 1.0 / 13.0);
}

TEST(SelectFeatures, OneInformativeFeature) {
  const auto s = noise_set(300, 7, [](const Row& r) { return r[8] > 0.5; });
  ForestParams p;
  p.seed = 1;
  const auto imp = feature_importance(s, 100, 2);
  const auto sel = select_features(s, imp, 8, p);
  EXPECT_EQ(sel.mask, FeatureMask{8});
  EXPECT_EQ(sel.oob_f1.size(), 8u);
  EXPECT_GT(sel.oob_f1[0], 0.97);
}

TEST(SelectFeatures, ManyWeakFeaturesUseTheFullBudget) {
  // Label is a vote over four features, so each extra one helps.
  const auto s = noise_set(600, 8, [](const Row& r) { return (r[0] > 0.5) + (r[1] > 0.5) + (r[2] > 0.5) + (r[3] > 0.5) >= 2; });
  ForestParams p;
  p.seed = 4;
  const auto imp = feature_importance(s, 100, 5);
  const auto sel = select_features(s, imp, 4, p);
  EXPECT_EQ(sel.mask, (FeatureMask{0, 1, 2, 3}));
}

TEST(SelectFeatures, KMaxOneKeepsTheTopFeature) {
  const auto s = noise_set(200, 9, [](const Row& r) { return r[5] + 0.5 * r[6] > 0.8; });
  const auto imp = feature_importance(s, 50, 3);
  const auto sel = select_features(s, imp, 1, ForestParams{});
  EXPECT_EQ(sel.mask, FeatureMask{imp.ranking.front()});
  EXPECT_EQ(sel.oob_f1.size(), 1u);
}

TEST(Masks, FormatAndAll) {
  EXPECT_EQ(all_features().size(), kNumFeatures);
  EXPECT_EQ(format_mask({0, 2, 8}), "f1,f3,f9");
  EXPECT_EQ(format_mask({}), "");
}
