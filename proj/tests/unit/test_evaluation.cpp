#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "bustop/error.hpp"
#include "bustop/evaluation.hpp"
#include "dataset_util.hpp"

using namespace bustop;
using bustop::testing::quick_params;
using bustop::testing::rule_dataset;

TEST(StratifiedFolds, PartitionAndBalance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 23 + seed * 7;
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = (i * 7 + seed) % 5 == 0;
    Rng rng(seed);
    const auto folds = stratified_folds(y, 5, rng);
    ASSERT_EQ(folds.size(), 5u);
    std::multiset<std::size_t> all;
    std::size_t min_n = n, max_n = 0, min_p = n, max_p = 0;
    for (const auto& f : folds) {
      all.insert(f.begin(), f.end());
      std::size_t p = 0;
      for (auto i : f) p += y[i];
      min_n = std::min(min_n, f.size()), max_n = std::max(max_n, f.size());
      min_p = std::min(min_p, p), max_p = std::max(max_p, p);
    }
    EXPECT_EQ(all.size(), n);
    EXPECT_EQ(std::set<std::size_t>(all.begin(), all.end()).size(), n);
    EXPECT_LE(max_n - min_n, 1u);
    EXPECT_LE(max_p - min_p, 1u);
  }
}

TEST(CrossValidate, SeparableDataScoresPerfectly) {
  // Each type owns an interval of f10 with a gap to its neighbours, and no
  // other feature varies, so every binary task is separable.
  Dataset d;
  for (int i = 0; i < 200; ++i) {
    FeatureRow r;
    r.stay_id = std::to_string(i);
    const auto band = static_cast<std::size_t>(i % 5);
    r.features[feat::kResidential] = 20.0 * static_cast<double>(band) + 2.0 + (i * 37 % 160) / 10.0;
    r.labels.insert(kAllStayTypes[band]);
    d.rows.push_back(r);
  }
  const auto rep = cross_validate(d, {5, 2}, quick_params(), 3);
  for (const auto& s : rep.per_type) {
    EXPECT_DOUBLE_EQ(s.mean_f1, 1.0);
    EXPECT_DOUBLE_EQ(s.sd_f1, 0.0);
    EXPECT_EQ(s.fold_f1.size(), 10u);
    EXPECT_EQ(s.confusion.tp + s.confusion.fp + s.confusion.tn + s.confusion.fn, 400u);
  }
  // Only f10 carries signal, so the spatial group alone is enough.
  const auto abl = ablate_feature_groups(d, {5, 1}, quick_params(), 3);
  for (const auto& s : abl.spatial.per_type) EXPECT_DOUBLE_EQ(s.mean_f1, 1.0);
  EXPECT_LT(abl.temporal.per_type[0].mean_f1, 1.0);
}

TEST(CrossValidate, DeterministicAndSummarised) {
  const auto d = rule_dataset(150, 4);
  const auto a = cross_validate(d, {3, 2}, quick_params(), 8);
  const auto b = cross_validate(d, {3, 2}, quick_params(), 8);
  EXPECT_EQ(cv_report_to_csv(a), cv_report_to_csv(b));
  for (const auto& s : a.per_type) {
    ASSERT_EQ(s.fold_f1.size(), 6u);
    double mean = 0;
    for (double v : s.fold_f1) mean += v / 6.0;
    double ss = 0;
    for (double v : s.fold_f1) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(s.mean_f1, mean, 1e-12);
    EXPECT_NEAR(s.sd_f1, std::sqrt(ss / 5.0), 1e-12);
  }
  const auto csv = cv_report_to_csv(a, "full");
  EXPECT_EQ(csv.rfind("group,type,folds,repeats,mean_f1,sd_f1,tp,fp,tn,fn\n", 0), 0u);
  EXPECT_NE(csv.find("full,BusStop,3,2,"), std::string::npos);
  EXPECT_EQ(cv_report_to_csv(a, "x", false).find("group,"), std::string::npos);
}

TEST(CrossValidate, TooFewPositivesForTheFolds) {
  auto d = rule_dataset(60, 5);
  std::size_t seen = 0;
  std::erase_if(d.rows, [&](const FeatureRow& r) { return r.labels.contains(StayType::Turn) && ++seen > 3; });
  EXPECT_THROW(cross_validate(d, {5, 1}, quick_params(), 1), Error);
}

TEST(FeatureGroups, PartitionAllThirteen) {
  const auto s = spatial_mask(), t = temporal_mask();
  EXPECT_EQ(s, (FeatureMask{8, 9, 10, 11, 12}));
  EXPECT_EQ(t, (FeatureMask{0, 1, 2, 3, 4, 5, 6, 7}));
  std::set<std::size_t> all(s.begin(), s.end());
  all.insert(t.begin(), t.end());
  EXPECT_EQ(all.size(), kNumFeatures);
}

TEST(Holdout, SplitsEveryLabelGroup) {
  const auto d = rule_dataset(300, 6);
  const auto h = holdout_split(d, 0.7, 11);
  std::set<std::size_t> tr(h.train.begin(), h.train.end()), te(h.test.begin(), h.test.end());
  EXPECT_EQ(tr.size() + te.size(), d.rows.size());
  for (auto i : tr) EXPECT_EQ(te.count(i), 0u);
  std::map<std::uint8_t, std::pair<std::size_t, std::size_t>> groups;
  for (auto i : h.train) ++groups[d.rows[i].labels.bits()].first;
  for (auto i : h.test) ++groups[d.rows[i].labels.bits()].second;
  for (const auto& [bits, c] : groups) {
    const auto n = c.first + c.second;
    EXPECT_EQ(c.first, static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)))) << int(bits);
  }
  const auto again = holdout_split(d, 0.7, 11);
  EXPECT_EQ(again.train, h.train);
  EXPECT_THROW(holdout_split(d, 1.0, 1), Error);
}

TEST(EvaluateModel, ScoresAggregatedPredictions) {
  const auto d = rule_dataset(400, 7);
  const auto h = holdout_split(d, 0.7, 1);
  Dataset train;
  for (auto i : h.train) train.rows.push_back(d.rows[i]);
  std::vector<FeatureRow> test;
  for (auto i : h.test) test.push_back(d.rows[i]);
  const auto m = train_bustop(train, quick_params(), 2);
  const auto rep = evaluate_model(m, test);
  ASSERT_EQ(rep.predicted.size(), test.size());
  for (std::size_t t = 0; t < kNumStayTypes; ++t) {
    std::vector<std::uint8_t> p, y;
    for (std::size_t i = 0; i < test.size(); ++i) {
      p.push_back(rep.predicted[i].contains(kAllStayTypes[t]));
      y.push_back(test[i].labels.contains(kAllStayTypes[t]));
    }
    EXPECT_NEAR(rep.f1[t], weighted_f1(p, y), 1e-12);
    EXPECT_GT(rep.f1[t], 0.8);
  }
}
