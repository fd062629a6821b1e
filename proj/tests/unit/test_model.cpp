#include <gtest/gtest.h>

#include "bustop/error.hpp"
#include "bustop/model.hpp"
#include "dataset_util.hpp"
#include "test_util.hpp"

using namespace bustop;
using bustop::testing::rule_dataset;

namespace {

std::array<bool, kNumStayTypes> votes(std::initializer_list<StayType> on) {
  std::array<bool, kNumStayTypes> v{};
  for (auto t : on) v[static_cast<std::size_t>(t)] = true;
  return v;
}

}  // namespace

TEST(Aggregate, RegularTypesWinOverAdHoc) {
  using enum StayType;
  EXPECT_EQ(aggregate_votes(votes({BusStop})), TypeSet{BusStop});
  EXPECT_EQ(aggregate_votes(votes({BusStop, Signal})), (TypeSet{BusStop, Signal}));
  EXPECT_EQ(aggregate_votes(votes({Turn, AdHoc})), TypeSet{Turn});
  EXPECT_EQ(aggregate_votes(votes({AdHoc})), TypeSet{AdHoc});
  EXPECT_EQ(aggregate_votes(votes({})), TypeSet{AdHoc});
  for (unsigned bits = 0; bits < 32; ++bits) {
    std::array<bool, kNumStayTypes> v{};
    for (std::size_t t = 0; t < kNumStayTypes; ++t) v[t] = bits & (1u << t);
    const auto s = aggregate_votes(v);
    EXPECT_FALSE(s.empty());
    EXPECT_TRUE(s.adhoc_exclusive());
  }
}

TEST(TrainBuStop, MasksAreSmallSortedAndUseful) {
  const auto data = rule_dataset(500, 1);
  TrainParams p;
  const auto m = train_bustop(data, p, 42);
  for (auto t : kAllStayTypes) {
    const auto& tm = m.at(t);
    EXPECT_EQ(tm.type, t);
    EXPECT_FALSE(tm.mask.empty());
    EXPECT_LE(tm.mask.size(), 8u);
    EXPECT_TRUE(std::is_sorted(tm.mask.begin(), tm.mask.end()));
    EXPECT_EQ(tm.oob_f1.size(), 8u);
    EXPECT_EQ(tm.forest.trees().size(), 100u);
  }
  auto has = [&](StayType t, std::size_t f) {
    const auto& mask = m.at(t).mask;
    return std::find(mask.begin(), mask.end(), f) != mask.end();
  };
  EXPECT_TRUE(has(StayType::BusStop, feat::kWifiStay));
  EXPECT_TRUE(has(StayType::Signal, feat::kRoad));
  EXPECT_TRUE(has(StayType::Congestion, feat::kStayDuration));
  EXPECT_TRUE(has(StayType::Turn, feat::kRsi));
}

TEST(TrainBuStop, DeterministicAndSerialisable) {
  const auto data = rule_dataset(200, 2);
  const auto p = bustop::testing::quick_params();
  const auto a = train_bustop(data, p, 9), b = train_bustop(data, p, 9);
  const auto ja = model_to_json(a);
  EXPECT_EQ(ja, model_to_json(b));
  EXPECT_NE(ja, model_to_json(train_bustop(data, p, 10)));

  const auto back = model_from_json(ja);
  EXPECT_EQ(model_to_json(back), ja);
  const auto probe = rule_dataset(300, 3);
  for (const auto& r : probe.rows) {
    EXPECT_EQ(predict_stay_types(back, r.features), predict_stay_types(a, r.features));
    EXPECT_EQ(poll_forests(back, r.features), poll_forests(a, r.features));
  }

  bustop::testing::TempDir d("model");
  write_model(a, d / "model.json");
  EXPECT_EQ(model_to_json(read_model(d / "model.json")), ja);
  EXPECT_THROW(model_from_json("{\"format\":\"other\"}"), Error);
}

TEST(TrainBuStop, PredictionsFollowTheRules) {
  const auto data = rule_dataset(600, 4);
  const auto m = train_bustop(data, bustop::testing::quick_params(), 5);
  const auto probe = rule_dataset(300, 6);
  std::size_t exact = 0;
  for (const auto& r : probe.rows) exact += predict_stay_types(m, r.features) == r.labels;
  EXPECT_GT(static_cast<double>(exact) / 300.0, 0.8);
}

TEST(TrainBuStop, FixedMaskSkipsSelection) {
  const auto data = rule_dataset(150, 7);
  const FeatureMask mask = {0, 6, 8, 11};
  const auto m = train_bustop(data, bustop::testing::quick_params(), 1, mask);
  for (auto t : kAllStayTypes) {
    EXPECT_EQ(m.at(t).mask, mask);
    EXPECT_TRUE(m.at(t).oob_f1.empty());
  }
}

TEST(TrainBuStop, NeedsTwoPositivesPerType) {
  auto data = rule_dataset(100, 8);
  // Keep exactly one Turn row.
  bool kept = false;
  std::vector<FeatureRow> rows;
  for (auto& r : data.rows) {
    if (r.labels.contains(StayType::Turn)) {
      if (kept) continue;
      kept = true;
    }
    rows.push_back(r);
  }
  data.rows = rows;
  try {
    train_bustop(data, bustop::testing::quick_params(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientClassSupport);
    EXPECT_NE(std::string(e.what()).find("Turn"), std::string::npos);
  }
}

TEST(TrainBuStop, RejectsBrokenLabels) {
  auto data = rule_dataset(50, 9);
  data.rows[0].labels = {StayType::AdHoc, StayType::BusStop};
  EXPECT_THROW(train_bustop(data, bustop::testing::quick_params(), 1), Error);
}
