#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bustop/error.hpp"
#include "bustop/features.hpp"
#include "bustop/geo.hpp"
#include "map_util.hpp"
#include "test_util.hpp"

using namespace bustop;
using namespace bustop::testing;

namespace {

constexpr TimeMs kT0 = 1'600'000'000'000;

// 80 s trip: moving at 10 m/s, then a 45 s stop at index 15, then moving.
TripTrace stop_trip(std::uint64_t seed = 1) {
  TripTrace tr;
  tr.trip_id = "T";
  LatLon pos{23.5, 87.3};
  for (int i = 0; i < 80; ++i) {
    const bool stopped = i >= 15 && i < 60;
    if (i > 0 && !stopped) pos = offset_north(pos, 10.0);
    tr.gps.push_back({pos.lat, pos.lon, kT0 + i * 1000, stopped ? 0.0 : 10.0});
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  for (TimeMs t = kT0; t < kT0 + 80'000; t += 10) tr.imu.push_back({t, n(gen), n(gen), 9.81 + n(gen)});
  tr.audio.t0 = kT0;
  std::uniform_int_distribution<int> a(-2000, 2000);
  tr.audio.samples.resize(80 * 8000);
  for (auto& s : tr.audio.samples) s = static_cast<std::int16_t>(a(gen));
  return tr;
}

StayLocation only_stay(const TripTrace& tr) {
  const auto stays = detect_stays(tr, {}, 330);
  EXPECT_EQ(stays.size(), 1u);
  return stays.at(0);
}

TileStore natural_store(LatLon c) {
  auto store = TileStore::in_memory(standard_legend());
  paint_tiles(store, c, 300, [](auto, auto) { return kNaturalRgb; });
  return store;
}

double frame_rms(std::span<const std::int16_t> s) {
  double acc = 0;
  for (auto v : s) acc += double(v) * v;
  return std::sqrt(acc / static_cast<double>(s.size()));
}

}  // namespace

TEST(Top5, SingleFrameSortsDescending) {
  Matrix m;
  m.rows = 1;
  m.cols = 13;
  m.data = {3, -1, 7, 0.5, 9, 2, -4, 8, 1, 6, -2, 4, 5};
  const auto top = top5_from_matrix(m);
  EXPECT_EQ(top, (std::array<double, 5>{9, 8, 7, 6, 5}));
}

TEST(Top5, MeansOverFramesThenSorts) {
  Matrix m;
  m.rows = 2;
  m.cols = 6;
  m.data = {1, 2, 3, 4, 5, 6, 3, 2, 1, 0, -1, 10};
  // Column means: 2, 2, 2, 2, 2, 8.
  EXPECT_EQ(top5_from_matrix(m), (std::array<double, 5>{8, 2, 2, 2, 2}));
}

TEST(Top5, PipelineMatchesDirectComputation) {
  const auto tr = stop_trip();
  const auto stay = only_stay(tr);
  const MfccExtractor ex(MfccConfig{});
  const auto top = top5_mfcc(tr, stay, ex);
  // Window runs from the first stopped record to one second past the last.
  const auto lo = static_cast<std::size_t>((stay.t_start - kT0) * 8);
  const auto hi = static_cast<std::size_t>((stay.t_end + 1000 - kT0) * 8);
  EXPECT_EQ(hi - lo, 45u * 8000u);
  const auto m = ex.compute(std::span<const std::int16_t>(tr.audio.samples).subspan(lo, hi - lo));
  std::vector<double> means(13);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < 13; ++c) means[c] += m(r, c) / static_cast<double>(m.rows);
  std::sort(means.rbegin(), means.rend());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(top[i], means[i], 1e-9);
  for (std::size_t i = 0; i + 1 < 5; ++i) EXPECT_GE(top[i], top[i + 1]);
}

TEST(Snr, ConstantAmplitudeIsZeroDb) {
  std::vector<std::int16_t> s(8000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 2 ? 1000 : -1000;
  EXPECT_NEAR(snr_db(s), 0.0, 1e-9);
}

TEST(Snr, HalfSilenceIsStronglyPositive) {
  std::vector<std::int16_t> s(16000, 0);
  for (std::size_t i = 8000; i < s.size(); ++i) s[i] = i % 2 ? 1000 : -1000;
  // Quiet frames floor at one quantisation step.
  EXPECT_NEAR(snr_db(s), 20 * std::log10(1000 / std::sqrt(2.0)), 1e-9);
}

TEST(Snr, MatchesFrameEnergyOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::int16_t> s(12000);
    std::uniform_int_distribution<int> d(-3000, 3000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double env = 0.1 + std::abs(std::sin(static_cast<double>(i) / 2000.0 + trial));
      s[i] = static_cast<std::int16_t>(d(gen) * env);
    }
    std::vector<double> fr;
    for (std::size_t f = 0; f * 80 + 200 <= s.size(); ++f) fr.push_back(frame_rms(std::span(s).subspan(f * 80, 200)));
    std::sort(fr.begin(), fr.end());
    const std::size_t q = fr.size() / 10;
    double noise = 0;
    for (std::size_t i = 0; i < q; ++i) noise += fr[i] / static_cast<double>(q);
    EXPECT_NEAR(snr_db(s), 20 * std::log10(frame_rms(s) / noise), 1e-9);
  }
  EXPECT_THROW(snr_db(std::vector<std::int16_t>(500, 1)), Error);
}

TEST(Wifi, CountsUniqueAccessPoints) {
  TripTrace tr = simple_trip(60, 0);
  tr.wifi = {
      {1000, {"a", "b"}},  {6000, {"b", "c"}},  {9000, {"d"}},        {10000, {"e", "f"}},
      {15000, {"e", "g"}}, {20000, {"h"}},      {21000, {"zz"}},
  };
  StayLocation prev, cur;
  prev.t_start = 2000;
  prev.t_end = 5000;
  cur.t_start = 10000;
  cur.t_end = 20000;
  EXPECT_EQ(wifi_count_at_stay(tr, cur), 4);      // e f g h
  EXPECT_EQ(wifi_count_on_edge(tr, &prev, cur), 3);  // b c d
  EXPECT_EQ(wifi_count_on_edge(tr, nullptr, cur), 4);  // a b c d
  StayLocation empty;
  empty.t_start = 40000;
  empty.t_end = 41000;
  EXPECT_EQ(wifi_count_at_stay(tr, empty), 0);
}

TEST(Rsi, KnownRatio) {
  const std::vector<double> r = {2, -2, 2, -2};
  const std::vector<double> v = {10, 10};
  EXPECT_DOUBLE_EQ(road_surface_index(r, v), 0.2);
  EXPECT_DOUBLE_EQ(road_surface_index(std::vector<double>(5, 0.0), v), 0.0);
  try {
    road_surface_index(r, std::vector<double>{0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMotionBeforeStay);
  }
  try {
    road_surface_index({}, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoImuInWindow);
  }
}

TEST(Rsi, ThroughTheTripContext) {
  // Vertical acceleration alternates 9.81 +/- 2 everywhere, so the trip mean
  // is exactly vertical and every residual is +/-2.
  auto tr = simple_trip(20);
  for (std::size_t i = 10; i < 20; ++i) {
    tr.gps[i].speed = 0;
    tr.gps[i].lat = tr.gps[10].lat;
  }
  for (std::size_t k = 0; k < tr.imu.size(); ++k) tr.imu[k].az = 9.81 + (k % 2 ? 2.0 : -2.0);
  if (tr.imu.size() % 2) tr.imu.pop_back();
  const auto stays = detect_stays(tr, {}, 0);
  ASSERT_EQ(stays.size(), 1u);
  const auto w = rsi_window(tr, stays[0]);
  EXPECT_GE(w.travelled_m, kRsiWindowMeters);
  EXPECT_EQ(w.t_begin, tr.gps[5].t);
  const TripContext ctx(tr);
  EXPECT_NEAR(rsi(ctx, stays[0]), 0.2, 1e-9);
}

TEST(Rsi, MatchesWindowOracle) {
  const auto tr = stop_trip(7);
  const auto stay = only_stay(tr);
  const TripContext ctx(tr);
  const auto w = rsi_window(tr, stay);
  EXPECT_EQ(w.t_end, stay.t_start);
  // The first stopped fix shares the position of the one before it, so six
  // fixes back at 10 m/s cover 50 m.
  EXPECT_EQ(w.t_begin, stay.t_start - 6000);
  double sq = 0;
  std::size_t n = 0;
  for (const auto& s : ctx.oriented_imu()) {
    if (s.t >= w.t_begin && s.t < w.t_end) {
      sq += (s.az - ctx.mean_z()) * (s.az - ctx.mean_z());
      ++n;
    }
  }
  EXPECT_NEAR(rsi(ctx, stay), std::sqrt(sq / static_cast<double>(n)) / 10.0, 1e-12);
}

TEST(Rsi, StayAtTripStartHasNoMotion) {
  auto tr = simple_trip(20);
  for (std::size_t i = 0; i < 5; ++i) {
    tr.gps[i].speed = 0;
    tr.gps[i].lat = tr.gps[0].lat;
  }
  const auto stays = detect_stays(tr, {}, 0);
  ASSERT_EQ(stays.size(), 1u);
  try {
    rsi(TripContext(tr), stays[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMotionBeforeStay);
  }
}

TEST(Rsi, MissingImuIsReported) {
  auto tr = stop_trip();
  const auto stay = only_stay(tr);
  tr.imu.resize(50);
  try {
    rsi(TripContext(tr), stay);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoImuInWindow);
  }
}

TEST(BuildFeatureVector, FullVector) {
  const auto tr = stop_trip();
  const auto stay = only_stay(tr);
  const auto store = natural_store(stay.centroid);
  const auto fv = build_feature_vector(tr, nullptr, stay, store);
  EXPECT_EQ(fv[feat::kStayDuration], 45.0);
  EXPECT_EQ(fv[feat::kNatural], 100.0);
  EXPECT_EQ(fv[feat::kHighlyPopulated], 0.0);
  EXPECT_GT(fv[feat::kRsi], 0.0);
  EXPECT_TRUE(fv.invariant_violations().empty());
}

TEST(BuildFeatureVector, MissingAudioNamesTheMfccGroup) {
  auto tr = stop_trip();
  const auto stay = only_stay(tr);
  tr.audio.samples.resize(1000);
  const auto store = natural_store(stay.centroid);
  try {
    build_feature_vector(tr, nullptr, stay, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFeature);
    EXPECT_NE(std::string(e.what()).find("f2..f6"), std::string::npos) << e.what();
    EXPECT_EQ(std::string(e.what()).find("f9"), std::string::npos) << e.what();
  }
  const auto res = featurize_trip(tr, {stay}, store);
  EXPECT_TRUE(res.rows.empty());
  ASSERT_EQ(res.skipped.size(), 1u);
  EXPECT_EQ(res.skipped[0].rfind(stay.stay_id + ": ", 0), 0u);
}

TEST(BuildFeatureVector, MissingTilesNameTheSpatialGroup) {
  const auto tr = stop_trip();
  const auto stay = only_stay(tr);
  const auto empty = TileStore::in_memory(standard_legend());
  try {
    build_feature_vector(tr, nullptr, stay, empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("f10..f13"), std::string::npos);
  }
}

TEST(FeatureVector, InvariantChecks) {
  FeatureVector fv;
  fv.values = {10, 5, 4, 3, 2, 1, 3, 4, 0.1, 20, 30, 40, 1};
  EXPECT_TRUE(fv.invariant_violations().empty());
  auto bad = fv;
  bad[2] = 6;  // f3 > f2
  EXPECT_FALSE(bad.invariant_violations().empty());
  bad = fv;
  bad[6] = 2.5;
  EXPECT_FALSE(bad.invariant_violations().empty());
  bad = fv;
  bad[9] = 50;  // f10+f11+f12 = 120
  EXPECT_FALSE(bad.invariant_violations().empty());
  bad = fv;
  bad[12] = 0.5;
  EXPECT_FALSE(bad.invariant_violations().empty());
  EXPECT_EQ(feature_name(0), "f1");
  EXPECT_EQ(feature_name(12), "f13");
}

TEST(FeaturesCsv, RoundTrip) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> d(0, 100);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 30; ++i) {
    FeatureRow r;
    r.stay_id = "T01-S" + std::to_string(i);
    for (auto& v : r.features.values) v = d(gen);
    r.labels = TypeSet::from_bits(static_cast<std::uint8_t>(gen() % 16));
    rows.push_back(r);
  }
  const auto back = features_from_csv(features_to_csv(rows));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].stay_id, rows[i].stay_id);
    EXPECT_EQ(back[i].features, rows[i].features);
    EXPECT_EQ(back[i].labels, rows[i].labels);
  }
  EXPECT_THROW(features_from_csv("stay_id,f1\nx,1\n"), Error);
}
