#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "bustop/error.hpp"
#include "bustop/geo.hpp"
#include "bustop/mapenc.hpp"
#include "map_util.hpp"
#include "test_util.hpp"

using namespace bustop;
using namespace bustop::testing;

namespace {

const LatLon kCenter{23.5, 87.3};

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

Rgb noisy_paint(std::int64_t x, std::int64_t y) {
  static const Rgb palette[] = {kResidentialRgb, kNaturalRgb, kRoadRgb, kOtherRgb, {1, 2, 3}};
  const auto h = mix(static_cast<std::uint64_t>(x) * 1'000'003ULL + static_cast<std::uint64_t>(y));
  if (h % 50000 == 0) return kSpecialRgb;
  return palette[h % 5];
}

CompositeRaster raster_of(std::vector<Rgb> px, int w, int h) {
  CompositeRaster r;
  r.width = w;
  r.height = h;
  r.pixels = std::move(px);
  return r;
}

}  // namespace

TEST(Legend, JsonRoundTripAndLookup) {
  const auto legend = standard_legend();
  EXPECT_TRUE(legend.covers_all_classes());
  const auto back = Legend::from_json(legend.to_json());
  EXPECT_EQ(back.entries(), legend.entries());
  EXPECT_EQ(back.classify(kRoadRgb), LandmarkClass::Road);
  EXPECT_EQ(back.classify({9, 9, 9}), LandmarkClass::Other);
}

TEST(Legend, RejectsConflictingColors) {
  Legend l;
  l.add(kRoadRgb, LandmarkClass::Road);
  l.add(kRoadRgb, LandmarkClass::Road);
  EXPECT_EQ(l.entries().size(), 1u);
  EXPECT_THROW(l.add(kRoadRgb, LandmarkClass::Natural), Error);
  EXPECT_THROW(Legend::from_json(R"({"colors":[{"rgb":[1,2],"class":"Road"}]})"), Error);
  EXPECT_THROW(Legend::from_json(R"({"colors":[{"rgb":[1,2,3],"class":"Lake"}]})"), Error);
}

TEST(ClassifyPixels, HandPaintedRasters) {
  const auto legend = standard_legend();
  auto f = classify_pixels(raster_of(std::vector<Rgb>(16, kRoadRgb), 4, 4), legend);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(LandmarkClass::Road)], 1.0);

  std::vector<Rgb> half(16, kNaturalRgb);
  std::fill(half.begin(), half.begin() + 8, kResidentialRgb);
  f = classify_pixels(raster_of(half, 4, 4), legend);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(LandmarkClass::Residential)], 0.5);
  EXPECT_DOUBLE_EQ(f[static_cast<std::size_t>(LandmarkClass::Natural)], 0.5);

  // 10x10: 37 residential, 21 natural, 30 road, 2 special, 10 unknown colours.
  std::vector<Rgb> px;
  px.insert(px.end(), 37, kResidentialRgb);
  px.insert(px.end(), 21, kNaturalRgb);
  px.insert(px.end(), 30, kRoadRgb);
  px.insert(px.end(), 2, kSpecialRgb);
  px.insert(px.end(), 10, Rgb{7, 7, 7});
  f = classify_pixels(raster_of(px, 10, 10), legend);
  EXPECT_DOUBLE_EQ(f[0], 0.37);
  EXPECT_DOUBLE_EQ(f[1], 0.21);
  EXPECT_DOUBLE_EQ(f[2], 0.30);
  EXPECT_DOUBLE_EQ(f[3], 0.02);
  EXPECT_DOUBLE_EQ(f[4], 0.10);
}

TEST(ClassifyPixels, FractionsSumToOneAndIgnoreOrder) {
  const auto legend = standard_legend();
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rgb> px(400);
    for (auto& p : px) p = noisy_paint(static_cast<std::int64_t>(gen() % 1000), static_cast<std::int64_t>(gen() % 1000));
    const auto f = classify_pixels(raster_of(px, 20, 20), legend);
    double sum = 0;
    for (double v : f) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    std::shuffle(px.begin(), px.end(), gen);
    EXPECT_EQ(classify_pixels(raster_of(px, 20, 20), legend), f);
  }
}

TEST(SpatialFeatures, AllNatural) {
  auto store = TileStore::in_memory(standard_legend());
  paint_tiles(store, kCenter, 300, [](auto, auto) { return kNaturalRgb; });
  const auto s = spatial_features(store, kCenter);
  EXPECT_DOUBLE_EQ(s.residential_pct, 0.0);
  EXPECT_DOUBLE_EQ(s.natural_pct, 100.0);
  EXPECT_DOUBLE_EQ(s.road_pct, 0.0);
  EXPECT_EQ(s.highly_populated, 0);
}

TEST(SpatialFeatures, OneSpecialPixelSetsHighlyPopulated) {
  auto store = TileStore::in_memory(standard_legend());
  const auto box = query_box(kCenter, 300, 300, store.zoom());
  const auto sx = box.x0 + 5, sy = box.y0 + box.height - 1;
  paint_tiles(store, kCenter, 300, [&](std::int64_t x, std::int64_t y) {
    return x == sx && y == sy ? kSpecialRgb : kRoadRgb;
  });
  const auto s = spatial_features(store, kCenter);
  EXPECT_EQ(s.highly_populated, 1);
  EXPECT_LT(s.road_pct, 100.0);
}

TEST(SpatialFeatures, MatchesDirectCompositionOracle) {
  auto store = TileStore::in_memory(standard_legend());
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> off(-500, 500);
  for (int trial = 0; trial < 8; ++trial) {
    const LatLon c = offset_east(offset_north(kCenter, off(gen)), off(gen));
    paint_tiles(store, c, 300, noisy_paint);
    // Oracle: walk the box in world pixels without any tile arithmetic.
    const double mpp = 156543.03392 * std::cos(c.lat * kPi / 180.0) / (1 << 18);
    const auto w = std::lround(300 / mpp);
    const auto wx = static_cast<std::int64_t>(std::floor((c.lon + 180.0) / 360.0 * 256.0 * (1 << 18)));
    const double phi = c.lat * kPi / 180.0;
    const auto wy =
        static_cast<std::int64_t>(std::floor((1.0 - std::asinh(std::tan(phi)) / kPi) / 2.0 * 256.0 * (1 << 18)));
    std::array<double, 5> counts{};
    bool special = false;
    for (auto y = wy - w / 2; y < wy - w / 2 + w; ++y) {
      for (auto x = wx - w / 2; x < wx - w / 2 + w; ++x) {
        const auto cls = store.legend().classify(noisy_paint(x, y));
        counts[static_cast<std::size_t>(cls)] += 1;
        special |= cls == LandmarkClass::SpecialLandmark;
      }
    }
    const double total = static_cast<double>(w * w);
    const auto s = spatial_features(store, c);
    EXPECT_NEAR(s.residential_pct, 100 * counts[0] / total, 1e-9);
    EXPECT_NEAR(s.natural_pct, 100 * counts[1] / total, 1e-9);
    EXPECT_NEAR(s.road_pct, 100 * counts[2] / total, 1e-9);
    EXPECT_EQ(s.highly_populated, special ? 1 : 0);
  }
}

TEST(SpatialFeatures, PointsInTheSamePixelAgree) {
  auto store = TileStore::in_memory(standard_legend());
  paint_tiles(store, kCenter, 400, noisy_paint);
  const auto box = query_box(kCenter, 300, 300, store.zoom());
  // Nudge the centre by well under a pixel, in a direction that keeps the
  // floor of its world coordinate.
  const double px_x = world_pixel_x(kCenter.lon, 18);
  const double frac = px_x - std::floor(px_x);
  const double dlon = (0.5 - frac) * 360.0 / (256.0 * (1 << 18)) * 0.5;
  const LatLon moved{kCenter.lat, kCenter.lon + dlon};
  const auto box2 = query_box(moved, 300, 300, store.zoom());
  ASSERT_EQ(box.x0, box2.x0);
  ASSERT_EQ(box.y0, box2.y0);
  const auto a = spatial_features(store, kCenter), b = spatial_features(store, moved);
  EXPECT_EQ(a.residential_pct, b.residential_pct);
  EXPECT_EQ(a.natural_pct, b.natural_pct);
  EXPECT_EQ(a.road_pct, b.road_pct);
}

TEST(TileStore, MissingTileAndMissingList) {
  auto store = TileStore::in_memory(standard_legend());
  try {
    spatial_features(store, kCenter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingTile);
  }
  const auto need = covering_tiles(kCenter, 300, 300, 18);
  EXPECT_EQ(missing_tiles(store, {kCenter}).size(), need.size());
  paint_tiles(store, kCenter, 300, noisy_paint);
  EXPECT_TRUE(missing_tiles(store, {kCenter}).empty());
}

TEST(TileStore, SaveOpenAndPpmRoundTrip) {
  TempDir d("tiles");
  auto store = TileStore::in_memory(standard_legend());
  paint_tiles(store, kCenter, 300, noisy_paint);
  store.save(d.path());
  const auto disk = TileStore::open(d.path());
  for (const auto& k : store.cached_keys()) {
    ASSERT_TRUE(disk.has_tile(k.x, k.y));
    EXPECT_EQ(disk.tile(k.x, k.y).rgb, store.tile(k.x, k.y).rgb);
  }
  const auto a = spatial_features(store, kCenter), b = spatial_features(disk, kCenter);
  EXPECT_EQ(a.road_pct, b.road_pct);
  EXPECT_EQ(a.highly_populated, b.highly_populated);

  std::ofstream(d / "bad.ppm") << "P3\n256 256\n255\n";
  EXPECT_THROW(read_ppm_tile(d / "bad.ppm"), Error);
  EXPECT_THROW(read_ppm_tile(d / "absent.ppm"), Error);
}

TEST(Mercator, ResolutionAndBox) {
  EXPECT_NEAR(ground_resolution(0.0, 0), 156543.03392, 1e-6);
  EXPECT_NEAR(ground_resolution(60.0, 1), 156543.03392 / 4, 1e-6);
  EXPECT_NEAR(ground_resolution(23.5, 18), 0.5469, 1e-3);
  EXPECT_DOUBLE_EQ(world_pixel_x(0.0, 0), 128.0);
  EXPECT_NEAR(world_pixel_y(0.0, 0), 128.0, 1e-12);
  const auto box = query_box(kCenter, 300, 300, 18);
  EXPECT_EQ(box.width, std::lround(300 / ground_resolution(23.5, 18)));
  EXPECT_EQ(box.width, box.height);
  EXPECT_FALSE(covering_tiles(kCenter, 300, 300, 18).empty());
}
