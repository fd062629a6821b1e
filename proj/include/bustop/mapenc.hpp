#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bustop/geo.hpp"

namespace bustop {

enum class LandmarkClass : std::uint8_t { Residential = 0, Natural, Road, SpecialLandmark, Other };
inline constexpr std::size_t kNumLandmarkClasses = 5;

std::string_view to_string(LandmarkClass c);
std::optional<LandmarkClass> parse_landmark_class(std::string_view name);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  constexpr std::uint32_t packed() const { return (std::uint32_t{r} << 16) | (std::uint32_t{g} << 8) | b; }
  bool operator==(const Rgb&) const = default;
};

// Exact-color legend. Colors not listed classify as Other.
class Legend {
 public:
  Legend() = default;
  // Throws Error(InvalidArgument) if one color maps to two classes.
  void add(Rgb color, LandmarkClass cls);
  LandmarkClass classify(Rgb color) const;
  // Every class has at least one color.
  bool covers_all_classes() const;
  const std::vector<std::pair<Rgb, LandmarkClass>>& entries() const { return entries_; }

  static Legend from_json(std::string_view text);
  std::string to_json() const;

 private:
  std::vector<std::pair<Rgb, LandmarkClass>> entries_;
  std::unordered_map<std::uint32_t, LandmarkClass> lookup_;
};

inline constexpr int kTileSize = 256;
inline constexpr int kDefaultZoom = 18;
inline constexpr double kDefaultBoxMeters = 300.0;

struct Tile {
  std::vector<std::uint8_t> rgb;  // kTileSize * kTileSize * 3, row-major

  Rgb pixel(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * kTileSize + static_cast<std::size_t>(x)) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

struct TileKey {
  int zoom = 0;
  std::int64_t x = 0, y = 0;
  auto operator<=>(const TileKey&) const = default;
};

// P6 PPM, 8-bit, kTileSize square.
Tile read_ppm_tile(const std::filesystem::path& path);
void write_ppm_tile(const Tile& tile, const std::filesystem::path& path);

// Web-Mercator helpers (256-pixel tiles).
double ground_resolution(double lat, int zoom);  // meters per pixel
double world_pixel_x(double lon, int zoom);
double world_pixel_y(double lat, int zoom);

// Store of rendered map tiles named <zoom>/<x>_<y>.ppm under `root`. Tiles
// are read lazily and cached; the store can also be filled in memory.
class TileStore {
 public:
  TileStore(std::filesystem::path root, Legend legend, int zoom = kDefaultZoom);
  // Loads legend.json from `root` (or its parent directory).
  static TileStore open(const std::filesystem::path& root, int zoom = kDefaultZoom);
  static TileStore in_memory(Legend legend, int zoom = kDefaultZoom);

  TileStore(TileStore&&) noexcept;
  TileStore& operator=(TileStore&&) noexcept;
  ~TileStore();

  int zoom() const { return zoom_; }
  const Legend& legend() const { return legend_; }
  const std::filesystem::path& root() const { return root_; }

  bool has_tile(std::int64_t x, std::int64_t y) const;
  // Throws Error(MissingTile).
  const Tile& tile(std::int64_t x, std::int64_t y) const;
  void put(std::int64_t x, std::int64_t y, Tile tile);
  // Writes every cached tile plus legend.json under `dir`.
  void save(const std::filesystem::path& dir) const;
  std::vector<TileKey> cached_keys() const;

 private:
  std::filesystem::path tile_path(std::int64_t x, std::int64_t y) const;

  std::filesystem::path root_;
  Legend legend_;
  int zoom_;
  mutable std::unique_ptr<std::mutex> mu_;
  mutable std::map<TileKey, Tile> cache_;
};

struct CompositeRaster {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major
  double meters_per_pixel = 0.0;

  Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

// Pixel footprint of an m x n meter box centred on `center`.
struct PixelBox {
  std::int64_t x0 = 0, y0 = 0;
  int width = 0, height = 0;
  double meters_per_pixel = 0.0;
};
PixelBox query_box(LatLon center, double m, double n, int zoom);
std::vector<TileKey> covering_tiles(LatLon center, double m, double n, int zoom);

CompositeRaster stitch_tiles(const TileStore& store, LatLon center, double m = kDefaultBoxMeters,
                             double n = kDefaultBoxMeters);

using ClassFractions = std::array<double, kNumLandmarkClasses>;

ClassFractions classify_pixels(const CompositeRaster& raster, const Legend& legend);

struct SpatialFeatures {
  double residential_pct = 0;  // f10
  double natural_pct = 0;      // f11
  double road_pct = 0;         // f12
  int highly_populated = 0;    // f13
};

SpatialFeatures spatial_features(const TileStore& store, LatLon centroid);

// Tiles referenced by the query boxes around `centers` that the store lacks.
std::vector<TileKey> missing_tiles(const TileStore& store, const std::vector<LatLon>& centers,
                                   double m = kDefaultBoxMeters, double n = kDefaultBoxMeters);

}  // namespace bustop
