#include "bustop/mapenc.hpp"

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "bustop/error.hpp"
#include "text_util.hpp"

namespace bustop {

namespace fs = std::filesystem;

std::string_view to_string(LandmarkClass c) {
  switch (c) {
    case LandmarkClass::Residential: return "Residential";
    case LandmarkClass::Natural: return "Natural";
    case LandmarkClass::Road: return "Road";
    case LandmarkClass::SpecialLandmark: return "SpecialLandmark";
    case LandmarkClass::Other: return "Other";
  }
  return "?";
}

std::optional<LandmarkClass> parse_landmark_class(std::string_view name) {
  for (std::size_t i = 0; i < kNumLandmarkClasses; ++i) {
    const auto c = static_cast<LandmarkClass>(i);
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void Legend::add(Rgb color, LandmarkClass cls) {
  const auto [it, inserted] = lookup_.emplace(color.packed(), cls);
  if (!inserted) {
    if (it->second != cls) {
      throw Error(ErrorCode::InvalidArgument, "legend color mapped to two classes");
    }
    return;
  }
  entries_.emplace_back(color, cls);
}

LandmarkClass Legend::classify(Rgb color) const {
  const auto it = lookup_.find(color.packed());
  return it == lookup_.end() ? LandmarkClass::Other : it->second;
}

bool Legend::covers_all_classes() const {
  std::set<LandmarkClass> seen;
  for (const auto& [_, c] : entries_) seen.insert(c);
  return seen.size() == kNumLandmarkClasses;
}

Legend Legend::from_json(std::string_view text) {
  Legend legend;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& e : j.at("colors")) {
      const auto& rgb = e.at("rgb");
      if (rgb.size() != 3) throw Error(ErrorCode::MalformedRecord, "legend rgb must have 3 components");
      const auto cls = parse_landmark_class(e.at("class").get<std::string>());
      if (!cls) throw Error(ErrorCode::MalformedRecord, "legend: unknown class " + e.at("class").dump());
      legend.add({rgb[0].get<std::uint8_t>(), rgb[1].get<std::uint8_t>(), rgb[2].get<std::uint8_t>()}, *cls);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("legend.json: ") + e.what());
  }
  return legend;
}

std::string Legend::to_json() const {
  nlohmann::json colors = nlohmann::json::array();
  for (const auto& [rgb, cls] : entries_) {
    colors.push_back({{"rgb", {rgb.r, rgb.g, rgb.b}}, {"class", std::string(to_string(cls))}});
  }
  return nlohmann::json{{"colors", colors}}.dump(1) + "\n";
}

Tile read_ppm_tile(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
  const auto bytes = detail::read_file(path);
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const auto start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string_view(bytes).substr(start, pos - start);
  };
  const auto magic = token();
  int w = 0, h = 0, maxval = 0;
  if (magic != "P6" || !detail::parse_number(token(), w) || !detail::parse_number(token(), h) ||
      !detail::parse_number(token(), maxval)) {
    throw Error(ErrorCode::MalformedRecord, path.string() + ": not a binary PPM");
  }
  if (w != kTileSize || h != kTileSize || maxval != 255) {
    throw Error(ErrorCode::MalformedRecord, path.string() + ": tiles must be 256x256, 8-bit");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(kTileSize) * kTileSize * 3;
  if (bytes.size() < pos + n) throw Error(ErrorCode::MalformedRecord, path.string() + ": truncated pixel data");
  Tile t;
  t.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return t;
}

void write_ppm_tile(const Tile& tile, const fs::path& path) {
  std::string out = "P6\n256 256\n255\n";
  out.append(reinterpret_cast<const char*>(tile.rgb.data()), tile.rgb.size());
  detail::write_file(path, out);
}

double ground_resolution(double lat, int zoom) {
  return 156543.03392 * std::cos(lat * kPi / 180.0) / std::ldexp(1.0, zoom);
}

double world_pixel_x(double lon, int zoom) {
  return (lon + 180.0) / 360.0 * kTileSize * std::ldexp(1.0, zoom);
}

double world_pixel_y(double lat, int zoom) {
  const double phi = lat * kPi / 180.0;
  return (1.0 - std::asinh(std::tan(phi)) / kPi) / 2.0 * kTileSize * std::ldexp(1.0, zoom);
}

TileStore::TileStore(fs::path root, Legend legend, int zoom)
    : root_(std::move(root)), legend_(std::move(legend)), zoom_(zoom), mu_(std::make_unique<std::mutex>()) {}

TileStore::TileStore(TileStore&&) noexcept = default;
TileStore& TileStore::operator=(TileStore&&) noexcept = default;
TileStore::~TileStore() = default;

TileStore TileStore::open(const fs::path& root, int zoom) {
  fs::path legend_path = root / "legend.json";
  if (!fs::exists(legend_path)) legend_path = root.parent_path() / "legend.json";
  if (!fs::exists(legend_path)) throw Error(ErrorCode::MissingFile, (root / "legend.json").string());
  auto legend = Legend::from_json(detail::read_file(legend_path));
  if (!legend.covers_all_classes()) {
    throw Error(ErrorCode::MalformedRecord, "legend.json must list a color for every landmark class");
  }
  return TileStore(root, std::move(legend), zoom);
}

TileStore TileStore::in_memory(Legend legend, int zoom) { return TileStore({}, std::move(legend), zoom); }

fs::path TileStore::tile_path(std::int64_t x, std::int64_t y) const {
  return root_ / std::to_string(zoom_) / (std::to_string(x) + "_" + std::to_string(y) + ".ppm");
}

bool TileStore::has_tile(std::int64_t x, std::int64_t y) const {
  {
    std::lock_guard lock(*mu_);
    if (cache_.count({zoom_, x, y})) return true;
  }
  return !root_.empty() && fs::exists(tile_path(x, y));
}

const Tile& TileStore::tile(std::int64_t x, std::int64_t y) const {
  std::lock_guard lock(*mu_);
  const TileKey key{zoom_, x, y};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const auto path = tile_path(x, y);
  if (root_.empty() || !fs::exists(path)) {
    throw Error(ErrorCode::MissingTile,
                "x=" + std::to_string(x) + " y=" + std::to_string(y) + " zoom=" + std::to_string(zoom_));
  }
  return cache_.emplace(key, read_ppm_tile(path)).first->second;
}

void TileStore::put(std::int64_t x, std::int64_t y, Tile tile) {
  std::lock_guard lock(*mu_);
  cache_[{zoom_, x, y}] = std::move(tile);
}

void TileStore::save(const fs::path& dir) const {
  std::lock_guard lock(*mu_);
  fs::create_directories(dir / std::to_string(zoom_));
  for (const auto& [key, tile] : cache_) {
    write_ppm_tile(tile, dir / std::to_string(key.zoom) / (std::to_string(key.x) + "_" + std::to_string(key.y) + ".ppm"));
  }
  detail::write_file(dir / "legend.json", legend_.to_json());
}

std::vector<TileKey> TileStore::cached_keys() const {
  std::lock_guard lock(*mu_);
  std::vector<TileKey> keys;
  for (const auto& [k, _] : cache_) keys.push_back(k);
  return keys;
}

PixelBox query_box(LatLon center, double m, double n, int zoom) {
  PixelBox box;
  box.meters_per_pixel = ground_resolution(center.lat, zoom);
  box.width = static_cast<int>(std::lround(m / box.meters_per_pixel));
  box.height = static_cast<int>(std::lround(n / box.meters_per_pixel));
  const auto cx = static_cast<std::int64_t>(std::floor(world_pixel_x(center.lon, zoom)));
  const auto cy = static_cast<std::int64_t>(std::floor(world_pixel_y(center.lat, zoom)));
  box.x0 = cx - box.width / 2;
  box.y0 = cy - box.height / 2;
  return box;
}

namespace {
std::int64_t tile_index(std::int64_t px) { return px >= 0 ? px / kTileSize : (px - kTileSize + 1) / kTileSize; }
}  // namespace

std::vector<TileKey> covering_tiles(LatLon center, double m, double n, int zoom) {
  const auto box = query_box(center, m, n, zoom);
  std::vector<TileKey> keys;
  for (auto ty = tile_index(box.y0); ty <= tile_index(box.y0 + box.height - 1); ++ty) {
    for (auto tx = tile_index(box.x0); tx <= tile_index(box.x0 + box.width - 1); ++tx) {
      keys.push_back({zoom, tx, ty});
    }
  }
  return keys;
}

CompositeRaster stitch_tiles(const TileStore& store, LatLon center, double m, double n) {
  const auto box = query_box(center, m, n, store.zoom());
  CompositeRaster raster;
  raster.width = box.width;
  raster.height = box.height;
  raster.meters_per_pixel = box.meters_per_pixel;
  raster.pixels.resize(static_cast<std::size_t>(box.width) * static_cast<std::size_t>(box.height));

  // Walk tile by tile so each tile is looked up once.
  for (auto ty = tile_index(box.y0); ty <= tile_index(box.y0 + box.height - 1); ++ty) {
    for (auto tx = tile_index(box.x0); tx <= tile_index(box.x0 + box.width - 1); ++tx) {
      const Tile& tile = store.tile(tx, ty);
      const auto px_lo = std::max(box.x0, tx * kTileSize);
      const auto px_hi = std::min(box.x0 + box.width, (tx + 1) * kTileSize);
      const auto py_lo = std::max(box.y0, ty * kTileSize);
      const auto py_hi = std::min(box.y0 + box.height, (ty + 1) * kTileSize);
      for (auto py = py_lo; py < py_hi; ++py) {
        for (auto px = px_lo; px < px_hi; ++px) {
          const auto out = static_cast<std::size_t>(py - box.y0) * static_cast<std::size_t>(box.width) +
                           static_cast<std::size_t>(px - box.x0);
          raster.pixels[out] = tile.pixel(static_cast<int>(px - tx * kTileSize), static_cast<int>(py - ty * kTileSize));
        }
      }
    }
  }
  return raster;
}

namespace {

std::array<std::size_t, kNumLandmarkClasses> class_counts(const CompositeRaster& raster, const Legend& legend) {
  std::array<std::size_t, kNumLandmarkClasses> counts{};
  for (const auto& px : raster.pixels) ++counts[static_cast<std::size_t>(legend.classify(px))];
  return counts;
}

}  // namespace

ClassFractions classify_pixels(const CompositeRaster& raster, const Legend& legend) {
  ClassFractions f{};
  if (raster.pixels.empty()) return f;
  const auto counts = class_counts(raster, legend);
  const double total = static_cast<double>(raster.pixels.size());
  for (std::size_t i = 0; i < kNumLandmarkClasses; ++i) f[i] = static_cast<double>(counts[i]) / total;
  return f;
}

SpatialFeatures spatial_features(const TileStore& store, LatLon centroid) {
  const auto raster = stitch_tiles(store, centroid);
  const auto counts = class_counts(raster, store.legend());
  const double total = static_cast<double>(raster.pixels.size());
  auto pct = [&](LandmarkClass c) { return 100.0 * static_cast<double>(counts[static_cast<std::size_t>(c)]) / total; };
  SpatialFeatures s;
  s.residential_pct = pct(LandmarkClass::Residential);
  s.natural_pct = pct(LandmarkClass::Natural);
  s.road_pct = pct(LandmarkClass::Road);
  s.highly_populated = counts[static_cast<std::size_t>(LandmarkClass::SpecialLandmark)] > 0 ? 1 : 0;
  return s;
}

std::vector<TileKey> missing_tiles(const TileStore& store, const std::vector<LatLon>& centers, double m, double n) {
  std::set<TileKey> needed;
  for (const auto& c : centers) {
    for (const auto& k : covering_tiles(c, m, n, store.zoom())) needed.insert(k);
  }
  std::vector<TileKey> missing;
  for (const auto& k : needed) {
    if (!store.has_tile(k.x, k.y)) missing.push_back(k);
  }
  return missing;
}

}  // namespace bustop
