#include "bustop/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <numeric>
#include <set>

#include "bustop/error.hpp"
#include "text_util.hpp"

namespace bustop {

std::string feature_name(std::size_t index) { return "f" + std::to_string(index + 1); }

std::vector<std::string> FeatureVector::invariant_violations() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!std::isfinite(values[i])) out.push_back(feature_name(i) + " not finite");
  }
  if (values[feat::kStayDuration] < 0) out.push_back("f1 < 0");
  for (std::size_t i = feat::kMfccFirst; i + 1 < feat::kMfccFirst + 5; ++i) {
    if (values[i] < values[i + 1]) out.push_back(feature_name(i) + " < " + feature_name(i + 1));
  }
  for (auto i : {feat::kWifiStay, feat::kWifiEdge}) {
    if (values[i] < 0 || values[i] != std::floor(values[i])) out.push_back(feature_name(i) + " not a count");
  }
  if (values[feat::kRsi] < 0) out.push_back("f9 < 0");
  for (auto i : {feat::kResidential, feat::kNatural, feat::kRoad}) {
    if (values[i] < 0 || values[i] > 100) out.push_back(feature_name(i) + " outside [0,100]");
  }
  if (values[feat::kResidential] + values[feat::kNatural] + values[feat::kRoad] > 100.0 + 1e-9) {
    out.push_back("f10+f11+f12 > 100");
  }
  if (values[feat::kHighlyPopulated] != 0.0 && values[feat::kHighlyPopulated] != 1.0) out.push_back("f13 not binary");
  return out;
}

TripContext::TripContext(const TripTrace& trace) : trace_(trace) {
  try {
    oriented_ = reorient_imu(trace.imu);
    double acc = 0.0;
    for (const auto& s : oriented_) acc += s.az;
    mean_z_ = acc / static_cast<double>(oriented_.size());
    imu_ok_ = true;
  } catch (const Error& e) {
    imu_error_ = e.what();
  }
}

namespace {

std::span<const std::int16_t> stay_audio(const TripTrace& trace, const StayLocation& stay) {
  const auto& a = trace.audio;
  const auto lo = a.index_at(stay.t_start);
  const auto hi = a.index_at(stay.audio_end());
  if (hi <= lo) return {};
  return std::span<const std::int16_t>(a.samples).subspan(lo, hi - lo);
}

}  // namespace

std::array<double, 5> top5_from_matrix(const Matrix& coeffs) {
  std::vector<double> means(coeffs.cols, 0.0);
  for (std::size_t r = 0; r < coeffs.rows; ++r) {
    for (std::size_t c = 0; c < coeffs.cols; ++c) means[c] += coeffs(r, c);
  }
  for (auto& m : means) m /= static_cast<double>(coeffs.rows);
  std::sort(means.begin(), means.end(), std::greater<>());
  std::array<double, 5> top{};
  for (std::size_t i = 0; i < 5 && i < means.size(); ++i) top[i] = means[i];
  return top;
}

std::array<double, 5> top5_mfcc(const TripTrace& trace, const StayLocation& stay, const MfccExtractor& mfcc) {
  const auto window = stay_audio(trace, stay);
  if (mfcc.frame_count(window.size()) == 0) {
    throw Error(ErrorCode::NoAudioInWindow, stay.stay_id + ": " + std::to_string(window.size()) +
                                                " audio samples in stay window");
  }
  return top5_from_matrix(mfcc.compute(window));
}

double snr_db(std::span<const std::int16_t> samples, const MfccConfig& cfg) {
  const auto L = static_cast<std::size_t>(cfg.frame_len);
  const auto hop = static_cast<std::size_t>(cfg.hop);
  const std::size_t n_frames = samples.size() < L ? 0 : 1 + (samples.size() - L) / hop;
  if (n_frames < 10) {
    throw Error(ErrorCode::WindowTooShort, std::to_string(n_frames) + " frames, SNR needs at least 10");
  }
  auto rms = [](std::span<const std::int16_t> s) {
    double acc = 0.0;
    for (auto v : s) acc += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(acc / static_cast<double>(s.size()));
  };
  std::vector<double> frame_rms(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) frame_rms[f] = rms(samples.subspan(f * hop, L));
  std::sort(frame_rms.begin(), frame_rms.end());
  const std::size_t quiet = std::max<std::size_t>(1, n_frames / 10);
  const double noise = std::accumulate(frame_rms.begin(), frame_rms.begin() + static_cast<std::ptrdiff_t>(quiet), 0.0) /
                       static_cast<double>(quiet);
  constexpr double kFloor = 1.0;
  return 20.0 * std::log10(std::max(rms(samples), kFloor) / std::max(noise, kFloor));
}

double snr_db(const TripTrace& trace, const StayLocation& stay, const MfccConfig& cfg) {
  return snr_db(stay_audio(trace, stay), cfg);
}

namespace {

// Unique BSSIDs over scans whose time satisfies `in_window`.
template <typename Pred>
int unique_aps(const TripTrace& trace, Pred in_window) {
  std::set<std::string_view> seen;
  for (const auto& scan : trace.wifi) {
    if (!in_window(scan.t)) continue;
    for (const auto& b : scan.bssids) seen.insert(b);
  }
  return static_cast<int>(seen.size());
}

}  // namespace

int wifi_count_at_stay(const TripTrace& trace, const StayLocation& stay) {
  return unique_aps(trace, [&](TimeMs t) { return t >= stay.t_start && t <= stay.t_end; });
}

int wifi_count_on_edge(const TripTrace& trace, const StayLocation* prev, const StayLocation& cur) {
  if (prev) return unique_aps(trace, [&](TimeMs t) { return t > prev->t_end && t < cur.t_start; });
  const TimeMs start = trace.start_time();
  return unique_aps(trace, [&](TimeMs t) { return t >= start && t < cur.t_start; });
}

double road_surface_index(std::span<const double> residual_z, std::span<const double> speeds) {
  if (residual_z.empty()) throw Error(ErrorCode::NoImuInWindow, "no acceleration samples");
  if (speeds.empty()) throw Error(ErrorCode::NoMotionBeforeStay, "no speed samples");
  double sq = 0.0;
  for (double z : residual_z) sq += z * z;
  const double rms = std::sqrt(sq / static_cast<double>(residual_z.size()));
  const double mean_speed = std::accumulate(speeds.begin(), speeds.end(), 0.0) / static_cast<double>(speeds.size());
  if (!(mean_speed > 0.0)) throw Error(ErrorCode::NoMotionBeforeStay, "mean speed is zero");
  return rms / mean_speed;
}

RsiWindow rsi_window(const TripTrace& trace, const StayLocation& stay) {
  const auto& gps = trace.gps;
  auto it = std::lower_bound(gps.begin(), gps.end(), stay.t_start,
                             [](const GeoPoint& p, TimeMs t) { return p.t < t; });
  RsiWindow w;
  w.t_end = stay.t_start;
  w.t_begin = stay.t_start;
  // Distance is measured back from where the bus came to rest.
  LatLon prev{};
  if (!stay.members.empty()) {
    prev = {stay.members.front().lat, stay.members.front().lon};
  } else if (it != gps.end()) {
    prev = {it->lat, it->lon};
  } else if (it != gps.begin()) {
    prev = {std::prev(it)->lat, std::prev(it)->lon};
  }
  while (it != gps.begin() && w.travelled_m < kRsiWindowMeters) {
    --it;
    w.travelled_m += haversine({it->lat, it->lon}, prev);
    prev = {it->lat, it->lon};
    w.t_begin = it->t;
  }
  return w;
}

double rsi(const TripContext& ctx, const StayLocation& stay) {
  const auto& trace = ctx.trace();
  const auto w = rsi_window(trace, stay);
  if (w.t_begin >= w.t_end) throw Error(ErrorCode::NoMotionBeforeStay, stay.stay_id + ": no GPS before stay");

  std::vector<double> speeds;
  for (const auto& p : trace.gps) {
    if (p.t >= w.t_begin && p.t < w.t_end) speeds.push_back(p.speed);
  }
  if (!ctx.has_imu()) throw Error(ErrorCode::NoImuInWindow, stay.stay_id + ": " + ctx.imu_error());
  const auto& imu = ctx.oriented_imu();
  auto lo = std::lower_bound(imu.begin(), imu.end(), w.t_begin, [](const ImuSample& s, TimeMs t) { return s.t < t; });
  std::vector<double> residual;
  for (; lo != imu.end() && lo->t < w.t_end; ++lo) residual.push_back(lo->az - ctx.mean_z());
  if (residual.empty()) throw Error(ErrorCode::NoImuInWindow, stay.stay_id + ": no IMU samples in approach window");
  return road_surface_index(residual, speeds);
}

FeatureBuilder::FeatureBuilder(const TileStore& tiles, FeatureConfig cfg)
    : tiles_(tiles), cfg_(cfg), mfcc_(cfg.mfcc) {}

FeatureVector FeatureBuilder::build(const TripContext& ctx, const StayLocation* prev, const StayLocation& stay) const {
  const auto& trace = ctx.trace();
  FeatureVector fv;
  std::vector<std::string> missing;

  fv[feat::kStayDuration] = static_cast<double>(stay.duration_s);
  try {
    const auto top = top5_mfcc(trace, stay, mfcc_);
    for (std::size_t i = 0; i < 5; ++i) fv[feat::kMfccFirst + i] = top[i];
  } catch (const Error& e) {
    missing.push_back(std::string("f2..f6 (") + e.what() + ")");
  }
  fv[feat::kWifiStay] = wifi_count_at_stay(trace, stay);
  fv[feat::kWifiEdge] = wifi_count_on_edge(trace, prev, stay);
  try {
    fv[feat::kRsi] = rsi(ctx, stay);
  } catch (const Error& e) {
    missing.push_back(std::string("f9 (") + e.what() + ")");
  }
  try {
    const auto raster = stitch_tiles(tiles_, stay.centroid, cfg_.box_m, cfg_.box_n);
    const auto frac = classify_pixels(raster, tiles_.legend());
    fv[feat::kResidential] = 100.0 * frac[static_cast<std::size_t>(LandmarkClass::Residential)];
    fv[feat::kNatural] = 100.0 * frac[static_cast<std::size_t>(LandmarkClass::Natural)];
    fv[feat::kRoad] = 100.0 * frac[static_cast<std::size_t>(LandmarkClass::Road)];
    fv[feat::kHighlyPopulated] = frac[static_cast<std::size_t>(LandmarkClass::SpecialLandmark)] > 0.0 ? 1.0 : 0.0;
  } catch (const Error& e) {
    missing.push_back(std::string("f10..f13 (") + e.what() + ")");
  }

  if (!missing.empty()) {
    std::string msg = stay.stay_id + ":";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::MissingFeature, msg);
  }
  return fv;
}

FeatureVector build_feature_vector(const TripTrace& trace, const StayLocation* prev_stay, const StayLocation& stay,
                                   const TileStore& tiles, const FeatureConfig& cfg) {
  const TripContext ctx(trace);
  return FeatureBuilder(tiles, cfg).build(ctx, prev_stay, stay);
}

FeaturizeResult featurize_trip(const TripTrace& trace, const std::vector<StayLocation>& stays,
                               const TileStore& tiles, const FeatureConfig& cfg) {
  const TripContext ctx(trace);
  const FeatureBuilder builder(tiles, cfg);
  FeaturizeResult result;
  for (std::size_t i = 0; i < stays.size(); ++i) {
    const StayLocation* prev = i == 0 ? nullptr : &stays[i - 1];
    try {
      result.rows.push_back({stays[i].stay_id, builder.build(ctx, prev, stays[i]), stays[i].truth});
    } catch (const Error& e) {
      result.skipped.push_back(stays[i].stay_id + ": " + e.what());
    }
  }
  return result;
}

namespace {
constexpr std::string_view kFeaturesHeader = "stay_id,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,labels";
}

std::string features_to_csv(const std::vector<FeatureRow>& rows) {
  std::string out(kFeaturesHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.stay_id;
    for (double v : r.features.values) out += ',' + detail::format_double(v);
    out += ',' + format_type_set(r.labels) + '\n';
  }
  return out;
}

std::vector<FeatureRow> features_from_csv(std::string_view text) {
  detail::CsvReader reader(std::string(text), "features.csv");
  reader.expect_header(kFeaturesHeader);
  std::vector<FeatureRow> rows;
  std::string_view line;
  while (reader.next(line)) {
    const auto f = detail::split(line);
    if (f.size() != kNumFeatures + 2) reader.fail("expected 15 fields");
    FeatureRow row;
    row.stay_id = std::string(f[0]);
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (!detail::parse_number(f[i + 1], row.features[i]) || !std::isfinite(row.features[i])) {
        reader.fail("bad value for " + feature_name(i));
      }
    }
    try {
      row.labels = parse_type_set(f[kNumFeatures + 1]);
    } catch (const Error& e) {
      reader.fail(e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_features(const std::vector<FeatureRow>& rows, const std::filesystem::path& path) {
  detail::write_file(path, features_to_csv(rows));
}

std::vector<FeatureRow> read_features(const std::filesystem::path& path) {
  return features_from_csv(detail::read_file(path));
}

}  // namespace bustop
