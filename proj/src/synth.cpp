#include "bustop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "bustop/error.hpp"
#include "bustop/geo.hpp"
#include "bustop/rng.hpp"
#include "text_util.hpp"

namespace bustop {

using nlohmann::json;

namespace {

constexpr double kGravity = 9.81;
constexpr int kImuRateHz = 197;
constexpr TimeMs kWifiPeriodMs = 3000;
constexpr double kApproachZoneM = 80.0;
constexpr double kRoadHalfWidthM = 4.0;
constexpr double kPatchHalfM = 50.0;
constexpr double kMetersPerDegLat = kEarthRadiusM * kPi / 180.0;
constexpr int kSpacingUnits[] = {13, 14, 15};  // slot spacing in multiples of 17 m
constexpr double kSpacingUnitM = 17.0;
constexpr double kLeadM = 18 * kSpacingUnitM;
constexpr LatLon kOrigin{23.5, 87.3};

const TypeSignature kTravel = [] {
  TypeSignature s;
  s.audio_noise = 700;
  s.tone_amp = 400;
  s.tone_hz = 150;
  s.roughness = 0.4;
  return s;
}();
constexpr double kIdleRoughness = 0.15;

double round_to(double v, double step) { return std::round(v / step) * step; }

// Integer-only uniform in [-half, half] at the given resolution.
double uniform_sym(Rng& rng, double half, double resolution) {
  const auto units = static_cast<std::uint64_t>(std::llround(half / resolution));
  if (units == 0) return 0.0;
  return (static_cast<double>(rng.below(2 * units + 1)) - static_cast<double>(units)) * resolution;
}

// Approximately standard normal (Irwin-Hall, 12 terms); arithmetic only.
double normal01(Rng& rng) {
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += rng.uniform();
  return s - 6.0;
}

int range_draw(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::string bssid(std::uint32_t id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "02:00:%02x:%02x:%02x:%02x", (id >> 24) & 0xFF, (id >> 16) & 0xFF, (id >> 8) & 0xFF,
                id & 0xFF);
  return buf;
}

// Sine at 1e-6 cycle resolution, scaled by 2^20 and rounded.
const std::vector<std::int32_t>& sine_table() {
  static const std::vector<std::int32_t> table = [] {
    std::vector<std::int32_t> t(1'000'000);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = static_cast<std::int32_t>(std::lround(std::sin(2.0 * kPi * static_cast<double>(i) / 1e6) * 1048576.0));
    }
    return t;
  }();
  return table;
}

LatLon route_point(double s_m) {
  return {round_to(kOrigin.lat + s_m / kMetersPerDegLat, 1e-7), kOrigin.lon};
}

}  // namespace

std::array<TypeSignature, kNumStayTypes> SynthConfig::default_signatures() {
  std::array<TypeSignature, kNumStayTypes> s{};
  auto& bs = s[static_cast<std::size_t>(StayType::BusStop)];
  bs.duration_mean_s = {20, 30, 40, 25};
  bs.audio_noise = 1500, bs.tone_amp = 1500, bs.tone_hz = 300;
  bs.roughness = 0.8;
  bs.wifi_stay_min = 15, bs.wifi_stay_max = 20, bs.wifi_edge_min = 10, bs.wifi_edge_max = 14;
  bs.tile_mix = {55, 10, 20, 5, 10};

  auto& sig = s[static_cast<std::size_t>(StayType::Signal)];
  sig.duration_mean_s = {35, 45, 40, 50};
  sig.audio_noise = 1200, sig.tone_amp = 1200, sig.tone_hz = 120;
  sig.roughness = 0.5;
  sig.wifi_stay_min = 5, sig.wifi_stay_max = 8, sig.wifi_edge_min = 6, sig.wifi_edge_max = 9;
  sig.tile_mix = {20, 10, 60, 0, 10};

  auto& con = s[static_cast<std::size_t>(StayType::Congestion)];
  con.duration_mean_s = {60, 80, 70, 90};
  con.audio_noise = 6000, con.tone_amp = 3000, con.tone_hz = 200;
  con.roughness = 2.5;
  con.wifi_stay_min = 10, con.wifi_stay_max = 13, con.wifi_edge_min = 3, con.wifi_edge_max = 5;
  con.tile_mix = {40, 0, 45, 0, 15};

  auto& turn = s[static_cast<std::size_t>(StayType::Turn)];
  turn.duration_mean_s = {6, 8, 7, 9};
  turn.audio_noise = 600, turn.tone_amp = 600, turn.tone_hz = 500;
  turn.roughness = 1.5;
  turn.wifi_stay_min = 0, turn.wifi_stay_max = 2, turn.wifi_edge_min = 0, turn.wifi_edge_max = 2;
  turn.tile_mix = {10, 50, 25, 0, 15};

  auto& adhoc = s[static_cast<std::size_t>(StayType::AdHoc)];
  adhoc.duration_mean_s = {12, 15, 14, 16};
  adhoc.audio_noise = 300, adhoc.tone_amp = 300, adhoc.tone_hz = 700;
  adhoc.roughness = 0.3;
  adhoc.wifi_stay_min = 2, adhoc.wifi_stay_max = 4, adhoc.wifi_edge_min = 1, adhoc.wifi_edge_max = 3;
  adhoc.tile_mix = {5, 75, 10, 0, 10};
  return s;
}

// A bus stop at a signal: it waits as long as the longer of the two and
// mixes their signatures (stop-side WiFi and landmarks, signal-side audio).
TypeSignature SynthConfig::default_confounded() {
  const auto s = default_signatures();
  const auto& bs = s[static_cast<std::size_t>(StayType::BusStop)];
  const auto& sig = s[static_cast<std::size_t>(StayType::Signal)];
  TypeSignature c = bs;
  for (std::size_t b = 0; b < kNumTimeBands; ++b) {
    c.duration_mean_s[b] = std::max(bs.duration_mean_s[b], sig.duration_mean_s[b]);
  }
  c.audio_noise = sig.audio_noise, c.tone_amp = sig.tone_amp, c.tone_hz = sig.tone_hz;
  c.tile_mix = {35, 5, 45, 5, 10};
  return c;
}

void SynthConfig::validate() const {
  for (int n : stays_per_type) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "stays per type must be >= 0");
  }
  if (n_trips < 1) throw Error(ErrorCode::InvalidArgument, "n_trips must be >= 1");
  if (confounded_slots < 0) throw Error(ErrorCode::InvalidArgument, "confounded_slots must be >= 0");
  if (duration_sd_frac < 0.0 || speed_jitter < 0.0 || speed_jitter >= 0.5) {
    throw Error(ErrorCode::InvalidArgument, "noise parameters out of range");
  }
  if (!(cruise_mps > 3.0)) throw Error(ErrorCode::InvalidArgument, "cruise speed must exceed the zero-speed threshold");
  if (exact && cruise_mps != kSpacingUnitM) {
    throw Error(ErrorCode::InvalidArgument, "exact mode needs a cruise speed of 17 m/s");
  }
  auto check = [](const TypeSignature& s) {
    int total = 0;
    for (int p : s.tile_mix) {
      if (p < 0) throw Error(ErrorCode::InvalidArgument, "negative tile mix");
      total += p;
    }
    if (total != 100) throw Error(ErrorCode::InvalidArgument, "tile mix must sum to 100");
    if (s.wifi_stay_min < 0 || s.wifi_stay_max < s.wifi_stay_min || s.wifi_edge_min < 0 ||
        s.wifi_edge_max < s.wifi_edge_min) {
      throw Error(ErrorCode::InvalidArgument, "bad WiFi pool range");
    }
    for (int d : s.duration_mean_s) {
      if (d < 2) throw Error(ErrorCode::InvalidArgument, "stay durations must be >= 2 s");
    }
  };
  for (const auto& s : signatures) check(s);
  check(confounded);
}

const TypeSignature& slot_signature(const SynthConfig& cfg, TypeSet types) {
  if (types.size() > 1) return cfg.confounded;
  return cfg.signatures[static_cast<std::size_t>(types.members().front())];
}

namespace {

int confounded_count(const SynthConfig& cfg) {
  if (cfg.exact) return 0;
  const auto per_trip = [&](StayType t) {
    const int n = cfg.stays_per_type[static_cast<std::size_t>(t)];
    return (n + cfg.n_trips - 1) / cfg.n_trips;
  };
  return std::min({cfg.confounded_slots, per_trip(StayType::BusStop), per_trip(StayType::Signal)});
}

// Slot j of kind t (j counted within the kind) is visited by trip i iff
// j * n_trips + i < stays_per_type[t].
bool visits(const SynthConfig& cfg, StayType t, std::size_t j, std::size_t trip) {
  const auto n = static_cast<std::size_t>(cfg.stays_per_type[static_cast<std::size_t>(t)]);
  return j * static_cast<std::size_t>(cfg.n_trips) + trip < n;
}

}  // namespace

Route gen_route(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng = Rng::derive(cfg.seed, {1});
  const int confounded = confounded_count(cfg);
  std::vector<TypeSet> kinds(static_cast<std::size_t>(confounded), TypeSet{StayType::BusStop, StayType::Signal});
  for (auto t : kAllStayTypes) {
    const int n = cfg.stays_per_type[static_cast<std::size_t>(t)];
    const int per_trip = (n + cfg.n_trips - 1) / cfg.n_trips;
    const bool shares = t == StayType::BusStop || t == StayType::Signal;
    for (int j = shares ? confounded : 0; j < per_trip; ++j) kinds.push_back(TypeSet{t});
  }
  for (std::size_t i = kinds.size(); i > 1; --i) std::swap(kinds[i - 1], kinds[rng.below(i)]);

  Route route;
  route.origin = kOrigin;
  double s = kLeadM;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i > 0) s += kSpacingUnitM * kSpacingUnits[rng.below(3)];
    RouteSlot slot;
    slot.index = i;
    slot.types = kinds[i];
    slot.s_m = s;
    slot.position = route_point(s);
    const auto& sig = slot_signature(cfg, slot.types);
    const int n_stay = range_draw(rng, sig.wifi_stay_min, sig.wifi_stay_max);
    const int n_edge = range_draw(rng, sig.wifi_edge_min, sig.wifi_edge_max);
    const auto base = static_cast<std::uint32_t>(i + 1) << 12;
    for (int a = 0; a < n_stay; ++a) slot.stay_aps.push_back(bssid(base | static_cast<std::uint32_t>(a)));
    for (int a = 0; a < n_edge; ++a) slot.edge_aps.push_back(bssid(base | 0x800u | static_cast<std::uint32_t>(a)));
    route.slots.push_back(std::move(slot));
  }
  route.length_m = s + kLeadM;
  if (cfg.route_length_km > 0.0) {
    const double wanted = cfg.route_length_km * 1000.0;
    if (wanted < route.length_m) {
      throw Error(ErrorCode::InvalidArgument, "route_length_km too short for the requested stays");
    }
    route.length_m = kSpacingUnitM * std::ceil(wanted / kSpacingUnitM);
  }
  return route;
}

Legend synth_legend() {
  Legend l;
  l.add({242, 218, 170}, LandmarkClass::Residential);
  l.add({170, 210, 160}, LandmarkClass::Natural);
  l.add({255, 255, 255}, LandmarkClass::Road);
  l.add({230, 110, 110}, LandmarkClass::SpecialLandmark);
  l.add({224, 224, 224}, LandmarkClass::Other);
  return l;
}

TileStore render_tiles(const Route& route, const SynthConfig& cfg) {
  const int zoom = kDefaultZoom;
  Legend legend = synth_legend();
  std::array<Rgb, kNumLandmarkClasses> color{};
  for (const auto& [rgb, cls] : legend.entries()) color[static_cast<std::size_t>(cls)] = rgb;
  TileStore store = TileStore::in_memory(legend, zoom);

  struct Patch {
    double cx, cy, half;
    std::array<int, kNumLandmarkClasses> cumulative;
    std::uint64_t seed;
  };
  std::vector<Patch> patches;
  std::set<TileKey> keys;
  for (const auto& slot : route.slots) {
    const auto& mix = slot_signature(cfg, slot.types).tile_mix;
    Patch p{world_pixel_x(slot.position.lon, zoom), world_pixel_y(slot.position.lat, zoom),
            kPatchHalfM / ground_resolution(slot.position.lat, zoom), {}, Rng::derive_seed(cfg.seed, {2, slot.index})};
    int acc = 0;
    for (std::size_t c = 0; c < kNumLandmarkClasses; ++c) p.cumulative[c] = acc += mix[c];
    patches.push_back(p);
    // Generous box so jittered centroids stay covered.
    for (const auto& k : covering_tiles(slot.position, 2 * kDefaultBoxMeters, 2 * kDefaultBoxMeters, zoom)) {
      keys.insert(k);
    }
  }
  const double road_x = world_pixel_x(route.origin.lon, zoom);
  const double road_half = kRoadHalfWidthM / ground_resolution(route.origin.lat, zoom);
  const Rgb background = color[static_cast<std::size_t>(LandmarkClass::Other)];

  for (const auto& key : keys) {
    Tile tile;
    tile.rgb.resize(static_cast<std::size_t>(kTileSize) * kTileSize * 3);
    const double x0 = static_cast<double>(key.x * kTileSize);
    const double y0 = static_cast<double>(key.y * kTileSize);
    std::vector<const Patch*> near;
    for (const auto& p : patches) {
      if (p.cx + p.half >= x0 && p.cx - p.half <= x0 + kTileSize && p.cy + p.half >= y0 &&
          p.cy - p.half <= y0 + kTileSize) {
        near.push_back(&p);
      }
    }
    for (int y = 0; y < kTileSize; ++y) {
      for (int x = 0; x < kTileSize; ++x) {
        const double wx = x0 + x + 0.5;
        const double wy = y0 + y + 0.5;
        Rgb c = background;
        for (const auto* p : near) {
          if (std::abs(wx - p->cx) > p->half || std::abs(wy - p->cy) > p->half) continue;
          std::uint64_t h = p->seed ^ (static_cast<std::uint64_t>(key.x * kTileSize + x) * 0x9E3779B97F4A7C15ULL) ^
                            (static_cast<std::uint64_t>(key.y * kTileSize + y) * 0xC2B2AE3D27D4EB4FULL);
          const int pick = static_cast<int>(splitmix64(h) % 100);
          std::size_t cls = 0;
          while (pick >= p->cumulative[cls]) ++cls;
          c = color[cls];
          break;
        }
        if (std::abs(wx - road_x) <= road_half) c = color[static_cast<std::size_t>(LandmarkClass::Road)];
        const auto i = (static_cast<std::size_t>(y) * kTileSize + static_cast<std::size_t>(x)) * 3;
        tile.rgb[i] = c.r;
        tile.rgb[i + 1] = c.g;
        tile.rgb[i + 2] = c.b;
      }
    }
    store.put(key.x, key.y, std::move(tile));
  }
  return store;
}

namespace {

constexpr std::array<int, kNumTimeBands> kBandStartHour = {6, 9, 13, 17};

// Index of each slot among the slots of the same kind, in travel order.
std::vector<std::size_t> kind_ranks(const Route& route) {
  std::map<std::uint8_t, std::size_t> next;
  std::vector<std::size_t> rank;
  for (const auto& s : route.slots) rank.push_back(next[s.types.bits()]++);
  return rank;
}

}  // namespace

std::vector<TripPlan> plan_trips(const Route& route, const SynthConfig& cfg) {
  const auto rank = kind_ranks(route);
  std::vector<TripPlan> plans;
  for (int i = 0; i < cfg.n_trips; ++i) {
    TripPlan p;
    p.ordinal = static_cast<std::size_t>(i);
    char id[16];
    std::snprintf(id, sizeof id, "T%02d", i);
    p.trip_id = id;
    p.band = kAllTimeBands[static_cast<std::size_t>(i) % kNumTimeBands];
    p.day = i / static_cast<int>(kNumTimeBands);
    const std::int64_t local_min = (cfg.first_day + p.day) * 1440 + kBandStartHour[static_cast<std::size_t>(p.band)] * 60 + 20;
    p.t0 = (local_min - cfg.utc_offset_min) * 60000;
    for (std::size_t s = 0; s < route.slots.size(); ++s) {
      bool go = true;
      for (auto t : route.slots[s].types.members()) go = go && visits(cfg, t, rank[s], p.ordinal);
      if (go) p.slots.push_back(s);
    }
    plans.push_back(std::move(p));
  }
  return plans;
}

namespace {

struct Segment {
  TimeMs begin = 0, end = 0;  // [begin, end)
  bool stay = false;
  double s_from = 0.0, s_to = 0.0;
  const RouteSlot* slot = nullptr;  // stay slot or travel destination
  const TypeSignature* sig = nullptr;
};

// Cursor over time-ordered segments for monotone queries.
class SegmentCursor {
 public:
  explicit SegmentCursor(const std::vector<Segment>& segs) : segs_(segs) {}
  const Segment& at(TimeMs t) {
    while (i_ + 1 < segs_.size() && t >= segs_[i_].end) ++i_;
    return segs_[i_];
  }

 private:
  const std::vector<Segment>& segs_;
  std::size_t i_ = 0;
};

std::array<std::array<double, 3>, 3> device_rotation(Rng& rng) {
  const double roll = uniform_sym(rng, 0.5, 1e-6);
  const double pitch = uniform_sym(rng, 0.5, 1e-6);
  const double yaw = uniform_sym(rng, kPi, 1e-6);
  const double cr = std::cos(roll), sr = std::sin(roll), cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  std::array<std::array<double, 3>, 3> r{{{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
                                          {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
                                          {-sp, cp * sr, cp * cr}}};
  for (auto& row : r) {
    for (auto& v : row) v = round_to(v, 1e-12);
  }
  return r;
}

}  // namespace

GeneratedTrip gen_trip(const Route& route, const TripPlan& plan, const SynthConfig& cfg) {
  Rng rng = Rng::derive(cfg.seed, {3, plan.ordinal});
  GeneratedTrip out;
  auto& tr = out.trace;
  tr.trip_id = plan.trip_id;
  tr.direction = Direction::Up;

  const double lon_m_per_deg = kMetersPerDegLat * round_to(std::cos(kOrigin.lat * kPi / 180.0), 1e-12);
  std::vector<Segment> segs;
  TimeMs t = plan.t0;  // next GPS instant
  double s_cur = 0.0;

  auto travel = [&](double s_to, const RouteSlot* dest) {
    const double d = s_to - s_cur;
    std::int64_t n = 0;
    if (cfg.exact) {
      n = std::llround(d / cfg.cruise_mps);
    } else {
      const double v = cfg.cruise_mps * (1.0 + uniform_sym(rng, cfg.speed_jitter, 1e-4));
      n = std::max<std::int64_t>(1, std::llround(d / v));
    }
    const double speed = round_to(d / static_cast<double>(n), 1e-3);
    for (std::int64_t k = 0; k < n; ++k) {
      const auto p = route_point(s_cur + d * static_cast<double>(k) / static_cast<double>(n));
      tr.gps.push_back({p.lat, p.lon, t + k * 1000, speed});
    }
    segs.push_back({t, t + n * 1000, false, s_cur, s_to, dest, dest ? &slot_signature(cfg, dest->types) : &kTravel});
    t += n * 1000;
    s_cur = s_to;
  };

  for (auto si : plan.slots) {
    const auto& slot = route.slots[si];
    travel(slot.s_m, &slot);
    const auto& sig = slot_signature(cfg, slot.types);
    const double mean = sig.duration_mean_s[static_cast<std::size_t>(plan.band)];
    int dur = static_cast<int>(mean);
    if (!cfg.exact) {
      dur = std::max(2, static_cast<int>(std::llround(mean * (1.0 + cfg.duration_sd_frac * normal01(rng)))));
    }
    for (int k = 0; k < dur; ++k) {
      LatLon p = slot.position;
      if (!cfg.exact) {
        p.lat = round_to(p.lat + uniform_sym(rng, 3.0, 1e-3) / kMetersPerDegLat, 1e-7);
        p.lon = round_to(p.lon + uniform_sym(rng, 3.0, 1e-3) / lon_m_per_deg, 1e-7);
      }
      tr.gps.push_back({p.lat, p.lon, t + k * 1000, 0.0});
    }
    segs.push_back({t, t + dur * 1000, true, slot.s_m, slot.s_m, &slot, &sig});
    out.stays.push_back({si, slot.types, t, dur, slot.position});
    tr.marks.push_back({t + (dur / 2) * 1000, slot.types});
    t += dur * 1000;
  }
  travel(route.length_m, nullptr);
  {
    const auto p = route_point(route.length_m);
    tr.gps.push_back({p.lat, p.lon, t, round_to(cfg.cruise_mps, 1e-3)});
    segs.back().end = t + 1000;
  }
  const TimeMs t_last = t;

  // IMU: world-frame gravity plus roughness, seen through a fixed device rotation.
  const auto rot = device_rotation(rng);
  {
    SegmentCursor cur(segs);
    for (std::int64_t k = 0;; ++k) {
      const TimeMs ti = plan.t0 + k * 1000 / kImuRateHz;
      if (ti > t_last) break;
      const auto& seg = cur.at(ti);
      double rough = kIdleRoughness, lateral = 0.05;
      if (!seg.stay) {
        lateral = 0.3;
        rough = kTravel.roughness;
        const double frac = static_cast<double>(ti - seg.begin) / static_cast<double>(seg.end - seg.begin);
        const double s = seg.s_from + frac * (seg.s_to - seg.s_from);
        if (seg.slot && seg.s_to - s <= kApproachZoneM) rough = seg.sig->roughness;
      }
      const std::array<double, 3> w = {uniform_sym(rng, lateral, 1e-4), uniform_sym(rng, lateral, 1e-4),
                                       kGravity + uniform_sym(rng, rough, 1e-4)};
      std::array<double, 3> d{};
      for (std::size_t r = 0; r < 3; ++r) d[r] = round_to(rot[r][0] * w[0] + rot[r][1] * w[1] + rot[r][2] * w[2], 1e-4);
      tr.imu.push_back({ti, d[0], d[1], d[2]});
    }
  }

  // Audio: tone plus uniform noise per segment, integer arithmetic only.
  {
    const auto& table = sine_table();
    tr.audio.sample_rate = kAudioSampleRate;
    tr.audio.t0 = plan.t0;
    const auto n = static_cast<std::size_t>((t_last + 1000 - plan.t0) * kAudioSampleRate / 1000);
    tr.audio.samples.resize(n);
    SegmentCursor cur(segs);
    for (std::size_t k = 0; k < n; ++k) {
      const TimeMs ti = plan.t0 + static_cast<TimeMs>(k) * 1000 / kAudioSampleRate;
      const auto& seg = cur.at(ti);
      const TypeSignature& sig = seg.stay ? *seg.sig : kTravel;
      const auto phase = static_cast<std::size_t>((static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(sig.tone_hz) *
                                                   125u) % 1'000'000u);
      const std::int64_t tone = (static_cast<std::int64_t>(sig.tone_amp) * table[phase]) >> 20;
      const std::int64_t noise =
          static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * sig.audio_noise + 1))) - sig.audio_noise;
      tr.audio.samples[k] = static_cast<std::int16_t>(std::clamp<std::int64_t>(tone + noise, -32768, 32767));
    }
  }

  // WiFi: every 3 s; stop APs while stopped, the next stop's edge APs en route.
  {
    SegmentCursor cur(segs);
    for (TimeMs ti = plan.t0; ti <= t_last; ti += kWifiPeriodMs) {
      const auto& seg = cur.at(ti);
      WifiScan scan;
      scan.t = ti;
      if (seg.slot) {
        const auto& pool = seg.stay ? seg.slot->stay_aps : seg.slot->edge_aps;
        const std::uint64_t keep = seg.stay ? 3 : 2;  // out of 4
        for (const auto& ap : pool) {
          if (rng.below(4) < keep) scan.bssids.insert(ap);
        }
      }
      if (!scan.bssids.empty()) tr.wifi.push_back(std::move(scan));
    }
  }
  return out;
}

BundleSummary write_bundle(const SynthConfig& cfg, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  const Route route = gen_route(cfg);
  const auto plans = plan_trips(route, cfg);
  BundleSummary summary;
  fs::create_directories(out / "trips");

  {
    const TileStore tiles = render_tiles(route, cfg);
    tiles.save(out / "tiles");
    summary.n_tiles = tiles.cached_keys().size();
    detail::write_file(out / "legend.json", tiles.legend().to_json());
  }

  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["exact"] = cfg.exact;
  manifest["utc_offset_min"] = cfg.utc_offset_min;
  manifest["route_length_m"] = route.length_m;
  json slots = json::array();
  for (const auto& s : route.slots) {
    slots.push_back({{"slot", s.index},
                     {"types", format_type_set(s.types)},
                     {"s_m", s.s_m},
                     {"lat", s.position.lat},
                     {"lon", s.position.lon}});
  }
  manifest["route"] = std::move(slots);
  json trips = json::array();
  for (const auto& plan : plans) {
    const auto gen = gen_trip(route, plan, cfg);
    const auto dir = out / "trips" / plan.trip_id;
    write_trip(gen.trace, dir);
    summary.trip_dirs.push_back(dir);
    json stays = json::array();
    for (const auto& s : gen.stays) {
      stays.push_back({{"slot", s.slot},
                       {"types", format_type_set(s.types)},
                       {"t_start_ms", s.t_start},
                       {"duration_s", s.duration_s},
                       {"lat", s.position.lat},
                       {"lon", s.position.lon}});
    }
    summary.n_stays += gen.stays.size();
    trips.push_back({{"trip_id", plan.trip_id},
                     {"band", std::string(to_string(plan.band))},
                     {"date", local_date(plan.t0, cfg.utc_offset_min)},
                     {"t0_ms", plan.t0},
                     {"stays", std::move(stays)}});
  }
  manifest["trips"] = std::move(trips);
  detail::write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return summary;
}

}  // namespace bustop
