#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bustop/mapenc.hpp"
#include "bustop/staypoint.hpp"
#include "bustop/trace.hpp"

namespace bustop {

// Class-conditional signature of one stay kind. Ranges are chosen so the
// kinds are separable on every feature group.
struct TypeSignature {
  std::array<int, kNumTimeBands> duration_mean_s{};
  int audio_noise = 0;  // half-range of uniform noise, PCM units
  int tone_amp = 0;     // PCM units
  int tone_hz = 0;
  double roughness = 0.0;  // half-range of vertical residual on the approach, m/s^2
  int wifi_stay_min = 0, wifi_stay_max = 0;
  int wifi_edge_min = 0, wifi_edge_max = 0;
  std::array<int, kNumLandmarkClasses> tile_mix{};  // percent of the 100 m patch per class
};

struct SynthConfig {
  std::uint64_t seed = 7;
  std::array<int, kNumStayTypes> stays_per_type{100, 100, 100, 100, 100};
  int n_trips = 10;
  // Slots that are both a bus stop and a signal; they count toward both.
  int confounded_slots = 2;
  // 0 derives the length from the slots; a longer route adds a tail.
  double route_length_km = 0.0;
  // Exact-model mode: durations equal the band means, speed is exactly
  // cruise_mps, no position jitter and no confounded slots.
  bool exact = false;
  double duration_sd_frac = 0.2;
  double speed_jitter = 0.1;
  double cruise_mps = 17.0;
  int utc_offset_min = 330;
  std::int64_t first_day = 17931;  // days since 1970-01-01 (2019-02-04)

  std::array<TypeSignature, kNumStayTypes> signatures = default_signatures();
  TypeSignature confounded = default_confounded();

  static std::array<TypeSignature, kNumStayTypes> default_signatures();
  static TypeSignature default_confounded();
  void validate() const;
};

struct RouteSlot {
  std::size_t index = 0;
  TypeSet types;
  double s_m = 0.0;  // distance from the route origin
  LatLon position;
  std::vector<std::string> stay_aps;
  std::vector<std::string> edge_aps;  // seen while approaching this slot
};

struct Route {
  LatLon origin;
  double length_m = 0.0;
  std::vector<RouteSlot> slots;  // in travel order
};

// The route runs due north so along-route distances are exact.
Route gen_route(const SynthConfig& cfg);
const TypeSignature& slot_signature(const SynthConfig& cfg, TypeSet types);

Legend synth_legend();
// 100 m patches around each slot with the kind's class mix, plus the road.
TileStore render_tiles(const Route& route, const SynthConfig& cfg);

struct TripPlan {
  std::string trip_id;
  std::size_t ordinal = 0;
  int day = 0;
  TimeBand band = TimeBand::EarlyMorning;
  TimeMs t0 = 0;
  std::vector<std::size_t> slots;  // visited, in route order
};

// Trip i runs in band i mod 4 on day i / 4 and visits slot j of a kind
// while j * n_trips + i < stays_per_type.
std::vector<TripPlan> plan_trips(const Route& route, const SynthConfig& cfg);

struct ManifestStay {
  std::size_t slot = 0;
  TypeSet types;
  TimeMs t_start = 0;
  int duration_s = 0;
  LatLon position;
};

struct GeneratedTrip {
  TripTrace trace;
  std::vector<ManifestStay> stays;
};

GeneratedTrip gen_trip(const Route& route, const TripPlan& plan, const SynthConfig& cfg);

struct BundleSummary {
  std::vector<std::filesystem::path> trip_dirs;
  std::size_t n_tiles = 0;
  std::size_t n_stays = 0;
};

// <out>/trips/<trip_id>/, <out>/tiles/<zoom>/<x>_<y>.ppm, <out>/legend.json,
// <out>/manifest.json. Trips are generated and written one at a time.
BundleSummary write_bundle(const SynthConfig& cfg, const std::filesystem::path& out);

}  // namespace bustop
