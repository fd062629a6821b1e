#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bustop/stay_type.hpp"

namespace bustop {

using TimeMs = std::int64_t;

inline constexpr int kAudioSampleRate = 8000;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
  TimeMs t = 0;
  double speed = 0.0;  // m/s

  bool operator==(const GeoPoint&) const = default;
};

struct ImuSample {
  TimeMs t = 0;
  double ax = 0.0, ay = 0.0, az = 0.0;  // m/s^2, device frame

  bool operator==(const ImuSample&) const = default;
};

struct AudioStream {
  int sample_rate = kAudioSampleRate;
  TimeMs t0 = 0;
  std::vector<std::int16_t> samples;

  bool operator==(const AudioStream&) const = default;

  // Index of the first sample at or after `t` (clamped to [0, size]).
  std::size_t index_at(TimeMs t) const;
  TimeMs end_time() const;
};

struct WifiScan {
  TimeMs t = 0;
  std::set<std::string> bssids;

  bool operator==(const WifiScan&) const = default;
};

struct GroundTruthMark {
  TimeMs t = 0;
  TypeSet types;

  bool operator==(const GroundTruthMark&) const = default;
};

enum class Direction { Up, Down };

struct TripTrace {
  std::string trip_id;
  Direction direction = Direction::Up;
  std::vector<GeoPoint> gps;
  std::vector<ImuSample> imu;
  AudioStream audio;
  std::vector<WifiScan> wifi;
  std::vector<GroundTruthMark> marks;

  bool operator==(const TripTrace&) const = default;

  TimeMs start_time() const;
  TimeMs end_time() const;
};

// Reads a trip directory (gps.csv, imu.csv, wifi.csv, labels.csv, audio.pcm,
// audio.json, optional trip.json). Throws Error on missing files, malformed
// rows, out-of-order timestamps and sample rates other than 8 kHz.
TripTrace parse_trip(const std::filesystem::path& dir);

// Writes the same layout parse_trip reads. Reals use shortest round-trip
// formatting so parse(write(t)) == t.
void write_trip(const TripTrace& trace, const std::filesystem::path& dir);

struct Violation {
  std::string kind;  // stable machine-readable tag, e.g. "stream-out-of-span"
  std::string detail;
};

struct ValidationReport {
  std::size_t n_gps = 0;
  std::size_t n_imu = 0;
  std::size_t n_audio_samples = 0;
  std::size_t n_wifi_scans = 0;
  std::size_t n_marks = 0;
  TimeMs span_start = 0;
  TimeMs span_end = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(std::string_view kind) const;
};

// Slack around the GPS span within which the other streams must lie.
inline constexpr TimeMs kStreamSpanSlackMs = 60'000;

ValidationReport validate_trace(const TripTrace& trace);

// Rotates every sample by the minimal rotation taking the trip-mean
// acceleration onto +z. Needs at least 100 samples and a mean of at least
// 1 m/s^2.
std::vector<ImuSample> reorient_imu(const std::vector<ImuSample>& imu);

inline constexpr std::size_t kMinImuSamplesForGravity = 100;

}  // namespace bustop
