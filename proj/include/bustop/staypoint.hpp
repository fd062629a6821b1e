#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bustop/geo.hpp"
#include "bustop/trace.hpp"

namespace bustop {

struct ClusterParams {
  double chi = 3.0;   // m/s, zero-speed threshold
  double rho = 30.0;  // m, cluster radius around the seed
  TimeMs max_gap_ms = 120'000;  // temporal break between consecutive members

  // Slack used when aligning ground-truth marks to stays: rho / chi seconds.
  TimeMs mark_slack_ms() const;
  void validate() const;
};

enum class TimeBand { EarlyMorning = 0, Morning, Afternoon, Evening };
inline constexpr std::size_t kNumTimeBands = 4;
inline constexpr std::array<TimeBand, kNumTimeBands> kAllTimeBands = {
    TimeBand::EarlyMorning, TimeBand::Morning, TimeBand::Afternoon, TimeBand::Evening};

std::string_view to_string(TimeBand b);
std::optional<TimeBand> parse_time_band(std::string_view name);

// Local-time band of an instant. Hours before 06:00 clamp to EarlyMorning,
// hours at or after 21:00 clamp to Evening.
TimeBand assign_timezone(TimeMs t, int utc_offset_min);

// Local calendar date "YYYY-MM-DD" of an instant.
std::string local_date(TimeMs t, int utc_offset_min);

struct ZeroSpeedPoint {
  GeoPoint point;
};

struct StayLocation {
  std::string stay_id;
  LatLon centroid;
  std::vector<GeoPoint> members;
  TimeMs t_start = 0;  // first member
  TimeMs t_end = 0;    // last member
  int duration_s = 0;  // member count at 1 Hz
  TypeSet truth;
  TimeBand band = TimeBand::EarlyMorning;

  bool operator==(const StayLocation&) const = default;

  // Audio covering the stay: each 1 Hz record stands for one second.
  TimeMs audio_end() const { return t_end + 1000; }
};

std::vector<ZeroSpeedPoint> extract_zero_speed(const TripTrace& trace, const ClusterParams& p);

// Greedy temporal clustering. The first unassigned point seeds a cluster; a
// following point joins while it is within rho of the seed and within
// max_gap_ms of the previous member, otherwise it seeds the next cluster.
// Ids are "<prefix>S000", "<prefix>S001", ...; bands use utc_offset_min.
std::vector<StayLocation> cluster_stays(const std::vector<ZeroSpeedPoint>& points, const ClusterParams& p,
                                        std::string_view id_prefix = "", int utc_offset_min = 0);

// Attaches ground-truth marks to stays whose [t_start - slack, t_end + slack]
// contains them (nearest stay wins). Returns indices of marks that matched no
// stay. AdHoc is dropped from a stay that also collected another type.
std::vector<std::size_t> align_marks(std::vector<StayLocation>& stays, const std::vector<GroundTruthMark>& marks,
                                     TimeMs slack_ms);

// Appends one "mark-unmatched" violation per unmatched mark index.
void report_unmatched_marks(ValidationReport& report, const std::vector<GroundTruthMark>& marks,
                            const std::vector<std::size_t>& unmatched);

// extract_zero_speed + cluster_stays + align_marks for one trip.
std::vector<StayLocation> detect_stays(const TripTrace& trace, const ClusterParams& p, int utc_offset_min,
                                       std::vector<std::size_t>* unmatched_marks = nullptr);

// Cross-trip identity for stays: a stay snaps to the first canonical
// position whose anchor centroid lies within rho, otherwise it founds a new
// one. Returns, per trip, the canonical index of every stay. Canonical
// indices are renumbered by mean in-trip order so they follow the route.
std::vector<std::vector<std::size_t>> snap_canonical_positions(
    const std::vector<std::vector<StayLocation>>& trips, double rho, std::vector<LatLon>* anchors = nullptr);

std::string stays_to_json(const std::vector<StayLocation>& stays);
std::vector<StayLocation> stays_from_json(std::string_view text);
void write_stays(const std::vector<StayLocation>& stays, const std::filesystem::path& path);
std::vector<StayLocation> read_stays(const std::filesystem::path& path);

}  // namespace bustop
