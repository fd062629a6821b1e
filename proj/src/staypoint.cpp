#include "bustop/staypoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bustop/error.hpp"

namespace bustop {

TimeMs ClusterParams::mark_slack_ms() const {
  return static_cast<TimeMs>(std::llround(rho / chi * 1000.0));
}

void ClusterParams::validate() const {
  if (!(chi > 0.0)) throw Error(ErrorCode::InvalidArgument, "chi must be positive");
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (max_gap_ms < 0) throw Error(ErrorCode::InvalidArgument, "max_gap_ms must be non-negative");
}

std::string_view to_string(TimeBand b) {
  switch (b) {
    case TimeBand::EarlyMorning: return "EarlyMorning";
    case TimeBand::Morning: return "Morning";
    case TimeBand::Afternoon: return "Afternoon";
    case TimeBand::Evening: return "Evening";
  }
  return "?";
}

std::optional<TimeBand> parse_time_band(std::string_view name) {
  for (auto b : kAllTimeBands) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

namespace {

constexpr TimeMs kDayMs = 86'400'000;

TimeMs floor_div(TimeMs a, TimeMs b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

}  // namespace

TimeBand assign_timezone(TimeMs t, int utc_offset_min) {
  const TimeMs local = t + static_cast<TimeMs>(utc_offset_min) * 60'000;
  const TimeMs ms_of_day = local - floor_div(local, kDayMs) * kDayMs;
  const auto hour = ms_of_day / 3'600'000;
  if (hour < 9) return TimeBand::EarlyMorning;
  if (hour < 13) return TimeBand::Morning;
  if (hour < 17) return TimeBand::Afternoon;
  return TimeBand::Evening;
}

std::string local_date(TimeMs t, int utc_offset_min) {
  const TimeMs local = t + static_cast<TimeMs>(utc_offset_min) * 60'000;
  // days since 1970-01-01 -> civil date (Hinnant's algorithm)
  long long z = floor_div(local, kDayMs) + 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const long long doe = z - era * 146097;
  const long long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long y = yoe + era * 400;
  const long long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long long mp = (5 * doy + 2) / 153;
  const long long d = doy - (153 * mp + 2) / 5 + 1;
  const long long m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04lld-%02lld-%02lld", y, m, d);
  return buf;
}

std::vector<ZeroSpeedPoint> extract_zero_speed(const TripTrace& trace, const ClusterParams& p) {
  std::vector<ZeroSpeedPoint> out;
  for (const auto& g : trace.gps) {
    if (g.speed < p.chi) out.push_back({g});
  }
  return out;
}

namespace {

StayLocation finish_stay(std::vector<GeoPoint> members, std::string id, int utc_offset_min) {
  StayLocation s;
  s.stay_id = std::move(id);
  double lat = 0, lon = 0;
  for (const auto& m : members) {
    lat += m.lat;
    lon += m.lon;
  }
  const double n = static_cast<double>(members.size());
  s.centroid = {lat / n, lon / n};
  s.t_start = members.front().t;
  s.t_end = members.back().t;
  s.duration_s = static_cast<int>(members.size());
  s.band = assign_timezone(s.t_start, utc_offset_min);
  s.members = std::move(members);
  return s;
}

std::string stay_id(std::string_view prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%03zu", index);
  return std::string(prefix) + buf;
}

}  // namespace

std::vector<StayLocation> cluster_stays(const std::vector<ZeroSpeedPoint>& points, const ClusterParams& p,
                                        std::string_view id_prefix, int utc_offset_min) {
  p.validate();
  std::vector<StayLocation> stays;
  std::vector<GeoPoint> current;
  LatLon seed;
  for (const auto& zp : points) {
    const auto& pt = zp.point;
    if (!current.empty()) {
      const bool near = haversine(seed, {pt.lat, pt.lon}) <= p.rho;
      const bool recent = pt.t - current.back().t <= p.max_gap_ms;
      if (near && recent) {
        current.push_back(pt);
        continue;
      }
      stays.push_back(finish_stay(std::move(current), stay_id(id_prefix, stays.size()), utc_offset_min));
      current.clear();
    }
    seed = {pt.lat, pt.lon};
    current.push_back(pt);
  }
  if (!current.empty()) {
    stays.push_back(finish_stay(std::move(current), stay_id(id_prefix, stays.size()), utc_offset_min));
  }
  return stays;
}

std::vector<std::size_t> align_marks(std::vector<StayLocation>& stays, const std::vector<GroundTruthMark>& marks,
                                     TimeMs slack_ms) {
  std::vector<std::size_t> unmatched;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const auto& m = marks[i];
    std::optional<std::size_t> best;
    TimeMs best_gap = 0;
    for (std::size_t k = 0; k < stays.size(); ++k) {
      const auto& s = stays[k];
      if (m.t < s.t_start - slack_ms || m.t > s.t_end + slack_ms) continue;
      const TimeMs gap = m.t < s.t_start ? s.t_start - m.t : (m.t > s.t_end ? m.t - s.t_end : 0);
      if (!best || gap < best_gap) {
        best = k;
        best_gap = gap;
      }
    }
    if (!best) {
      unmatched.push_back(i);
      continue;
    }
    auto& truth = stays[*best].truth;
    truth = truth | m.types;
    if (!truth.adhoc_exclusive()) truth.erase(StayType::AdHoc);
  }
  return unmatched;
}

void report_unmatched_marks(ValidationReport& report, const std::vector<GroundTruthMark>& marks,
                            const std::vector<std::size_t>& unmatched) {
  for (auto i : unmatched) {
    report.violations.push_back({"mark-unmatched", "mark " + std::to_string(i) + " at t=" +
                                                       std::to_string(marks[i].t) + " matches no stay"});
  }
}

std::vector<StayLocation> detect_stays(const TripTrace& trace, const ClusterParams& p, int utc_offset_min,
                                       std::vector<std::size_t>* unmatched_marks) {
  auto stays = cluster_stays(extract_zero_speed(trace, p), p, trace.trip_id + "-", utc_offset_min);
  auto unmatched = align_marks(stays, trace.marks, p.mark_slack_ms());
  if (unmatched_marks) *unmatched_marks = std::move(unmatched);
  return stays;
}

std::vector<std::vector<std::size_t>> snap_canonical_positions(const std::vector<std::vector<StayLocation>>& trips,
                                                               double rho, std::vector<LatLon>* anchors_out) {
  std::vector<LatLon> anchors;
  std::vector<double> order_sum;
  std::vector<std::size_t> order_n;
  std::vector<std::vector<std::size_t>> assignment(trips.size());
  for (std::size_t ti = 0; ti < trips.size(); ++ti) {
    for (std::size_t si = 0; si < trips[ti].size(); ++si) {
      const auto c = trips[ti][si].centroid;
      std::size_t k = 0;
      for (; k < anchors.size(); ++k) {
        if (haversine(anchors[k], c) <= rho) break;
      }
      if (k == anchors.size()) {
        anchors.push_back(c);
        order_sum.push_back(0.0);
        order_n.push_back(0);
      }
      order_sum[k] += static_cast<double>(si);
      ++order_n[k];
      assignment[ti].push_back(k);
    }
  }
  std::vector<std::size_t> perm(anchors.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return order_sum[a] / static_cast<double>(order_n[a]) < order_sum[b] / static_cast<double>(order_n[b]);
  });
  std::vector<std::size_t> rank(anchors.size());
  for (std::size_t r = 0; r < perm.size(); ++r) rank[perm[r]] = r;
  for (auto& trip : assignment) {
    for (auto& k : trip) k = rank[k];
  }
  if (anchors_out) {
    anchors_out->clear();
    for (auto k : perm) anchors_out->push_back(anchors[k]);
  }
  return assignment;
}

}  // namespace bustop
