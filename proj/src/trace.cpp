#include "bustop/trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bustop/error.hpp"

namespace bustop {

std::string_view to_string(StayType t) {
  switch (t) {
    case StayType::BusStop: return "BusStop";
    case StayType::Signal: return "Signal";
    case StayType::Congestion: return "Congestion";
    case StayType::Turn: return "Turn";
    case StayType::AdHoc: return "AdHoc";
  }
  return "?";
}

std::optional<StayType> parse_stay_type(std::string_view name) {
  for (auto t : kAllStayTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

std::size_t TypeSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<StayType> TypeSet::members() const {
  std::vector<StayType> out;
  for (auto t : kAllStayTypes) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

std::string format_type_set(TypeSet s) {
  std::string out;
  for (auto t : s.members()) {
    if (!out.empty()) out += '|';
    out += to_string(t);
  }
  return out;
}

TypeSet parse_type_set(std::string_view text) {
  TypeSet s;
  if (text.empty()) return s;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('|', start);
    if (end == std::string_view::npos) end = text.size();
    auto name = text.substr(start, end - start);
    auto t = parse_stay_type(name);
    if (!t) throw Error(ErrorCode::MalformedRecord, "unknown stay type '" + std::string(name) + "'");
    s.insert(*t);
    start = end + 1;
  }
  return s;
}

std::size_t AudioStream::index_at(TimeMs t) const {
  if (t <= t0) return 0;
  // sample i sits at t0 + i * 1000 / sample_rate
  const auto num = (t - t0) * static_cast<TimeMs>(sample_rate);
  const auto idx = static_cast<std::size_t>((num + 999) / 1000);
  return std::min(idx, samples.size());
}

TimeMs AudioStream::end_time() const {
  return t0 + static_cast<TimeMs>(samples.size()) * 1000 / static_cast<TimeMs>(sample_rate);
}

TimeMs TripTrace::start_time() const { return gps.empty() ? 0 : gps.front().t; }
TimeMs TripTrace::end_time() const { return gps.empty() ? 0 : gps.back().t; }

std::size_t ValidationReport::count(std::string_view kind) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [&](const Violation& v) { return v.kind == kind; }));
}

namespace {

template <typename Range, typename TimeOf>
void check_span(const Range& records, TimeOf time_of, TimeMs lo, TimeMs hi, std::string_view stream,
                std::vector<Violation>& out) {
  std::size_t outside = 0;
  for (const auto& r : records) {
    const TimeMs t = time_of(r);
    if (t < lo || t > hi) ++outside;
  }
  if (outside > 0) {
    out.push_back({"stream-out-of-span", std::string(stream) + ": " + std::to_string(outside) +
                                             " record(s) outside GPS span +/- 60 s"});
  }
}

}  // namespace

ValidationReport validate_trace(const TripTrace& trace) {
  ValidationReport rep;
  rep.n_gps = trace.gps.size();
  rep.n_imu = trace.imu.size();
  rep.n_audio_samples = trace.audio.samples.size();
  rep.n_wifi_scans = trace.wifi.size();
  rep.n_marks = trace.marks.size();
  auto& v = rep.violations;

  if (trace.gps.empty()) {
    v.push_back({"gps-empty", "trip has no GPS fixes"});
    return rep;
  }
  rep.span_start = trace.gps.front().t;
  rep.span_end = trace.gps.back().t;

  for (std::size_t i = 0; i < trace.gps.size(); ++i) {
    const auto& p = trace.gps[i];
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
      v.push_back({"gps-coordinate-range", "fix " + std::to_string(i)});
    }
    if (!(p.speed >= 0.0)) v.push_back({"gps-negative-speed", "fix " + std::to_string(i)});
    if (i > 0 && p.t <= trace.gps[i - 1].t) {
      v.push_back({"gps-non-monotonic", "fix " + std::to_string(i)});
    }
  }
  for (std::size_t i = 0; i < trace.imu.size(); ++i) {
    const auto& s = trace.imu[i];
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az)) {
      v.push_back({"imu-non-finite", "sample " + std::to_string(i)});
    }
    if (i > 0 && s.t < trace.imu[i - 1].t) v.push_back({"imu-non-monotonic", "sample " + std::to_string(i)});
  }
  if (trace.audio.sample_rate != kAudioSampleRate) {
    v.push_back({"audio-sample-rate", std::to_string(trace.audio.sample_rate) + " Hz"});
  }

  const TimeMs lo = rep.span_start - kStreamSpanSlackMs;
  const TimeMs hi = rep.span_end + kStreamSpanSlackMs;
  check_span(trace.imu, [](const ImuSample& s) { return s.t; }, lo, hi, "imu", v);
  check_span(trace.wifi, [](const WifiScan& s) { return s.t; }, lo, hi, "wifi", v);
  check_span(trace.marks, [](const GroundTruthMark& m) { return m.t; }, lo, hi, "labels", v);
  if (!trace.audio.samples.empty() && (trace.audio.t0 < lo || trace.audio.end_time() > hi)) {
    v.push_back({"stream-out-of-span", "audio: stream extends outside GPS span +/- 60 s"});
  }

  for (std::size_t i = 0; i < trace.marks.size(); ++i) {
    const auto& m = trace.marks[i];
    if (m.types.empty()) v.push_back({"mark-empty", "mark " + std::to_string(i)});
    if (!m.types.adhoc_exclusive()) {
      v.push_back({"adhoc-exclusivity", "mark " + std::to_string(i) + " combines AdHoc with " +
                                            format_type_set(m.types)});
    }
  }
  return rep;
}

}  // namespace bustop
