#include <cmath>
#include <algorithm>
#include <cstring>
#include <map>

#include <json.hpp>

#include "bustop/error.hpp"
#include "bustop/trace.hpp"
#include "text_util.hpp"

namespace bustop {

namespace fs = std::filesystem;
using detail::CsvReader;
using detail::format_double;
using detail::parse_number;

namespace {

constexpr std::string_view kGpsHeader = "t_ms,lat,lon,speed_mps";
constexpr std::string_view kImuHeader = "t_ms,ax,ay,az,gx,gy,gz";
constexpr std::string_view kWifiHeader = "t_ms,bssid";
constexpr std::string_view kLabelsHeader = "t_ms,types";

CsvReader open_csv(const fs::path& dir, const char* name) {
  const auto path = dir / name;
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
  return CsvReader(detail::read_file(path), name);
}

template <typename T>
T field(CsvReader& r, std::string_view s, const char* what) {
  T v{};
  if (!parse_number(s, v)) r.fail(std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<GeoPoint> read_gps(const fs::path& dir) {
  auto r = open_csv(dir, "gps.csv");
  r.expect_header(kGpsHeader);
  std::vector<GeoPoint> out;
  std::string_view line;
  while (r.next(line)) {
    auto f = detail::split(line);
    if (f.size() != 4) r.fail("expected 4 fields");
    GeoPoint p;
    p.t = field<TimeMs>(r, f[0], "t_ms");
    p.lat = field<double>(r, f[1], "lat");
    p.lon = field<double>(r, f[2], "lon");
    p.speed = field<double>(r, f[3], "speed_mps");
    if (!(p.lat >= -90.0 && p.lat <= 90.0)) r.fail("lat out of range");
    if (!(p.lon >= -180.0 && p.lon <= 180.0)) r.fail("lon out of range");
    if (!(p.speed >= 0.0)) r.fail("negative speed");
    if (!out.empty() && p.t <= out.back().t) {
      throw Error(ErrorCode::NonMonotonicTimestamp, "gps.csv line " + std::to_string(r.line_no()));
    }
    out.push_back(p);
  }
  if (out.empty()) r.fail("no GPS rows");
  return out;
}

std::vector<ImuSample> read_imu(const fs::path& dir) {
  auto r = open_csv(dir, "imu.csv");
  r.expect_header(kImuHeader);
  std::vector<ImuSample> out;
  std::string_view line;
  while (r.next(line)) {
    auto f = detail::split(line);
    if (f.size() != 7) r.fail("expected 7 fields");
    ImuSample s;
    s.t = field<TimeMs>(r, f[0], "t_ms");
    s.ax = field<double>(r, f[1], "ax");
    s.ay = field<double>(r, f[2], "ay");
    s.az = field<double>(r, f[3], "az");
    // gyroscope columns are checked for shape only
    for (int k = 4; k < 7; ++k) field<double>(r, f[static_cast<std::size_t>(k)], "gyro");
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az)) r.fail("non-finite acceleration");
    if (!out.empty() && s.t < out.back().t) {
      throw Error(ErrorCode::NonMonotonicTimestamp, "imu.csv line " + std::to_string(r.line_no()));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<WifiScan> read_wifi(const fs::path& dir) {
  auto r = open_csv(dir, "wifi.csv");
  r.expect_header(kWifiHeader);
  std::map<TimeMs, std::set<std::string>> scans;
  std::string_view line;
  while (r.next(line)) {
    auto comma = line.find(',');
    if (comma == std::string_view::npos) r.fail("expected 2 fields");
    const auto t = field<TimeMs>(r, line.substr(0, comma), "t_ms");
    auto bssid = line.substr(comma + 1);
    if (bssid.empty()) r.fail("empty bssid");
    scans[t].insert(std::string(bssid));
  }
  std::vector<WifiScan> out;
  out.reserve(scans.size());
  for (auto& [t, ids] : scans) out.push_back({t, std::move(ids)});
  return out;
}

std::vector<GroundTruthMark> read_labels(const fs::path& dir) {
  auto r = open_csv(dir, "labels.csv");
  r.expect_header(kLabelsHeader);
  std::vector<GroundTruthMark> out;
  std::string_view line;
  while (r.next(line)) {
    auto f = detail::split(line);
    if (f.size() != 2) r.fail("expected 2 fields");
    GroundTruthMark m;
    m.t = field<TimeMs>(r, f[0], "t_ms");
    try {
      m.types = parse_type_set(f[1]);
    } catch (const Error& e) {
      r.fail(e.what());
    }
    if (m.types.empty()) r.fail("empty type list");
    out.push_back(m);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

AudioStream read_audio(const fs::path& dir) {
  const auto meta_path = dir / "audio.json";
  const auto pcm_path = dir / "audio.pcm";
  if (!fs::exists(meta_path)) throw Error(ErrorCode::MissingFile, meta_path.string());
  if (!fs::exists(pcm_path)) throw Error(ErrorCode::MissingFile, pcm_path.string());

  AudioStream audio;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(detail::read_file(meta_path));
    audio.sample_rate = meta.at("sample_rate").get<int>();
    audio.t0 = meta.at("t0_ms").get<TimeMs>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, "audio.json: " + std::string(e.what()));
  }
  if (audio.sample_rate != kAudioSampleRate) {
    throw Error(ErrorCode::WrongSampleRate, "audio.json declares " + std::to_string(audio.sample_rate) +
                                                " Hz, only 8000 Hz is accepted");
  }

  const auto bytes = detail::read_file(pcm_path);
  if (bytes.size() % 2 != 0) throw Error(ErrorCode::MalformedRecord, "audio.pcm has an odd byte count");
  audio.samples.resize(bytes.size() / 2);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    audio.samples[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
  }
  return audio;
}

}  // namespace

TripTrace parse_trip(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingFile, dir.string() + " is not a directory");
  for (const char* name : {"gps.csv", "imu.csv", "wifi.csv", "labels.csv", "audio.pcm", "audio.json"}) {
    if (!fs::exists(dir / name)) throw Error(ErrorCode::MissingFile, (dir / name).string());
  }

  TripTrace trace;
  trace.trip_id = dir.filename().string();
  if (trace.trip_id.empty()) trace.trip_id = dir.parent_path().filename().string();
  const auto meta_path = dir / "trip.json";
  if (fs::exists(meta_path)) {
    try {
      auto meta = nlohmann::json::parse(detail::read_file(meta_path));
      trace.trip_id = meta.value("trip_id", trace.trip_id);
      trace.direction = meta.value("direction", std::string("Up")) == "Down" ? Direction::Down : Direction::Up;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, "trip.json: " + std::string(e.what()));
    }
  }

  trace.gps = read_gps(dir);
  trace.imu = read_imu(dir);
  trace.wifi = read_wifi(dir);
  trace.marks = read_labels(dir);
  trace.audio = read_audio(dir);
  return trace;
}

void write_trip(const TripTrace& trace, const fs::path& dir) {
  fs::create_directories(dir);

  std::string out;
  out.reserve(trace.gps.size() * 48);
  out.append(kGpsHeader).push_back('\n');
  for (const auto& p : trace.gps) {
    out += std::to_string(p.t) + ',' + format_double(p.lat) + ',' + format_double(p.lon) + ',' +
           format_double(p.speed) + '\n';
  }
  detail::write_file(dir / "gps.csv", out);

  out.clear();
  out.reserve(trace.imu.size() * 48);
  out.append(kImuHeader).push_back('\n');
  for (const auto& s : trace.imu) {
    out += std::to_string(s.t) + ',' + format_double(s.ax) + ',' + format_double(s.ay) + ',' +
           format_double(s.az) + ",0,0,0\n";
  }
  detail::write_file(dir / "imu.csv", out);

  out.clear();
  out.append(kWifiHeader).push_back('\n');
  for (const auto& scan : trace.wifi) {
    for (const auto& b : scan.bssids) out += std::to_string(scan.t) + ',' + b + '\n';
  }
  detail::write_file(dir / "wifi.csv", out);

  out.clear();
  out.append(kLabelsHeader).push_back('\n');
  for (const auto& m : trace.marks) out += std::to_string(m.t) + ',' + format_type_set(m.types) + '\n';
  detail::write_file(dir / "labels.csv", out);

  std::string pcm(trace.audio.samples.size() * 2, '\0');
  for (std::size_t i = 0; i < trace.audio.samples.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(trace.audio.samples[i]);
    pcm[2 * i] = static_cast<char>(u & 0xFF);
    pcm[2 * i + 1] = static_cast<char>(u >> 8);
  }
  detail::write_file(dir / "audio.pcm", pcm);

  nlohmann::json meta = {{"sample_rate", trace.audio.sample_rate}, {"t0_ms", trace.audio.t0}};
  detail::write_file(dir / "audio.json", meta.dump() + "\n");

  nlohmann::json trip = {{"trip_id", trace.trip_id},
                         {"direction", trace.direction == Direction::Down ? "Down" : "Up"}};
  detail::write_file(dir / "trip.json", trip.dump() + "\n");
}

}  // namespace bustop
