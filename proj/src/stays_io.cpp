#include <json.hpp>

#include "bustop/error.hpp"
#include "bustop/staypoint.hpp"
#include "text_util.hpp"

namespace bustop {

using nlohmann::json;

std::string stays_to_json(const std::vector<StayLocation>& stays) {
  json arr = json::array();
  for (const auto& s : stays) {
    json members = json::array();
    for (const auto& m : s.members) members.push_back({{"t", m.t}, {"lat", m.lat}, {"lon", m.lon}, {"speed", m.speed}});
    json truth = json::array();
    for (auto t : s.truth.members()) truth.push_back(std::string(to_string(t)));
    arr.push_back({{"stay_id", s.stay_id},
                   {"centroid", {{"lat", s.centroid.lat}, {"lon", s.centroid.lon}}},
                   {"t_start", s.t_start},
                   {"t_end", s.t_end},
                   {"duration_s", s.duration_s},
                   {"band", std::string(to_string(s.band))},
                   {"truth", truth},
                   {"members", members}});
  }
  return arr.dump(1) + "\n";
}

std::vector<StayLocation> stays_from_json(std::string_view text) {
  std::vector<StayLocation> out;
  try {
    const auto arr = json::parse(text);
    for (const auto& j : arr) {
      StayLocation s;
      s.stay_id = j.at("stay_id").get<std::string>();
      s.centroid = {j.at("centroid").at("lat").get<double>(), j.at("centroid").at("lon").get<double>()};
      s.t_start = j.at("t_start").get<TimeMs>();
      s.t_end = j.at("t_end").get<TimeMs>();
      s.duration_s = j.at("duration_s").get<int>();
      const auto band = parse_time_band(j.at("band").get<std::string>());
      if (!band) throw Error(ErrorCode::MalformedRecord, "stays: unknown band in " + s.stay_id);
      s.band = *band;
      for (const auto& t : j.at("truth")) {
        const auto st = parse_stay_type(t.get<std::string>());
        if (!st) throw Error(ErrorCode::MalformedRecord, "stays: unknown type in " + s.stay_id);
        s.truth.insert(*st);
      }
      for (const auto& m : j.at("members")) {
        s.members.push_back({m.at("lat").get<double>(), m.at("lon").get<double>(), m.at("t").get<TimeMs>(),
                             m.at("speed").get<double>()});
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("stays json: ") + e.what());
  }
  return out;
}

void write_stays(const std::vector<StayLocation>& stays, const std::filesystem::path& path) {
  detail::write_file(path, stays_to_json(stays));
}

std::vector<StayLocation> read_stays(const std::filesystem::path& path) {
  return stays_from_json(detail::read_file(path));
}

}  // namespace bustop
