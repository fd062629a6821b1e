#include "bustop/eta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bustop/error.hpp"
#include "bustop/geo.hpp"
#include "text_util.hpp"

namespace bustop {

using nlohmann::json;

std::vector<ProfileSample> profile_samples(const std::vector<StayLocation>& stays) {
  std::vector<ProfileSample> out;
  for (const auto& s : stays) {
    if (!s.truth.empty()) out.push_back({s.truth, s.band, static_cast<double>(s.duration_s)});
  }
  return out;
}

double StayProfile::mean_duration(StayType t, TimeBand b) const {
  const auto& c = cell[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)];
  return c ? *c : fallback_by_type[static_cast<std::size_t>(t)];
}

double StayProfile::duration_for(TypeSet types, TimeBand b) const {
  if (types.empty()) return global_fallback;
  double best = 0.0;
  for (auto t : types.members()) best = std::max(best, mean_duration(t, b));
  return best;
}

StayProfile fit_stay_profile(std::span<const ProfileSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no labelled stays to profile");
  std::array<std::array<double, kNumTimeBands>, kNumStayTypes> sum{};
  std::array<std::array<std::size_t, kNumTimeBands>, kNumStayTypes> n{};
  std::array<double, kNumStayTypes> type_sum{};
  std::array<std::size_t, kNumStayTypes> type_n{};
  double total = 0.0;
  for (const auto& s : samples) {
    if (!(s.duration_s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative stay duration");
    total += s.duration_s;
    for (auto t : s.types.members()) {
      const auto ti = static_cast<std::size_t>(t);
      const auto bi = static_cast<std::size_t>(s.band);
      sum[ti][bi] += s.duration_s;
      ++n[ti][bi];
      type_sum[ti] += s.duration_s;
      ++type_n[ti];
    }
  }
  StayProfile p;
  p.global_fallback = total / static_cast<double>(samples.size());
  for (std::size_t t = 0; t < kNumStayTypes; ++t) {
    p.fallback_by_type[t] = type_n[t] ? type_sum[t] / static_cast<double>(type_n[t]) : p.global_fallback;
    for (std::size_t b = 0; b < kNumTimeBands; ++b) {
      if (n[t][b]) p.cell[t][b] = sum[t][b] / static_cast<double>(n[t][b]);
    }
  }
  return p;
}

std::string profile_to_json(const StayProfile& p) {
  json j;
  j["global_fallback_s"] = p.global_fallback;
  json types = json::object();
  for (auto t : kAllStayTypes) {
    const auto ti = static_cast<std::size_t>(t);
    json bands = json::object();
    for (auto b : kAllTimeBands) {
      const auto& c = p.cell[ti][static_cast<std::size_t>(b)];
      bands[std::string(to_string(b))] = c ? json(*c) : json(nullptr);
    }
    types[std::string(to_string(t))] = {{"fallback_s", p.fallback_by_type[ti]}, {"bands", std::move(bands)}};
  }
  j["types"] = std::move(types);
  return j.dump(1);
}

StayProfile profile_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    StayProfile p;
    p.global_fallback = j.at("global_fallback_s").get<double>();
    for (auto t : kAllStayTypes) {
      const auto ti = static_cast<std::size_t>(t);
      const auto& tj = j.at("types").at(std::string(to_string(t)));
      p.fallback_by_type[ti] = tj.at("fallback_s").get<double>();
      for (auto b : kAllTimeBands) {
        const auto& c = tj.at("bands").at(std::string(to_string(b)));
        if (!c.is_null()) p.cell[ti][static_cast<std::size_t>(b)] = c.get<double>();
      }
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("profile: ") + e.what());
  }
}

void write_profile(const StayProfile& p, const std::filesystem::path& path) {
  detail::write_file(path, profile_to_json(p) + "\n");
}

StayProfile read_profile(const std::filesystem::path& path) { return profile_from_json(detail::read_file(path)); }

void RouteChain::validate() const {
  if (stops.empty()) throw Error(ErrorCode::InvalidArgument, "empty route chain");
  if (distances.size() + 1 != stops.size()) throw Error(ErrorCode::InvalidArgument, "chain distance count mismatch");
  for (double d : distances) {
    if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative chain distance");
  }
}

RouteChain build_chain(std::string trip_id, const std::vector<StayLocation>& stays,
                       const std::vector<TypeSet>& predicted) {
  if (!predicted.empty() && predicted.size() != stays.size()) {
    throw Error(ErrorCode::LengthMismatch, "one predicted type set per stay required");
  }
  RouteChain c;
  c.trip_id = std::move(trip_id);
  for (std::size_t i = 0; i < stays.size(); ++i) {
    ChainStop s;
    s.stay_id = stays[i].stay_id;
    s.position = stays[i].centroid;
    s.truth = stays[i].truth;
    if (!predicted.empty()) s.predicted = predicted[i];
    s.actual_arrival = stays[i].t_start;
    if (i > 0) c.distances.push_back(haversine(c.stops.back().position, s.position));
    c.stops.push_back(std::move(s));
  }
  return c;
}

namespace {

TypeSet stop_types(const ChainStop& s, const EtaOptions& opt) {
  return opt.types == TypeSource::Truth ? s.truth : s.predicted;
}

// Arrival at stop l + 1 for a bus that reached stop l at `arrival_ms`.
double next_arrival(const RouteChain& chain, std::size_t l, double arrival_ms, const StayProfile& profile,
                    const EtaOptions& opt) {
  const auto band = assign_timezone(static_cast<TimeMs>(std::llround(arrival_ms)), opt.utc_offset_min);
  const double dwell_ms = 1000.0 * profile.duration_for(stop_types(chain.stops[l], opt), band);
  const double travel_ms = 1000.0 * chain.distances[l] / opt.speed_mps;
  return arrival_ms + dwell_ms + travel_ms;
}

}  // namespace

std::vector<double> predict_arrival(const RouteChain& chain, std::size_t from, double depart_ms,
                                    const StayProfile& profile, const EtaOptions& opt) {
  chain.validate();
  if (!(opt.speed_mps > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  if (from >= chain.stops.size()) throw Error(ErrorCode::InvalidArgument, "start stop out of range");
  std::vector<double> out{depart_ms};
  for (std::size_t l = from; l + 1 < chain.stops.size(); ++l) out.push_back(next_arrival(chain, l, out.back(), profile, opt));
  return out;
}

std::vector<EtaEstimate> estimate_from(const RouteChain& chain, std::size_t from, const StayProfile& profile,
                                       const EtaOptions& opt) {
  chain.validate();
  if (from >= chain.stops.size()) throw Error(ErrorCode::InvalidArgument, "start stop out of range");
  const auto arrivals =
      predict_arrival(chain, from, static_cast<double>(chain.stops[from].actual_arrival), profile, opt);
  std::vector<EtaEstimate> out;
  for (std::size_t k = 0; k < arrivals.size(); ++k) {
    const auto& stop = chain.stops[from + k];
    out.push_back({stop.stay_id, arrivals[k], (arrivals[k] - static_cast<double>(stop.actual_arrival)) / 60000.0});
  }
  return out;
}

std::vector<double> next_stop_errors_s(const RouteChain& chain, const StayProfile& profile, const EtaOptions& opt) {
  chain.validate();
  if (!(opt.speed_mps > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  std::vector<double> out;
  for (std::size_t l = 1; l < chain.stops.size(); ++l) {
    const double predicted =
        next_arrival(chain, l - 1, static_cast<double>(chain.stops[l - 1].actual_arrival), profile, opt);
    out.push_back((predicted - static_cast<double>(chain.stops[l].actual_arrival)) / 1000.0);
  }
  return out;
}

void assign_canonical(std::vector<RouteChain>& chains, double rho) {
  std::vector<std::vector<StayLocation>> trips;
  for (const auto& c : chains) {
    std::vector<StayLocation> stays;
    for (const auto& s : c.stops) {
      StayLocation st;
      st.centroid = s.position;
      stays.push_back(std::move(st));
    }
    trips.push_back(std::move(stays));
  }
  const auto assignment = snap_canonical_positions(trips, rho);
  for (std::size_t i = 0; i < chains.size(); ++i) {
    for (std::size_t k = 0; k < chains[i].stops.size(); ++k) {
      chains[i].stops[k].canonical = static_cast<int>(assignment[i][k]);
    }
  }
}

namespace {

std::optional<std::size_t> find_canonical(const RouteChain& c, int canonical) {
  for (std::size_t k = 0; k < c.stops.size(); ++k) {
    if (c.stops[k].canonical == canonical) return k;
  }
  return std::nullopt;
}

}  // namespace

double eta_entry(const std::vector<RouteChain>& chains, int canonical_i, int canonical_j, const StayProfile& profile,
                 const EtaOptions& opt, std::size_t* n_trips) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : chains) {
    const auto a = find_canonical(c, canonical_i);
    const auto b = find_canonical(c, canonical_j);
    if (!a || !b || *a >= *b) continue;
    const auto arrivals = predict_arrival(c, *a, static_cast<double>(c.stops[*a].actual_arrival), profile, opt);
    sum += (arrivals[*b - *a] - static_cast<double>(c.stops[*b].actual_arrival)) / 60000.0;
    ++n;
  }
  if (n_trips) *n_trips = n;
  if (n == 0) {
    throw Error(ErrorCode::NoCommonTrips,
                "no trip visits " + std::to_string(canonical_i) + " before " + std::to_string(canonical_j));
  }
  return sum / static_cast<double>(n);
}

EtaTable eta_error_table(const std::vector<RouteChain>& chains, const StayProfile& profile, const EtaOptions& opt) {
  std::map<int, bool> stops;  // canonical -> misclassified
  for (const auto& c : chains) {
    for (const auto& s : c.stops) {
      if (s.canonical < 0) throw Error(ErrorCode::InvalidArgument, "chain stops lack canonical positions");
      if (!s.truth.contains(StayType::BusStop)) continue;
      auto& flag = stops[s.canonical];
      if (!s.predicted.contains(StayType::BusStop)) flag = true;
    }
  }
  EtaTable t;
  for (const auto& [k, flag] : stops) {
    t.canonical.push_back(k);
    t.misclassified.push_back(flag);
  }
  const auto m = t.canonical.size();
  t.minutes.assign(m, std::vector<std::optional<double>>(m));
  t.trips.assign(m, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      try {
        t.minutes[i][j] = eta_entry(chains, t.canonical[i], t.canonical[j], profile, opt, &t.trips[i][j]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCommonTrips) throw;
      }
    }
  }
  return t;
}

std::string eta_table_to_csv(const EtaTable& table) {
  std::ostringstream out;
  const auto m = table.canonical.size();
  out << "from";
  for (std::size_t j = 0; j < m; ++j) out << ",BS" << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    out << "BS" << (i + 1);
    for (std::size_t j = 0; j < m; ++j) {
      out << ',';
      if (table.minutes[i][j]) out << detail::format_double(*table.minutes[i][j]);
    }
    out << '\n';
  }
  out << "misclassified";
  for (std::size_t j = 0; j < m; ++j) out << ',' << (table.misclassified[j] ? 1 : 0);
  out << '\n';
  return out.str();
}

std::vector<GroupedError> daywise_error(const std::vector<RouteChain>& chains, const StayProfile& profile,
                                        const EtaOptions& opt) {
  std::map<std::string, std::vector<double>> by_day;
  std::map<TimeBand, std::vector<double>> by_band;
  for (const auto& c : chains) {
    const auto errors = next_stop_errors_s(c, profile, opt);
    for (std::size_t l = 1; l < c.stops.size(); ++l) {
      const auto& s = c.stops[l];
      if (!s.truth.contains(StayType::BusStop)) continue;
      const double minutes = errors[l - 1] / 60.0;
      by_day[local_date(s.actual_arrival, opt.utc_offset_min)].push_back(minutes);
      by_band[assign_timezone(s.actual_arrival, opt.utc_offset_min)].push_back(minutes);
    }
  }
  std::vector<GroupedError> out;
  for (const auto& [day, v] : by_day) out.push_back({"day", day, summarize(v)});
  for (const auto& [band, v] : by_band) out.push_back({"band", std::string(to_string(band)), summarize(v)});
  return out;
}

std::string daywise_to_csv(const std::vector<GroupedError>& groups) {
  std::ostringstream out;
  out << "kind,group,n,min,q1,median,q3,max,mean\n";
  for (const auto& g : groups) {
    const auto& s = g.minutes;
    out << g.kind << ',' << g.group << ',' << s.n << ',' << detail::format_double(s.min) << ','
        << detail::format_double(s.q1) << ',' << detail::format_double(s.median) << ','
        << detail::format_double(s.q3) << ',' << detail::format_double(s.max) << ','
        << detail::format_double(s.mean) << '\n';
  }
  return out.str();
}

namespace {

constexpr std::string_view kChainHeader =
    "trip_id,index,stay_id,lat,lon,dist_from_prev_m,actual_arrival_ms,predicted_types,truth_types,"
    "predicted_arrival_ms,error_s,next_stop_error_s";

}  // namespace

std::string chain_to_csv(const RouteChain& chain, const StayProfile& profile, const EtaOptions& opt) {
  chain.validate();
  const auto chained = estimate_from(chain, 0, profile, opt);
  const auto next = next_stop_errors_s(chain, profile, opt);
  std::ostringstream out;
  out << kChainHeader << '\n';
  for (std::size_t l = 0; l < chain.stops.size(); ++l) {
    const auto& s = chain.stops[l];
    out << chain.trip_id << ',' << l << ',' << s.stay_id << ',' << detail::format_double(s.position.lat) << ','
        << detail::format_double(s.position.lon) << ','
        << detail::format_double(l == 0 ? 0.0 : chain.distances[l - 1]) << ',' << s.actual_arrival << ','
        << format_type_set(s.predicted) << ',' << format_type_set(s.truth) << ','
        << detail::format_double(chained[l].predicted_arrival_ms) << ','
        << detail::format_double(chained[l].error_min * 60.0) << ',';
    if (l > 0) out << detail::format_double(next[l - 1]);
    out << '\n';
  }
  return out.str();
}

std::vector<RouteChain> chains_from_csv(std::string_view text) {
  detail::CsvReader reader(std::string(text), "eta.csv");
  reader.expect_header(kChainHeader);
  std::vector<RouteChain> chains;
  std::string_view line;
  while (reader.next(line)) {
    if (line == kChainHeader) continue;  // concatenated files
    const auto f = detail::split(line);
    if (f.size() != 12) reader.fail("expected 12 fields");
    const std::string trip(f[0]);
    std::size_t index = 0;
    ChainStop s;
    double dist = 0.0;
    if (!detail::parse_number(f[1], index)) reader.fail("bad index");
    s.stay_id = std::string(f[2]);
    if (!detail::parse_number(f[3], s.position.lat) || !detail::parse_number(f[4], s.position.lon)) {
      reader.fail("bad coordinates");
    }
    if (!detail::parse_number(f[5], dist) || dist < 0.0) reader.fail("bad distance");
    if (!detail::parse_number(f[6], s.actual_arrival)) reader.fail("bad arrival");
    try {
      s.predicted = parse_type_set(f[7]);
      s.truth = parse_type_set(f[8]);
    } catch (const Error& e) {
      reader.fail(e.what());
    }
    if (chains.empty() || chains.back().trip_id != trip || index == 0) {
      if (index != 0) reader.fail("trip does not start at index 0");
      chains.push_back(RouteChain{trip, {}, {}});
    }
    auto& c = chains.back();
    if (index != c.stops.size()) reader.fail("stop indices out of order");
    if (index > 0) c.distances.push_back(dist);
    c.stops.push_back(std::move(s));
  }
  return chains;
}

}  // namespace bustop
