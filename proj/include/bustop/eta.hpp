#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bustop/staypoint.hpp"
#include "bustop/stats.hpp"

namespace bustop {

inline constexpr double kDefaultSpeedMps = 17.0;

struct ProfileSample {
  TypeSet types;
  TimeBand band = TimeBand::EarlyMorning;
  double duration_s = 0.0;
};

// Truth-labelled stays only; unlabelled stays carry no type to learn from.
std::vector<ProfileSample> profile_samples(const std::vector<StayLocation>& stays);

struct StayProfile {
  std::array<std::array<std::optional<double>, kNumTimeBands>, kNumStayTypes> cell;
  std::array<double, kNumStayTypes> fallback_by_type{};
  double global_fallback = 0.0;

  // Cell mean, else the type's all-band mean, else the global mean.
  double mean_duration(StayType t, TimeBand b) const;
  // Largest mean over the set; the global mean for an empty set.
  double duration_for(TypeSet types, TimeBand b) const;
};

// Per (type, band) means; a multi-type stay counts toward every listed type.
// Throws Error(EmptyTrainingSet) on no samples.
StayProfile fit_stay_profile(std::span<const ProfileSample> samples);

std::string profile_to_json(const StayProfile& p);
StayProfile profile_from_json(std::string_view text);
void write_profile(const StayProfile& p, const std::filesystem::path& path);
StayProfile read_profile(const std::filesystem::path& path);

struct ChainStop {
  std::string stay_id;
  LatLon position;
  TypeSet predicted;
  TypeSet truth;
  TimeMs actual_arrival = 0;
  int canonical = -1;  // cross-trip route position, -1 until snapped
};

struct RouteChain {
  std::string trip_id;
  std::vector<ChainStop> stops;
  std::vector<double> distances;  // distances[l]: stop l -> stop l+1, meters

  void validate() const;
};

// Stops in travel order with haversine spacing; `predicted` may be empty
// (all predictions left blank) or one set per stay.
RouteChain build_chain(std::string trip_id, const std::vector<StayLocation>& stays,
                       const std::vector<TypeSet>& predicted);

enum class TypeSource { Predicted, Truth };

struct EtaOptions {
  double speed_mps = kDefaultSpeedMps;
  int utc_offset_min = 330;
  TypeSource types = TypeSource::Predicted;
};

// Recurrence from stop `from` departing at `depart_ms`:
//   arrival(l) = arrival(l-1) + dwell(type(l-1), band(arrival(l-1))) + d(l-1, l) / speed.
// Returns arrivals (epoch ms) for stops from..end; element 0 is depart_ms.
std::vector<double> predict_arrival(const RouteChain& chain, std::size_t from, double depart_ms,
                                    const StayProfile& profile, const EtaOptions& opt);

struct EtaEstimate {
  std::string stay_id;
  double predicted_arrival_ms = 0.0;
  double error_min = 0.0;  // predicted - actual
};

// Chained from the actual arrival at `from`.
std::vector<EtaEstimate> estimate_from(const RouteChain& chain, std::size_t from, const StayProfile& profile,
                                       const EtaOptions& opt);

// Error at stop l (l >= 1) when predicting from the actual arrival at l-1,
// in seconds.
std::vector<double> next_stop_errors_s(const RouteChain& chain, const StayProfile& profile, const EtaOptions& opt);

// Snaps every chain's stops to shared route positions (sets `canonical`).
void assign_canonical(std::vector<RouteChain>& chains, double rho);

struct EtaTable {
  std::vector<int> canonical;              // bus-stop columns in route order
  std::vector<bool> misclassified;         // some trip predicted the stop without BusStop
  std::vector<std::vector<std::optional<double>>> minutes;  // [i][j], i < j
  std::vector<std::vector<std::size_t>> trips;              // supporting trip count
};

// Mean error (minutes) at bus stop j predicted from the actual arrival at
// bus stop i, over trips visiting both. Throws Error(NoCommonTrips).
double eta_entry(const std::vector<RouteChain>& chains, int canonical_i, int canonical_j, const StayProfile& profile,
                 const EtaOptions& opt, std::size_t* n_trips = nullptr);

// Upper-triangular table over canonical positions that are a truth BusStop
// in any trip. Chains must have canonical positions assigned.
EtaTable eta_error_table(const std::vector<RouteChain>& chains, const StayProfile& profile, const EtaOptions& opt);
std::string eta_table_to_csv(const EtaTable& table);

struct GroupedError {
  std::string kind;   // "day" or "band"
  std::string group;  // date or band name
  Summary minutes;
};

// Next-stop errors at truth bus stops, grouped by local date and by the band
// of the actual arrival; quartiles in minutes.
std::vector<GroupedError> daywise_error(const std::vector<RouteChain>& chains, const StayProfile& profile,
                                        const EtaOptions& opt);
std::string daywise_to_csv(const std::vector<GroupedError>& groups);

// Per-stop CSV for one trip: chain fields plus the chained prediction from
// the first stop and the next-stop error.
std::string chain_to_csv(const RouteChain& chain, const StayProfile& profile, const EtaOptions& opt);
// Reads one or more trips back (rows grouped by trip_id in file order).
std::vector<RouteChain> chains_from_csv(std::string_view text);

}  // namespace bustop
