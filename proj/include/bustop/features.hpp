#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bustop/mapenc.hpp"
#include "bustop/mfcc.hpp"
#include "bustop/staypoint.hpp"
#include "bustop/trace.hpp"

namespace bustop {

inline constexpr std::size_t kNumFeatures = 13;

// Feature indices (0-based) for f1..f13.
namespace feat {
inline constexpr std::size_t kStayDuration = 0;   // f1
inline constexpr std::size_t kMfccFirst = 1;      // f2..f6
inline constexpr std::size_t kWifiStay = 6;       // f7
inline constexpr std::size_t kWifiEdge = 7;       // f8
inline constexpr std::size_t kRsi = 8;            // f9
inline constexpr std::size_t kResidential = 9;    // f10
inline constexpr std::size_t kNatural = 10;       // f11
inline constexpr std::size_t kRoad = 11;          // f12
inline constexpr std::size_t kHighlyPopulated = 12;  // f13
}  // namespace feat

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const FeatureVector&) const = default;

  // Empty when every documented invariant holds.
  std::vector<std::string> invariant_violations() const;
};

// "f1".."f13"
std::string feature_name(std::size_t index);

inline constexpr double kRsiWindowMeters = 50.0;

// Trip-level state shared by every stay of one trip: the reoriented IMU
// stream and its mean vertical acceleration.
class TripContext {
 public:
  explicit TripContext(const TripTrace& trace);

  const TripTrace& trace() const { return trace_; }
  bool has_imu() const { return imu_ok_; }
  const std::vector<ImuSample>& oriented_imu() const { return oriented_; }
  double mean_z() const { return mean_z_; }
  const std::string& imu_error() const { return imu_error_; }

 private:
  const TripTrace& trace_;
  std::vector<ImuSample> oriented_;
  double mean_z_ = 0.0;
  bool imu_ok_ = false;
  std::string imu_error_;
};

// Mean over frames of each MFCC coefficient, sorted descending; first five.
std::array<double, 5> top5_mfcc(const TripTrace& trace, const StayLocation& stay, const MfccExtractor& mfcc);
std::array<double, 5> top5_from_matrix(const Matrix& coeffs);

// 20 log10(rms(all samples) / mean rms of the quietest 10% of frames);
// both RMS values are floored at one quantisation step.
double snr_db(const TripTrace& trace, const StayLocation& stay, const MfccConfig& cfg = {});
double snr_db(std::span<const std::int16_t> samples, const MfccConfig& cfg = {});

int wifi_count_at_stay(const TripTrace& trace, const StayLocation& stay);
// `prev` null means the first stay of the trip; the window opens at trip start.
int wifi_count_on_edge(const TripTrace& trace, const StayLocation* prev, const StayLocation& cur);

// RMS(residual_z) / mean(speeds).
double road_surface_index(std::span<const double> residual_z, std::span<const double> speeds);

struct RsiWindow {
  TimeMs t_begin = 0;
  TimeMs t_end = 0;  // exclusive: the stay start
  double travelled_m = 0.0;
};
// Span of the last 50 m of travel before the stay (shorter at trip start).
RsiWindow rsi_window(const TripTrace& trace, const StayLocation& stay);

double rsi(const TripContext& ctx, const StayLocation& stay);

struct FeatureConfig {
  MfccConfig mfcc;
  double box_m = kDefaultBoxMeters;
  double box_n = kDefaultBoxMeters;
};

class FeatureBuilder {
 public:
  FeatureBuilder(const TileStore& tiles, FeatureConfig cfg = {});

  // Throws Error(MissingFeature) naming every feature group that could not
  // be computed and why; never returns a partial vector.
  FeatureVector build(const TripContext& ctx, const StayLocation* prev, const StayLocation& stay) const;

 private:
  const TileStore& tiles_;
  FeatureConfig cfg_;
  MfccExtractor mfcc_;
};

FeatureVector build_feature_vector(const TripTrace& trace, const StayLocation* prev_stay, const StayLocation& stay,
                                   const TileStore& tiles, const FeatureConfig& cfg = {});

struct FeatureRow {
  std::string stay_id;
  FeatureVector features;
  TypeSet labels;
};

struct FeaturizeResult {
  std::vector<FeatureRow> rows;
  std::vector<std::string> skipped;  // "<stay_id>: <reason>"
};

// Builds vectors for every stay of a trip in order; stays whose features
// cannot be computed are listed in `skipped`.
FeaturizeResult featurize_trip(const TripTrace& trace, const std::vector<StayLocation>& stays,
                               const TileStore& tiles, const FeatureConfig& cfg = {});

// CSV: stay_id,f1,...,f13,labels
std::string features_to_csv(const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> features_from_csv(std::string_view text);
void write_features(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_features(const std::filesystem::path& path);

}  // namespace bustop
