#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bustop/features.hpp"
#include "bustop/model.hpp"
#include "bustop/staypoint.hpp"

namespace bustop {

// Every tunable of the pipeline. Resolution order, lowest first: built-in
// defaults, BUSTOP_SEED, --config JSON, command-line flags.
struct PipelineConfig {
  ClusterParams cluster;
  MfccConfig mfcc;
  TrainParams train;
  std::uint64_t seed = 7;
  double speed_mps = 17.0;
  int zoom = kDefaultZoom;
  double box_m = kDefaultBoxMeters;
  double box_n = kDefaultBoxMeters;
  int utc_offset_min = 330;
  std::string tiles;

  std::string to_json() const;
  // Overrides only the keys present in `text`.
  void merge_json(std::string_view text);
  FeatureConfig feature_config() const;
};

// Exit codes: 0 success, 1 data error (one "error: <Code>: <detail>" line on
// `err`), 2 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bustop
