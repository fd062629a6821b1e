#pragma once

#include <random>
#include <string>

#include "bustop/learner.hpp"

namespace bustop::testing {

// Feature rows whose label set is a fixed function of the features:
// BusStop iff f7 > 0.6, Signal iff f12 > 0.7, Congestion iff f1 > 0.75,
// Turn iff f9 < 0.2, AdHoc when none of those hold.
inline Dataset rule_dataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow r;
    r.stay_id = "R" + std::to_string(i);
    for (auto& v : r.features.values) v = u(gen);
    r.features[feat::kHighlyPopulated] = gen() % 2;
    if (r.features[feat::kWifiStay] > 0.6) r.labels.insert(StayType::BusStop);
    if (r.features[feat::kRoad] > 0.7) r.labels.insert(StayType::Signal);
    if (r.features[feat::kStayDuration] > 0.75) r.labels.insert(StayType::Congestion);
    if (r.features[feat::kRsi] < 0.2) r.labels.insert(StayType::Turn);
    if (r.labels.empty()) r.labels.insert(StayType::AdHoc);
    d.rows.push_back(std::move(r));
  }
  return d;
}

inline TrainParams quick_params() {
  TrainParams p;
  p.forest.n_trees = 30;
  p.selector_trees = 40;
  p.k_max = 4;
  return p;
}

}  // namespace bustop::testing
