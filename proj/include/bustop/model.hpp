#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bustop/learner.hpp"

namespace bustop {

struct TrainParams {
  ForestParams forest;       // final per-type forests
  int selector_trees = 250;  // importance ensemble
  int k_max = 8;             // feature-selection cap
  int smote_k = 5;
};

struct TypeModel {
  StayType type = StayType::BusStop;
  FeatureMask mask;
  Forest forest;
  double threshold = 0.5;
  std::array<double, kNumFeatures> importance{};
  std::vector<double> oob_f1;  // selection curve, empty for fixed masks
};

struct BuStopModel {
  TrainParams params;
  std::uint64_t seed = 0;
  std::array<TypeModel, kNumStayTypes> models;

  const TypeModel& at(StayType t) const { return models[static_cast<std::size_t>(t)]; }
};

// One binary task: SMOTE balance, importance, top-k selection, final forest.
// A fixed mask skips importance and selection. Streams derive from `seed`:
// {1} SMOTE, {2} importance, {3} selection, {4} final forest.
TypeModel train_type_model(const BinarySet& data, StayType type, const TrainParams& params, std::uint64_t seed,
                           const std::optional<FeatureMask>& fixed_mask = std::nullopt);

// Type t trains from Rng::derive_seed(seed, {t}). Throws
// Error(InsufficientClassSupport) when a type has fewer than two positives.
BuStopModel train_bustop(const Dataset& data, const TrainParams& params, std::uint64_t seed,
                         const std::optional<FeatureMask>& fixed_mask = std::nullopt);

// Positives among the four regular types; {AdHoc} when none of them fires,
// whether or not the AdHoc forest itself voted positive.
TypeSet aggregate_votes(const std::array<bool, kNumStayTypes>& positive);
std::array<bool, kNumStayTypes> poll_forests(const BuStopModel& model, const FeatureVector& fv);
TypeSet predict_stay_types(const BuStopModel& model, const FeatureVector& fv);

std::string model_to_json(const BuStopModel& model);
BuStopModel model_from_json(std::string_view text);
void write_model(const BuStopModel& model, const std::filesystem::path& path);
BuStopModel read_model(const std::filesystem::path& path);

}  // namespace bustop
