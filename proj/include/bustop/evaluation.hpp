#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bustop/model.hpp"

namespace bustop {

struct CvConfig {
  int folds = 5;
  int repeats = 10;
};

struct TypeCvStats {
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;
  BinaryConfusion confusion;   // summed over every held-out fold
  std::vector<double> fold_f1;  // repeat-major
};

struct CvReport {
  CvConfig config;
  std::array<TypeCvStats, kNumStayTypes> per_type;
};

// Stratified partition for one binary task: positives are shuffled and dealt
// round-robin into the folds, then negatives continue the deal. Fold sizes
// differ by at most one row, and so do per-fold positive counts.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::uint8_t>& y, int folds, Rng& rng);

// Each type is cross-validated as its own binary task. Fold assignment for
// (type, repeat) comes from Rng::derive(seed, {type, repeat}); the model for
// a fold trains from Rng::derive_seed(seed, {type, repeat, fold}). SMOTE runs
// inside the training folds only.
CvReport cross_validate(const Dataset& data, const CvConfig& cv, const TrainParams& params, std::uint64_t seed,
                        const std::optional<FeatureMask>& fixed_mask = std::nullopt);

// f9..f13
FeatureMask spatial_mask();
// f1..f8
FeatureMask temporal_mask();

struct AblationReport {
  CvReport spatial;
  CvReport temporal;
  CvReport full;
};

AblationReport ablate_feature_groups(const Dataset& data, const CvConfig& cv, const TrainParams& params,
                                     std::uint64_t seed);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Rows grouped by exact label set; each group is shuffled and its first
// round(train_fraction·n) rows go to training.
HoldoutSplit holdout_split(const Dataset& data, double train_fraction, std::uint64_t seed);

struct TestReport {
  std::array<BinaryConfusion, kNumStayTypes> confusion;
  std::array<double, kNumStayTypes> f1{};
  std::vector<TypeSet> predicted;  // per evaluated row
};

// Per-type weighted F1 of the aggregated predictions against the labels.
TestReport evaluate_model(const BuStopModel& model, const std::vector<FeatureRow>& rows);

std::string cv_report_to_csv(const CvReport& report, const std::string& label = "", bool header = true);

}  // namespace bustop
