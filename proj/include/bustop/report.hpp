#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bustop/features.hpp"
#include "bustop/stats.hpp"

namespace bustop {

struct PilotRecord {
  TypeSet types;
  double duration_s = 0.0;
  double wifi_aps = 0.0;
  std::optional<double> snr_db;
};

// From featurized rows (f1, f7); SNR is looked up by stay id when given.
std::vector<PilotRecord> pilot_records(const std::vector<FeatureRow>& rows,
                                       const std::map<std::string, double>& snr_by_stay = {});

struct PilotRow {
  std::string statistic;  // stay_duration_s, wifi_aps, snr_db
  StayType type = StayType::BusStop;
  Summary summary;
};

struct PilotReport {
  std::vector<PilotRow> rows;
  std::vector<std::string> notes;  // one per omitted (statistic, type)
};

// Per-type quartiles; a confounded stay counts toward each of its types.
PilotReport pilot_report(const std::vector<PilotRecord>& records);
std::string pilot_report_to_csv(const PilotReport& report);

}  // namespace bustop
