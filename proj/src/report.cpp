#include "bustop/report.hpp"

#include <array>
#include <sstream>

#include "text_util.hpp"

namespace bustop {

std::vector<PilotRecord> pilot_records(const std::vector<FeatureRow>& rows,
                                       const std::map<std::string, double>& snr_by_stay) {
  std::vector<PilotRecord> out;
  for (const auto& r : rows) {
    PilotRecord p;
    p.types = r.labels;
    p.duration_s = r.features[feat::kStayDuration];
    p.wifi_aps = r.features[feat::kWifiStay];
    if (auto it = snr_by_stay.find(r.stay_id); it != snr_by_stay.end()) p.snr_db = it->second;
    out.push_back(p);
  }
  return out;
}

PilotReport pilot_report(const std::vector<PilotRecord>& records) {
  constexpr std::array<const char*, 3> kStats = {"stay_duration_s", "wifi_aps", "snr_db"};
  std::array<std::array<std::vector<double>, kNumStayTypes>, 3> values;
  for (const auto& r : records) {
    for (auto t : r.types.members()) {
      const auto ti = static_cast<std::size_t>(t);
      values[0][ti].push_back(r.duration_s);
      values[1][ti].push_back(r.wifi_aps);
      if (r.snr_db) values[2][ti].push_back(*r.snr_db);
    }
  }
  PilotReport rep;
  for (std::size_t s = 0; s < kStats.size(); ++s) {
    for (auto t : kAllStayTypes) {
      const auto& v = values[s][static_cast<std::size_t>(t)];
      if (v.empty()) {
        rep.notes.push_back(std::string(kStats[s]) + ": no " + std::string(to_string(t)) + " stays");
        continue;
      }
      rep.rows.push_back({kStats[s], t, summarize(v)});
    }
  }
  return rep;
}

std::string pilot_report_to_csv(const PilotReport& report) {
  std::ostringstream out;
  out << "statistic,type,n,min,q1,median,q3,max,mean\n";
  for (const auto& r : report.rows) {
    const auto& s = r.summary;
    out << r.statistic << ',' << to_string(r.type) << ',' << s.n << ',' << detail::format_double(s.min) << ','
        << detail::format_double(s.q1) << ',' << detail::format_double(s.median) << ','
        << detail::format_double(s.q3) << ',' << detail::format_double(s.max) << ','
        << detail::format_double(s.mean) << '\n';
  }
  return out.str();
}

}  // namespace bustop
