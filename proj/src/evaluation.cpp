#include "bustop/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bustop/error.hpp"
#include "bustop/stats.hpp"
#include "text_util.hpp"

namespace bustop {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::uint8_t>& y, int folds, Rng& rng) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);
  shuffle(pos, rng);
  shuffle(neg, rng);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t deal = 0;
  for (auto i : pos) out[deal++ % out.size()].push_back(i);
  for (auto i : neg) out[deal++ % out.size()].push_back(i);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

CvReport cross_validate(const Dataset& data, const CvConfig& cv, const TrainParams& params, std::uint64_t seed,
                        const std::optional<FeatureMask>& fixed_mask) {
  data.validate();
  if (cv.repeats < 1) throw Error(ErrorCode::InvalidArgument, "need at least 1 repeat");
  for (auto t : kAllStayTypes) {
    const auto support = data.support(t);
    const auto negatives = data.rows.size() - support;
    if (support < static_cast<std::size_t>(cv.folds) || negatives < static_cast<std::size_t>(cv.folds)) {
      throw Error(ErrorCode::InsufficientClassSupport, std::string(to_string(t)) + " has " + std::to_string(support) +
                                                           " positive rows for " + std::to_string(cv.folds) +
                                                           " folds");
    }
  }

  CvReport report;
  report.config = cv;
  for (auto t : kAllStayTypes) {
    const auto ti = static_cast<std::size_t>(t);
    const BinarySet all = binarize(data, t);
    auto& stats = report.per_type[ti];
    for (int r = 0; r < cv.repeats; ++r) {
      const auto ru = static_cast<std::uint64_t>(r);
      Rng fold_rng = Rng::derive(seed, {ti, ru});
      const auto folds = stratified_folds(all.y, cv.folds, fold_rng);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::uint8_t> in_test(all.size(), 0);
        for (auto i : folds[f]) in_test[i] = 1;
        BinarySet train, test;
        for (std::size_t i = 0; i < all.size(); ++i) (in_test[i] ? test : train).push(all.x[i], all.y[i] != 0);
        const auto m = train_type_model(train, t, params, Rng::derive_seed(seed, {ti, ru, f}), fixed_mask);
        std::vector<std::uint8_t> pred(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) pred[i] = m.forest.predict(test.x[i], m.threshold) ? 1 : 0;
        const auto c = confusion(pred, test.y);
        stats.confusion += c;
        stats.fold_f1.push_back(weighted_f1(c));
      }
    }
    stats.mean_f1 = mean(stats.fold_f1);
    stats.sd_f1 = stddev(stats.fold_f1);
  }
  return report;
}

FeatureMask spatial_mask() { return {feat::kRsi, feat::kResidential, feat::kNatural, feat::kRoad, feat::kHighlyPopulated}; }

FeatureMask temporal_mask() {
  FeatureMask m;
  for (std::size_t f = feat::kStayDuration; f <= feat::kWifiEdge; ++f) m.push_back(f);
  return m;
}

AblationReport ablate_feature_groups(const Dataset& data, const CvConfig& cv, const TrainParams& params,
                                     std::uint64_t seed) {
  AblationReport out;
  out.spatial = cross_validate(data, cv, params, seed, spatial_mask());
  out.temporal = cross_validate(data, cv, params, seed, temporal_mask());
  out.full = cross_validate(data, cv, params, seed, all_features());
  return out;
}

HoldoutSplit holdout_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::map<std::uint8_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.rows.size(); ++i) groups[data.rows[i].labels.bits()].push_back(i);
  HoldoutSplit split;
  for (auto& [bits, idx] : groups) {
    Rng rng = Rng::derive(seed, {bits});
    shuffle(idx, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TestReport evaluate_model(const BuStopModel& model, const std::vector<FeatureRow>& rows) {
  TestReport report;
  std::array<std::vector<std::uint8_t>, kNumStayTypes> pred, truth;
  for (const auto& r : rows) {
    const auto types = predict_stay_types(model, r.features);
    report.predicted.push_back(types);
    for (auto t : kAllStayTypes) {
      const auto i = static_cast<std::size_t>(t);
      pred[i].push_back(types.contains(t) ? 1 : 0);
      truth[i].push_back(r.labels.contains(t) ? 1 : 0);
    }
  }
  for (std::size_t i = 0; i < kNumStayTypes; ++i) {
    report.confusion[i] = confusion(pred[i], truth[i]);
    report.f1[i] = weighted_f1(report.confusion[i]);
  }
  return report;
}

std::string cv_report_to_csv(const CvReport& report, const std::string& label, bool header) {
  std::ostringstream out;
  if (header) out << "group,type,folds,repeats,mean_f1,sd_f1,tp,fp,tn,fn\n";
  for (auto t : kAllStayTypes) {
    const auto& s = report.per_type[static_cast<std::size_t>(t)];
    out << label << ',' << to_string(t) << ',' << report.config.folds << ',' << report.config.repeats << ','
        << detail::format_double(s.mean_f1) << ',' << detail::format_double(s.sd_f1) << ',' << s.confusion.tp << ','
        << s.confusion.fp << ',' << s.confusion.tn << ',' << s.confusion.fn << '\n';
  }
  return out.str();
}

}  // namespace bustop
