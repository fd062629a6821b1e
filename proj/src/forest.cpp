#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "bustop/error.hpp"
#include "bustop/learner.hpp"

namespace bustop {

FeatureMask all_features() {
  FeatureMask m(kNumFeatures);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return m;
}

std::string format_mask(const FeatureMask& mask) {
  std::string out;
  for (auto i : mask) {
    if (!out.empty()) out += ',';
    out += feature_name(i);
  }
  return out;
}

void Dataset::validate() const {
  for (const auto& r : rows) {
    for (double v : r.features.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, r.stay_id + ": non-finite feature");
    }
    if (!r.labels.adhoc_exclusive()) {
      throw Error(ErrorCode::InvalidArgument, r.stay_id + ": AdHoc combined with another type");
    }
  }
}

std::size_t Dataset::support(StayType t) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [t](const FeatureRow& r) { return r.labels.contains(t); }));
}

std::size_t BinarySet::positives() const { return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1)); }

BinarySet binarize(const Dataset& data, StayType type) {
  BinarySet b;
  for (const auto& r : data.rows) b.push(r.features.values, r.labels.contains(type));
  return b;
}

BinarySet binarize(const std::vector<FeatureRow>& rows, std::span<const std::size_t> indices, StayType type) {
  BinarySet b;
  for (auto i : indices) b.push(rows[i].features.values, rows[i].labels.contains(type));
  return b;
}

double Forest::vote_fraction(const Row& x) const {
  if (trees_.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += t.vote(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

int Forest::max_depth() const {
  int d = 0;
  for (const auto& t : trees_) d = std::max(d, t.depth());
  return d;
}

Forest train_forest(const BinarySet& data, const FeatureMask& mask, const ForestParams& params) {
  params.validate();
  if (data.size() == 0) throw Error(ErrorCode::EmptyDataset, "train_forest on zero rows");
  const auto pos = data.positives();
  if (data.size() < 2 || pos == 0 || pos == data.size()) {
    throw Error(ErrorCode::SingleClassDataset, "need both classes, have " + std::to_string(pos) + " positive of " +
                                                   std::to_string(data.size()));
  }
  const auto n = data.size();
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  std::vector<DecisionTree> trees(n_trees);
  std::vector<std::vector<std::uint8_t>> in_bag(n_trees);

  auto grow = [&](std::size_t t) {
    Rng rng = Rng::derive(params.seed, {t});
    std::vector<std::size_t> sample(n);
    in_bag[t].assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sample[i] = params.bootstrap ? static_cast<std::size_t>(rng.below(n)) : i;
      in_bag[t][sample[i]] = 1;
    }
    trees[t] = train_tree(data, sample, mask, params, rng);
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(params.threads), n_trees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_trees; ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < n_trees; t += workers) grow(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::optional<double>> oob(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t votes = 0, count = 0;
    for (std::size_t t = 0; t < n_trees; ++t) {
      if (in_bag[t][i]) continue;
      ++count;
      votes += trees[t].vote(data.x[i]) ? 1 : 0;
    }
    if (count > 0) oob[i] = static_cast<double>(votes) / static_cast<double>(count);
  }
  Forest forest(std::move(trees), mask);
  forest.set_oob(std::move(oob));
  return forest;
}

Importance feature_importance(const BinarySet& data, int n_estimators, std::uint64_t seed, const ForestParams& base) {
  ForestParams p = base;
  p.n_trees = n_estimators;
  p.seed = seed;
  // Every feature competes at every split. With only a few candidates, trees
  // that miss the informative feature near the root credit noise features.
  p.features_per_split = static_cast<int>(kNumFeatures);
  const auto forest = train_forest(data, all_features(), p);

  Importance imp;
  std::size_t contributing = 0;
  for (const auto& tree : forest.trees()) {
    const auto& dec = tree.impurity_decrease();
    const double total = std::accumulate(dec.begin(), dec.end(), 0.0);
    if (total <= 0.0) continue;
    ++contributing;
    for (std::size_t f = 0; f < kNumFeatures; ++f) imp.values[f] += dec[f] / total;
  }
  const double total = std::accumulate(imp.values.begin(), imp.values.end(), 0.0);
  if (contributing > 0 && total > 0.0) {
    for (auto& v : imp.values) v /= total;
  } else {
    imp.values.fill(1.0 / static_cast<double>(kNumFeatures));
  }
  imp.ranking = all_features();
  std::stable_sort(imp.ranking.begin(), imp.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return imp.values[a] > imp.values[b]; });
  return imp;
}

namespace {

double oob_weighted_f1(const Forest& forest, const BinarySet& data) {
  std::vector<std::uint8_t> pred, truth;
  const auto& oob = forest.oob_votes();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!oob[i]) continue;
    pred.push_back(*oob[i] >= 0.5 ? 1 : 0);
    truth.push_back(data.y[i]);
  }
  if (pred.empty()) return 0.0;
  return weighted_f1(pred, truth);
}

}  // namespace

SelectionResult select_features(const BinarySet& data, const Importance& importance, int k_max,
                                const ForestParams& params) {
  const auto limit = static_cast<std::size_t>(std::clamp(k_max, 1, static_cast<int>(kNumFeatures)));
  SelectionResult res;
  double best = -1.0;
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= limit; ++k) {
    FeatureMask mask(importance.ranking.begin(), importance.ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(mask.begin(), mask.end());
    ForestParams p = params;
    p.seed = Rng::derive_seed(params.seed, {k});
    const double f1 = oob_weighted_f1(train_forest(data, mask, p), data);
    res.oob_f1.push_back(f1);
    if (f1 > best + 1e-12) {
      best = f1;
      best_k = k;
    }
  }
  res.mask.assign(importance.ranking.begin(), importance.ranking.begin() + static_cast<std::ptrdiff_t>(best_k));
  std::sort(res.mask.begin(), res.mask.end());
  return res;
}

}  // namespace bustop
