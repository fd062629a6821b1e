#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bustop/features.hpp"
#include "bustop/rng.hpp"
#include "bustop/stay_type.hpp"

namespace bustop {

using Row = std::array<double, kNumFeatures>;
// Sorted, duplicate-free feature indices (0-based).
using FeatureMask = std::vector<std::size_t>;

FeatureMask all_features();
std::string format_mask(const FeatureMask& mask);  // "f1,f3,f9"

// Labelled rows for the five-way one-vs-all problem.
struct Dataset {
  std::vector<FeatureRow> rows;

  // Throws Error(InvalidArgument) on non-finite features or labels that
  // break AdHoc exclusivity.
  void validate() const;
  std::size_t support(StayType t) const;
};

// One binary (one-vs-all) task.
struct BinarySet {
  std::vector<Row> x;
  std::vector<std::uint8_t> y;  // 1 = positive

  std::size_t size() const { return x.size(); }
  std::size_t positives() const;
  void push(const Row& row, bool positive) {
    x.push_back(row);
    y.push_back(positive ? 1 : 0);
  }
};

BinarySet binarize(const Dataset& data, StayType type);
BinarySet binarize(const std::vector<FeatureRow>& rows, std::span<const std::size_t> indices, StayType type);

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  int features_per_split = 3;  // floor(sqrt(13))
  int min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  // Worker threads for tree training; results do not depend on it.
  int threads = 1;

  void validate() const;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_prob = 0.0;  // fraction of positive training samples
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& mutable_nodes() { return nodes_; }

  double predict_prob(const Row& x) const;
  bool vote(const Row& x) const { return predict_prob(x) > 0.5; }
  // Depth of the deepest leaf; a lone root leaf has depth 0.
  int depth() const;
  // Weighted Gini decrease accumulated per feature during training.
  const std::array<double, kNumFeatures>& impurity_decrease() const { return importance_; }

 private:
  friend DecisionTree train_tree(const BinarySet&, std::span<const std::size_t>, const FeatureMask&,
                                 const ForestParams&, Rng&);
  std::vector<Node> nodes_;
  std::array<double, kNumFeatures> importance_{};
};

double gini(double positives, double total);

// CART tree on the multiset of rows named by `sample` (indices may repeat).
// Each node draws features_per_split candidates from `allowed` and keeps the
// midpoint threshold with the largest Gini decrease. `x <= threshold` goes
// left. Leaves form at max_depth, on pure nodes or when nothing splits.
DecisionTree train_tree(const BinarySet& data, std::span<const std::size_t> sample, const FeatureMask& allowed,
                        const ForestParams& params, Rng& rng);
// Convenience: every row once, all features allowed.
DecisionTree train_tree(const BinarySet& data, const ForestParams& params, Rng& rng);

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;  // parent gini - weighted child gini
};

class Forest {
 public:
  Forest() = default;
  Forest(std::vector<DecisionTree> trees, FeatureMask mask) : trees_(std::move(trees)), mask_(std::move(mask)) {}

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const FeatureMask& mask() const { return mask_; }

  // Fraction of trees voting positive.
  double vote_fraction(const Row& x) const;
  bool predict(const Row& x, double threshold = 0.5) const { return vote_fraction(x) >= threshold; }
  int max_depth() const;

  // Out-of-bag vote fraction per training row (nullopt when a row was in
  // every bag). Only available on freshly trained forests.
  const std::vector<std::optional<double>>& oob_votes() const { return oob_; }
  void set_oob(std::vector<std::optional<double>> oob) { oob_ = std::move(oob); }

 private:
  std::vector<DecisionTree> trees_;
  FeatureMask mask_;
  std::vector<std::optional<double>> oob_;
};

// Tree t is grown from Rng::derive(params.seed, {t}): first its bootstrap
// draws, then its split-feature draws in depth-first order.
// Throws Error(SingleClassDataset) unless both classes are present.
Forest train_forest(const BinarySet& data, const FeatureMask& mask, const ForestParams& params);

struct Importance {
  std::array<double, kNumFeatures> values{};  // sums to 1
  std::vector<std::size_t> ranking;           // descending, ties by lower index
};

// Mean-decrease-in-impurity over an n_estimators forest on all features.
// Each split weighs every feature (base.features_per_split is ignored).
Importance feature_importance(const BinarySet& data, int n_estimators, std::uint64_t seed,
                              const ForestParams& base = {});

struct SelectionResult {
  FeatureMask mask;
  std::vector<double> oob_f1;  // index k-1 -> OOB weighted F1 with top-k
};

// Smallest k in 1..k_max maximising out-of-bag weighted F1 of a forest on
// the top-k features.
SelectionResult select_features(const BinarySet& data, const Importance& importance, int k_max,
                                const ForestParams& params);

struct SyntheticSample {
  Row row;
  std::size_t base = 0;      // index into the minority rows
  std::size_t neighbor = 0;  // index into the minority rows
  double u = 0.0;
};

// SMOTE over min-max-scaled features. For each sample: pick a base row
// uniformly, one of its k nearest minority neighbours uniformly, then
// u ~ U[0,1). f13 is rounded back to {0,1}.
std::vector<SyntheticSample> smote(const std::vector<Row>& minority, int k_neighbors, std::size_t n_synthetic,
                                   Rng& rng);

// Oversamples the smaller class until both classes have equal counts.
BinarySet smote_balance(const BinarySet& data, int k_neighbors, Rng& rng);

struct BinaryConfusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  BinaryConfusion& operator+=(const BinaryConfusion& o) {
    tp += o.tp; fp += o.fp; tn += o.tn; fn += o.fn;
    return *this;
  }
};

BinaryConfusion confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);
// Support-weighted mean of the positive-class and negative-class F1.
double weighted_f1(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);
double weighted_f1(const BinaryConfusion& c);

}  // namespace bustop
