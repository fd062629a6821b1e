#include <algorithm>
#include <functional>

#include "bustop/error.hpp"
#include "bustop/learner.hpp"

namespace bustop {

void ForestParams::validate() const {
  if (n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be >= 1");
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  if (features_per_split < 1) throw Error(ErrorCode::InvalidArgument, "features_per_split must be >= 1");
  if (min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be >= 1");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
}

double gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  return 2.0 * positives * (total - positives) / (total * total);
}

double DecisionTree::predict_prob(const Row& x) const {
  int i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(i)].leaf_prob;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<int(int)> rec = [&](int i) -> int {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(rec(n.left), rec(n.right));
  };
  return rec(0);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const BinarySet& data, const FeatureMask& allowed, const ForestParams& params, Rng& rng,
              std::vector<DecisionTree::Node>& nodes, std::array<double, kNumFeatures>& importance, double n_root)
      : data_(data), allowed_(allowed), params_(params), rng_(rng), nodes_(nodes), importance_(importance),
        n_root_(n_root) {}

  int build(std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const auto n = static_cast<double>(idx.size());
    double pos = 0;
    for (auto i : idx) pos += data_.y[i];
    nodes_[static_cast<std::size_t>(id)].leaf_prob = pos / n;

    const bool pure = pos == 0.0 || pos == n;
    if (depth >= params_.max_depth || pure || idx.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) return id;

    const auto split = find_split(idx, pos);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(split.feature);
    for (auto i : idx) (data_.x[i][f] <= split.threshold ? left : right).push_back(i);
    importance_[f] += split.decrease * n / n_root_;
    idx.clear();
    idx.shrink_to_fit();

    nodes_[static_cast<std::size_t>(id)].feature = split.feature;
    nodes_[static_cast<std::size_t>(id)].threshold = split.threshold;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

 private:
  SplitChoice find_split(const std::vector<std::size_t>& idx, double pos) {
    const auto n = static_cast<double>(idx.size());
    const double parent = gini(pos, n);
    const std::size_t mtry = std::min(static_cast<std::size_t>(params_.features_per_split), allowed_.size());

    SplitChoice best;
    double best_child = 0.0;  // nL*gini(L) + nR*gini(R)
    std::vector<std::size_t> order = allowed_;
    std::size_t visited = 0;
    for (std::size_t i = 0; i < order.size() && visited < mtry; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.below(order.size() - i));
      std::swap(order[i], order[j]);
      const auto f = order[i];

      buf_.clear();
      for (auto r : idx) buf_.emplace_back(data_.x[r][f], data_.y[r]);
      std::sort(buf_.begin(), buf_.end());
      if (buf_.front().first == buf_.back().first) continue;  // constant here
      ++visited;

      double pos_left = 0;
      const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
      for (std::size_t k = 0; k + 1 < buf_.size(); ++k) {
        pos_left += buf_[k].second;
        if (buf_[k].first == buf_[k + 1].first) continue;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = buf_.size() - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double nl = static_cast<double>(n_left), nr = static_cast<double>(n_right);
        const double pr = pos - pos_left;
        const double child = 2.0 * pos_left * (nl - pos_left) / nl + 2.0 * pr * (nr - pr) / nr;
        if (best.feature < 0 || child < best_child) {
          double thr = 0.5 * (buf_[k].first + buf_[k + 1].first);
          if (thr >= buf_[k + 1].first) thr = buf_[k].first;
          best.feature = static_cast<int>(f);
          best.threshold = thr;
          best_child = child;
        }
      }
    }
    if (best.feature >= 0) best.decrease = parent - best_child / n;
    return best;
  }

  const BinarySet& data_;
  const FeatureMask& allowed_;
  const ForestParams& params_;
  Rng& rng_;
  std::vector<DecisionTree::Node>& nodes_;
  std::array<double, kNumFeatures>& importance_;
  double n_root_;
  std::vector<std::pair<double, std::uint8_t>> buf_;
};

}  // namespace

DecisionTree train_tree(const BinarySet& data, std::span<const std::size_t> sample, const FeatureMask& allowed,
                        const ForestParams& params, Rng& rng) {
  if (sample.empty()) throw Error(ErrorCode::EmptyDataset, "cannot grow a tree on zero rows");
  if (allowed.empty()) throw Error(ErrorCode::InvalidArgument, "empty feature mask");
  DecisionTree tree;
  std::vector<std::size_t> idx(sample.begin(), sample.end());
  TreeBuilder builder(data, allowed, params, rng, tree.nodes_, tree.importance_, static_cast<double>(idx.size()));
  builder.build(idx, 0);
  return tree;
}

DecisionTree train_tree(const BinarySet& data, const ForestParams& params, Rng& rng) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return train_tree(data, all, all_features(), params, rng);
}

}  // namespace bustop
