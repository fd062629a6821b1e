#include "bustop/model.hpp"

#include <json.hpp>

#include "bustop/error.hpp"
#include "text_util.hpp"

namespace bustop {

using nlohmann::json;

TypeModel train_type_model(const BinarySet& data, StayType type, const TrainParams& params, std::uint64_t seed,
                           const std::optional<FeatureMask>& fixed_mask) {
  const auto pos = data.positives();
  if (pos < 2) {
    throw Error(ErrorCode::InsufficientClassSupport,
                std::string(to_string(type)) + " has " + std::to_string(pos) + " positive rows, need 2");
  }
  if (data.size() - pos < 2) {
    throw Error(ErrorCode::InsufficientClassSupport,
                std::string(to_string(type)) + " has " + std::to_string(data.size() - pos) + " negative rows, need 2");
  }
  Rng smote_rng = Rng::derive(seed, {1});
  const BinarySet balanced = smote_balance(data, params.smote_k, smote_rng);

  TypeModel m;
  m.type = type;
  if (fixed_mask) {
    if (fixed_mask->empty()) throw Error(ErrorCode::InvalidArgument, "empty feature mask");
    m.mask = *fixed_mask;
  } else {
    const auto imp = feature_importance(balanced, params.selector_trees, Rng::derive_seed(seed, {2}), params.forest);
    m.importance = imp.values;
    ForestParams sel = params.forest;
    sel.seed = Rng::derive_seed(seed, {3});
    auto chosen = select_features(balanced, imp, params.k_max, sel);
    m.mask = std::move(chosen.mask);
    m.oob_f1 = std::move(chosen.oob_f1);
  }
  ForestParams fp = params.forest;
  fp.seed = Rng::derive_seed(seed, {4});
  m.forest = train_forest(balanced, m.mask, fp);
  return m;
}

BuStopModel train_bustop(const Dataset& data, const TrainParams& params, std::uint64_t seed,
                         const std::optional<FeatureMask>& fixed_mask) {
  data.validate();
  if (data.rows.empty()) throw Error(ErrorCode::EmptyDataset, "no training rows");
  for (auto t : kAllStayTypes) {
    if (data.support(t) < 2) {
      throw Error(ErrorCode::InsufficientClassSupport,
                  std::string(to_string(t)) + " has " + std::to_string(data.support(t)) + " positive rows, need 2");
    }
  }
  BuStopModel model;
  model.params = params;
  model.seed = seed;
  for (auto t : kAllStayTypes) {
    const auto i = static_cast<std::size_t>(t);
    model.models[i] = train_type_model(binarize(data, t), t, params, Rng::derive_seed(seed, {i}), fixed_mask);
  }
  return model;
}

TypeSet aggregate_votes(const std::array<bool, kNumStayTypes>& positive) {
  TypeSet out;
  for (auto t : kAllStayTypes) {
    if (t != StayType::AdHoc && positive[static_cast<std::size_t>(t)]) out.insert(t);
  }
  if (out.empty()) out.insert(StayType::AdHoc);
  return out;
}

std::array<bool, kNumStayTypes> poll_forests(const BuStopModel& model, const FeatureVector& fv) {
  std::array<bool, kNumStayTypes> votes{};
  for (std::size_t i = 0; i < kNumStayTypes; ++i) {
    const auto& m = model.models[i];
    votes[i] = m.forest.predict(fv.values, m.threshold);
  }
  return votes;
}

TypeSet predict_stay_types(const BuStopModel& model, const FeatureVector& fv) {
  return aggregate_votes(poll_forests(model, fv));
}

namespace {

json node_to_json(const std::vector<DecisionTree::Node>& nodes, int i) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  if (n.feature < 0) return json{{"leaf_prob", n.leaf_prob}};
  return json{{"feat", n.feature},
              {"thresh", n.threshold},
              {"left", node_to_json(nodes, n.left)},
              {"right", node_to_json(nodes, n.right)}};
}

int node_from_json(const json& j, std::vector<DecisionTree::Node>& nodes) {
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf_prob")) {
    nodes.back().leaf_prob = j.at("leaf_prob").get<double>();
    return id;
  }
  const int feature = j.at("feat").get<int>();
  if (feature < 0 || feature >= static_cast<int>(kNumFeatures)) {
    throw Error(ErrorCode::MalformedRecord, "model: feature index out of range");
  }
  nodes.back().feature = feature;
  nodes.back().threshold = j.at("thresh").get<double>();
  const int left = node_from_json(j.at("left"), nodes);
  const int right = node_from_json(j.at("right"), nodes);
  nodes[static_cast<std::size_t>(id)].left = left;
  nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

json mask_to_json(const FeatureMask& mask) {
  json a = json::array();
  for (auto f : mask) a.push_back(feature_name(f));
  return a;
}

FeatureMask mask_from_json(const json& a) {
  FeatureMask mask;
  for (const auto& name : a) {
    const auto s = name.get<std::string>();
    bool found = false;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (feature_name(f) == s) {
        mask.push_back(f);
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::MalformedRecord, "model: unknown feature " + s);
  }
  return mask;
}

}  // namespace

std::string model_to_json(const BuStopModel& model) {
  const auto& fp = model.params.forest;
  json j;
  j["format"] = "bustop-model";
  j["version"] = 1;
  j["seed"] = model.seed;
  j["params"] = {{"n_trees", fp.n_trees},
                 {"max_depth", fp.max_depth},
                 {"features_per_split", fp.features_per_split},
                 {"min_leaf", fp.min_leaf},
                 {"bootstrap", fp.bootstrap},
                 {"selector_trees", model.params.selector_trees},
                 {"k_max", model.params.k_max},
                 {"smote_k", model.params.smote_k}};
  json types = json::array();
  for (const auto& m : model.models) {
    json trees = json::array();
    for (const auto& t : m.forest.trees()) trees.push_back(node_to_json(t.nodes(), 0));
    types.push_back({{"type", std::string(to_string(m.type))},
                     {"mask", mask_to_json(m.mask)},
                     {"threshold", m.threshold},
                     {"importance", m.importance},
                     {"oob_f1", m.oob_f1},
                     {"trees", std::move(trees)}});
  }
  j["models"] = std::move(types);
  return j.dump(1);
}

BuStopModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("model: ") + e.what());
  }
  try {
    if (j.value("format", "") != "bustop-model") throw Error(ErrorCode::MalformedRecord, "model: not a bustop model");
    BuStopModel model;
    model.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    auto& fp = model.params.forest;
    fp.n_trees = p.at("n_trees").get<int>();
    fp.max_depth = p.at("max_depth").get<int>();
    fp.features_per_split = p.at("features_per_split").get<int>();
    fp.min_leaf = p.at("min_leaf").get<int>();
    fp.bootstrap = p.at("bootstrap").get<bool>();
    fp.seed = model.seed;
    model.params.selector_trees = p.at("selector_trees").get<int>();
    model.params.k_max = p.at("k_max").get<int>();
    model.params.smote_k = p.at("smote_k").get<int>();

    const auto& types = j.at("models");
    if (types.size() != kNumStayTypes) throw Error(ErrorCode::MalformedRecord, "model: expected 5 type models");
    std::array<bool, kNumStayTypes> seen{};
    for (const auto& tj : types) {
      const auto type = parse_stay_type(tj.at("type").get<std::string>());
      if (!type) throw Error(ErrorCode::MalformedRecord, "model: unknown stay type");
      const auto i = static_cast<std::size_t>(*type);
      if (seen[i]) throw Error(ErrorCode::MalformedRecord, "model: duplicate stay type");
      seen[i] = true;
      TypeModel m;
      m.type = *type;
      m.mask = mask_from_json(tj.at("mask"));
      if (m.mask.empty()) throw Error(ErrorCode::MalformedRecord, "model: empty mask");
      m.threshold = tj.at("threshold").get<double>();
      m.importance = tj.at("importance").get<std::array<double, kNumFeatures>>();
      m.oob_f1 = tj.at("oob_f1").get<std::vector<double>>();
      std::vector<DecisionTree> trees;
      for (const auto& tree_json : tj.at("trees")) {
        DecisionTree tree;
        node_from_json(tree_json, tree.mutable_nodes());
        trees.push_back(std::move(tree));
      }
      m.forest = Forest(std::move(trees), m.mask);
      model.models[i] = std::move(m);
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("model: ") + e.what());
  }
}

void write_model(const BuStopModel& model, const std::filesystem::path& path) {
  detail::write_file(path, model_to_json(model) + "\n");
}

BuStopModel read_model(const std::filesystem::path& path) { return model_from_json(detail::read_file(path)); }

}  // namespace bustop
