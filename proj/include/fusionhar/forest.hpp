#pragma once

#include <cmath>
#include <vector>

#include "fusionhar/parallel.hpp"
#include "fusionhar/training.hpp"
#include "fusionhar/tree.hpp"

namespace fusionhar {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;  // unlimited
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ForestPrediction {
  ClassIndex label = 0;
  std::vector<std::size_t> votes;

  double vote_fraction() const {
    std::size_t total = 0;
    for (auto v : votes) total += v;
    return total == 0 ? 0.0 : static_cast<double>(votes[label]) / static_cast<double>(total);
  }
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t num_classes = 0;
  std::size_t num_features = 0;
  std::size_t max_features = 0;
  std::size_t max_depth = 0;

  std::size_t n_trees() const { return trees.size(); }

  bool operator==(const RandomForestModel&) const = default;
};

inline std::size_t sqrt_features(std::size_t d) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

// Each tree sees a bootstrap sample of size N and considers floor(sqrt(d))
// features per split; its RNG is seeded from (seed, tree index) only.
inline RandomForestModel rf_fit(const FeatureMatrix& X, std::span<const ClassIndex> y, std::size_t num_classes,
                                const ForestParams& params = {}) {
  detail::require_trainable(X, y, "random forest");
  require(params.n_trees >= 1, ErrorKind::Argument, "random forest needs at least one tree");
  RandomForestModel model;
  model.num_classes = detail::count_classes(y, num_classes);
  model.num_features = X.cols();
  model.max_features = sqrt_features(X.cols());
  model.max_depth = params.max_depth;
  model.trees.resize(params.n_trees);
  model.tree_seeds.resize(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) model.tree_seeds[t] = derive_seed(params.seed, t);

  const TreeParams tree_params{params.max_depth, params.min_samples_leaf, model.max_features};
  parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
    Rng rng(model.tree_seeds[t]);
    std::vector<std::size_t> sample(X.rows());
    for (auto& s : sample) s = uniform_index(rng, X.rows());
    model.trees[t] = DecisionTree::fit_classifier(X, y, model.num_classes, sample, tree_params, rng);
  });
  return model;
}

inline ForestPrediction rf_predict(const RandomForestModel& model, std::span<const double> x) {
  require(x.size() == model.num_features, ErrorKind::Argument,
          "random forest expects " + std::to_string(model.num_features) + " features, got " + std::to_string(x.size()));
  ForestPrediction out;
  out.votes.assign(model.num_classes, 0);
  for (const auto& tree : model.trees) ++out.votes[tree.predict_class(x)];
  out.label = static_cast<ClassIndex>(std::max_element(out.votes.begin(), out.votes.end()) - out.votes.begin());
  return out;
}

// Vote fractions per class.
inline std::vector<double> rf_predict_proba(const RandomForestModel& model, std::span<const double> x) {
  const auto p = rf_predict(model, x);
  std::vector<double> out(p.votes.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = static_cast<double>(p.votes[k]) / static_cast<double>(model.trees.size());
  return out;
}

inline void to_json(nlohmann::json& j, const RandomForestModel& m) {
  j = nlohmann::json{{"num_classes", m.num_classes}, {"num_features", m.num_features},
                     {"max_features", m.max_features}, {"max_depth", m.max_depth},
                     {"tree_seeds", m.tree_seeds},     {"trees", m.trees}};
}

inline void from_json(const nlohmann::json& j, RandomForestModel& m) {
  j.at("num_classes").get_to(m.num_classes);
  j.at("num_features").get_to(m.num_features);
  j.at("max_features").get_to(m.max_features);
  j.at("max_depth").get_to(m.max_depth);
  j.at("tree_seeds").get_to(m.tree_seeds);
  j.at("trees").get_to(m.trees);
  require(!m.trees.empty(), ErrorKind::Config, "random forest document has no trees");
  for (const auto& t : m.trees)
    require(t.num_features() == m.num_features, ErrorKind::Config, "tree feature count disagrees with forest");
}

}  // namespace fusionhar
