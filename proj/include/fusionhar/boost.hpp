#pragma once

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "fusionhar/parallel.hpp"
#include "fusionhar/training.hpp"
#include "fusionhar/tree.hpp"

namespace fusionhar {

struct BoostParams {
  std::size_t n_stages = 100;
  double learning_rate = 0.1;
  std::size_t tree_depth = 3;
  // Stored for provenance; the trainer itself draws no random numbers.
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Multiclass gradient boosting on softmax scores. F_k(x) is the initial
// score plus learning_rate times the sum of class k's regression trees.
struct GradientBoostModel {
  std::size_t num_features = 0;
  double learning_rate = 0.1;
  std::vector<double> initial_scores;           // [class]
  std::vector<std::vector<DecisionTree>> trees;  // [class][stage]
  // Training cross-entropy (summed over samples) before stage 1 and after
  // every stage.
  std::vector<double> training_loss;

  std::size_t num_classes() const { return initial_scores.size(); }
  std::size_t n_stages() const { return trees.empty() ? 0 : trees.front().size(); }

  bool operator==(const GradientBoostModel&) const = default;
};

// Softmax with max-score subtraction.
inline std::vector<double> softmax(std::span<const double> scores) {
  require(!scores.empty(), ErrorKind::Argument, "softmax of an empty vector");
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(scores[k] - top);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

// -sum_i log P_{y_i}(x_i), evaluated through log-sum-exp.
inline double cross_entropy(const FeatureMatrix& scores, std::span<const ClassIndex> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const double top = *std::max_element(s.begin(), s.end());
    double sum = 0.0;
    for (double v : s) sum += std::exp(v - top);
    loss -= s[y[i]] - top - std::log(sum);
  }
  return loss;
}

inline GradientBoostModel gb_fit(const FeatureMatrix& X, std::span<const ClassIndex> y, std::size_t num_classes,
                                 const BoostParams& params = {}) {
  detail::require_trainable(X, y, "gradient boosting");
  require(params.n_stages >= 1, ErrorKind::Argument, "gradient boosting needs at least one stage");
  require(std::isfinite(params.learning_rate) && params.learning_rate >= 0.0, ErrorKind::Argument,
          "gradient boosting learning rate must be non-negative");
  require(params.tree_depth >= 1, ErrorKind::Argument, "gradient boosting tree depth must be >= 1");
  const std::size_t n = X.rows();
  const std::size_t k_classes = detail::count_classes(y, num_classes);

  GradientBoostModel model;
  model.num_features = X.cols();
  model.learning_rate = params.learning_rate;
  model.initial_scores.assign(k_classes, 0.0);
  model.trees.assign(k_classes, {});
  for (auto& t : model.trees) t.reserve(params.n_stages);

  FeatureMatrix scores(n, k_classes);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const TreeParams tree_params{params.tree_depth, 1, 0};
  model.training_loss.push_back(cross_entropy(scores, y));

  std::vector<std::vector<double>> residuals(k_classes, std::vector<double>(n));
  std::vector<DecisionTree> stage(k_classes);
  for (std::size_t m = 0; m < params.n_stages; ++m) {
    // r_ik = 1{y_i = k} - P_k(x_i) at the current stage.
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = softmax(scores.row(i));
      for (std::size_t k = 0; k < k_classes; ++k) residuals[k][i] = (y[i] == k ? 1.0 : 0.0) - p[k];
    }
    parallel_for(k_classes, params.threads, [&](std::size_t k) {
      Rng rng(params.seed);  // all features are searched, so no draws are made
      stage[k] = DecisionTree::fit_regressor(X, residuals[k], all, tree_params, rng);
    });
    for (std::size_t k = 0; k < k_classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) scores(i, k) += params.learning_rate * stage[k].predict_value(X.row(i));
      model.trees[k].push_back(std::move(stage[k]));
    }
    model.training_loss.push_back(cross_entropy(scores, y));
  }
  return model;
}

inline std::vector<double> gb_scores(const GradientBoostModel& model, std::span<const double> x) {
  require(x.size() == model.num_features, ErrorKind::Argument,
          "gradient boosting expects " + std::to_string(model.num_features) + " features, got " +
              std::to_string(x.size()));
  std::vector<double> f = model.initial_scores;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double sum = 0.0;
    for (const auto& tree : model.trees[k]) sum += tree.predict_value(x);
    f[k] += model.learning_rate * sum;
  }
  return f;
}

inline std::vector<double> gb_predict_proba(const GradientBoostModel& model, std::span<const double> x) {
  return softmax(gb_scores(model, x));
}

inline ClassIndex gb_predict(const GradientBoostModel& model, std::span<const double> x) {
  return argmax_lowest(gb_predict_proba(model, x));
}

inline void to_json(nlohmann::json& j, const GradientBoostModel& m) {
  j = nlohmann::json{{"num_features", m.num_features},
                     {"learning_rate", m.learning_rate},
                     {"initial_scores", m.initial_scores},
                     {"trees", m.trees},
                     {"training_loss", m.training_loss}};
}

inline void from_json(const nlohmann::json& j, GradientBoostModel& m) {
  j.at("num_features").get_to(m.num_features);
  j.at("learning_rate").get_to(m.learning_rate);
  j.at("initial_scores").get_to(m.initial_scores);
  j.at("trees").get_to(m.trees);
  m.training_loss = j.value("training_loss", std::vector<double>{});
  require(m.trees.size() == m.initial_scores.size(), ErrorKind::Config, "boosting document: one tree list per class");
  for (const auto& t : m.trees)
    require(t.size() == m.trees.front().size(), ErrorKind::Config, "boosting document: classes differ in stage count");
}

}  // namespace fusionhar
