#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "fusionhar/parallel.hpp"
#include "fusionhar/training.hpp"

namespace fusionhar {

struct SvmParams {
  double C = 1.0;
  std::size_t epochs = 200;
  // Initial step size of the 1 / (1 + eta0 * lambda * t) schedule.
  double eta0 = 0.1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct SvmPrediction {
  ClassIndex label = 0;
  std::vector<double> decision_values;

  double max_decision() const { return decision_values[label]; }
};

// One-vs-rest linear classifiers over z-scored inputs.
struct LinearSvmModel {
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;

  std::size_t num_classes() const { return weights.size(); }
  std::size_t num_features() const { return feature_mean.size(); }

  bool operator==(const LinearSvmModel&) const = default;
};

// Per-class hinge-loss objective lambda/2 |w|^2 + mean hinge, lambda = 1/(C N),
// minimized by seeded stochastic subgradient steps. Zero-variance columns are
// scaled by 1.
inline LinearSvmModel svm_fit(const FeatureMatrix& X, std::span<const ClassIndex> y, std::size_t num_classes,
                              const SvmParams& params = {}) {
  detail::require_trainable(X, y, "svm");
  require(params.C > 0.0 && std::isfinite(params.C), ErrorKind::Argument, "svm regularization C must be positive");
  require(params.epochs >= 1, ErrorKind::Argument, "svm needs at least one epoch");
  require(params.eta0 > 0.0, ErrorKind::Argument, "svm step size must be positive");
  const std::size_t n = X.rows(), d = X.cols();
  const std::size_t k_classes = detail::count_classes(y, num_classes);

  LinearSvmModel model;
  model.feature_mean.assign(d, 0.0);
  model.feature_scale.assign(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X(i, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (X(i, c) - mean) * (X(i, c) - mean);
    var /= static_cast<double>(n);
    model.feature_mean[c] = mean;
    model.feature_scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  FeatureMatrix Z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) Z(i, c) = (X(i, c) - model.feature_mean[c]) / model.feature_scale[c];

  model.weights.assign(k_classes, std::vector<double>(d, 0.0));
  model.bias.assign(k_classes, 0.0);
  const double lambda = 1.0 / (params.C * static_cast<double>(n));

  parallel_for(k_classes, params.threads, [&](std::size_t k) {
    Rng rng(derive_seed(params.seed, k));
    auto& w = model.weights[k];
    double b = 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      shuffle(std::span<std::size_t>(order), rng);
      for (auto i : order) {
        const double eta = params.eta0 / (1.0 + params.eta0 * lambda * static_cast<double>(t++));
        const double yi = y[i] == k ? 1.0 : -1.0;
        const auto z = Z.row(i);
        double margin = b;
        for (std::size_t c = 0; c < d; ++c) margin += w[c] * z[c];
        margin *= yi;
        const double shrink = 1.0 - eta * lambda;
        for (auto& wc : w) wc *= shrink;
        if (margin < 1.0) {
          for (std::size_t c = 0; c < d; ++c) w[c] += eta * yi * z[c];
          b += eta * yi;
        }
      }
    }
    model.bias[k] = b;
  });
  return model;
}

inline std::vector<double> svm_decision_values(const LinearSvmModel& model, std::span<const double> x) {
  require(x.size() == model.num_features(), ErrorKind::Argument,
          "svm expects " + std::to_string(model.num_features()) + " features, got " + std::to_string(x.size()));
  std::vector<double> f(model.num_classes());
  for (std::size_t k = 0; k < f.size(); ++k) {
    double v = model.bias[k];
    for (std::size_t c = 0; c < x.size(); ++c)
      v += model.weights[k][c] * (x[c] - model.feature_mean[c]) / model.feature_scale[c];
    f[k] = v;
  }
  return f;
}

inline SvmPrediction svm_predict(const LinearSvmModel& model, std::span<const double> x) {
  SvmPrediction out;
  out.decision_values = svm_decision_values(model, x);
  out.label = argmax_lowest(out.decision_values);
  return out;
}

inline void to_json(nlohmann::json& j, const LinearSvmModel& m) {
  j = nlohmann::json{{"feature_mean", m.feature_mean},
                     {"feature_scale", m.feature_scale},
                     {"weights", m.weights},
                     {"bias", m.bias}};
}

inline void from_json(const nlohmann::json& j, LinearSvmModel& m) {
  j.at("feature_mean").get_to(m.feature_mean);
  j.at("feature_scale").get_to(m.feature_scale);
  j.at("weights").get_to(m.weights);
  j.at("bias").get_to(m.bias);
  require(m.feature_scale.size() == m.feature_mean.size() && m.bias.size() == m.weights.size(), ErrorKind::Config,
          "inconsistent svm document");
  for (const auto& w : m.weights)
    require(w.size() == m.feature_mean.size(), ErrorKind::Config, "svm weight vectors differ in dimension");
}

}  // namespace fusionhar
