#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "fusionhar/boost.hpp"
#include "fusionhar/forest.hpp"
#include "fusionhar/svm.hpp"
#include "fusionhar/vote.hpp"

namespace fusionhar {

// Row order of the comparison report.
enum class ModelFamily { Svm, GradientBoost, RandomForest };

inline constexpr std::array<ModelFamily, 3> kAllFamilies = {ModelFamily::Svm, ModelFamily::GradientBoost,
                                                            ModelFamily::RandomForest};

inline std::string_view family_id(ModelFamily f) {
  switch (f) {
    case ModelFamily::Svm: return "svm";
    case ModelFamily::GradientBoost: return "gboost";
    case ModelFamily::RandomForest: return "rf";
  }
  return "?";
}

inline std::string_view family_title(ModelFamily f) {
  switch (f) {
    case ModelFamily::Svm: return "SVM";
    case ModelFamily::GradientBoost: return "Gradient Boost";
    case ModelFamily::RandomForest: return "Random Forest";
  }
  return "?";
}

inline std::optional<ModelFamily> parse_family(std::string_view s) {
  if (s == "svm") return ModelFamily::Svm;
  if (s == "gboost" || s == "gb") return ModelFamily::GradientBoost;
  if (s == "rf") return ModelFamily::RandomForest;
  return std::nullopt;
}

struct Hyperparams {
  ForestParams forest;
  SvmParams svm;
  BoostParams boost;

  void set_seed(std::uint64_t seed) { forest.seed = svm.seed = boost.seed = seed; }
  void set_threads(std::size_t threads) { forest.threads = svm.threads = boost.threads = threads; }
};

struct Prediction {
  ClassIndex label = 0;
  // Family-specific: vote fraction (RF), winning decision value (SVM),
  // winning probability (GB).
  double confidence = 0.0;
  // Class probabilities; one-hot of `label` for the SVM.
  std::vector<double> proba;
};

class TrainedModel {
 public:
  using Variant = std::variant<LinearSvmModel, GradientBoostModel, RandomForestModel>;

  TrainedModel() = default;
  explicit TrainedModel(Variant m) : model_(std::move(m)) {}

  ModelFamily family() const { return static_cast<ModelFamily>(model_.index()); }
  const Variant& variant() const { return model_; }

  std::size_t num_features() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LinearSvmModel>) return m.num_features();
          else return m.num_features;
        },
        model_);
  }

  std::size_t num_classes() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, RandomForestModel>) return m.num_classes;
          else return m.num_classes();
        },
        model_);
  }

  Prediction predict(std::span<const double> x) const {
    Prediction out;
    if (const auto* svm = std::get_if<LinearSvmModel>(&model_)) {
      const auto p = svm_predict(*svm, x);
      out.label = p.label;
      out.confidence = p.max_decision();
      out.proba.assign(svm->num_classes(), 0.0);
      out.proba[p.label] = 1.0;
    } else if (const auto* gb = std::get_if<GradientBoostModel>(&model_)) {
      out.proba = gb_predict_proba(*gb, x);
      out.label = argmax_lowest(gb_scores(*gb, x));
      out.confidence = out.proba[out.label];
    } else {
      const auto& rf = std::get<RandomForestModel>(model_);
      const auto p = rf_predict(rf, x);
      out.label = p.label;
      out.confidence = p.vote_fraction();
      out.proba.resize(p.votes.size());
      for (std::size_t k = 0; k < p.votes.size(); ++k)
        out.proba[k] = static_cast<double>(p.votes[k]) / static_cast<double>(rf.n_trees());
    }
    return out;
  }

  friend void to_json(nlohmann::json& j, const TrainedModel& m) {
    j = nlohmann::json{{"family", family_id(m.family())}};
    std::visit([&](const auto& v) { j["parameters"] = v; }, m.model_);
  }

  friend void from_json(const nlohmann::json& j, TrainedModel& m) {
    const auto id = j.at("family").get<std::string>();
    const auto family = parse_family(id);
    require(family.has_value(), ErrorKind::Config, "unknown model family '" + id + "'");
    switch (*family) {
      case ModelFamily::Svm: m.model_ = j.at("parameters").get<LinearSvmModel>(); break;
      case ModelFamily::GradientBoost: m.model_ = j.at("parameters").get<GradientBoostModel>(); break;
      case ModelFamily::RandomForest: m.model_ = j.at("parameters").get<RandomForestModel>(); break;
    }
  }

 private:
  Variant model_;
};

inline TrainedModel fit_model(ModelFamily family, const FeatureMatrix& X, std::span<const ClassIndex> y,
                              std::size_t num_classes, const Hyperparams& hp) {
  switch (family) {
    case ModelFamily::Svm: return TrainedModel(svm_fit(X, y, num_classes, hp.svm));
    case ModelFamily::GradientBoost: return TrainedModel(gb_fit(X, y, num_classes, hp.boost));
    case ModelFamily::RandomForest: return TrainedModel(rf_fit(X, y, num_classes, hp.forest));
  }
  fail(ErrorKind::Argument, "unknown model family");
}

inline std::vector<Prediction> predict_all(const TrainedModel& model, const FeatureMatrix& X) {
  std::vector<Prediction> out;
  out.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(model.predict(X.row(i)));
  return out;
}

// One model per sensor, combined by majority vote.
struct DecisionFusionModel {
  ModelFamily base = ModelFamily::RandomForest;
  std::array<TrainedModel, 3> per_sensor;  // canonical sensor order

  Prediction predict(const SyncRecord& row) const {
    std::array<ClassIndex, 3> labels{};
    std::array<double, 3> conf{};
    for (std::size_t s = 0; s < 3; ++s) {
      const Vec3& v = row.sensor(static_cast<SensorKind>(s));
      const auto p = per_sensor[s].predict(std::span<const double>(v.data(), 3));
      labels[s] = p.label;
      conf[s] = p.confidence;
    }
    Prediction out;
    out.label = majority_vote(labels, conf);
    out.proba.assign(per_sensor[0].num_classes(), 0.0);
    out.proba[out.label] = 1.0;
    out.confidence = 1.0;
    return out;
  }
};

inline DecisionFusionModel fit_decision_fusion(ModelFamily base, const Dataset& train, const Hyperparams& hp) {
  DecisionFusionModel out;
  out.base = base;
  const auto y = train.labels();
  for (auto s : kAllSensors) {
    const SensorKind one[] = {s};
    out.per_sensor[static_cast<std::size_t>(s)] =
        fit_model(base, feature_fuse(train, one).materialize(), y, train.num_classes(), hp);
  }
  return out;
}

}  // namespace fusionhar
