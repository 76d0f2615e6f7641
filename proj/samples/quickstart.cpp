// Generates a small synthetic recording, trains a random forest on the
// fused nine channels, and prints test metrics.
#include <iostream>

#include "fusionhar/fusionhar.hpp"

int main() {
  using namespace fusionhar;

  const Dataset data = generate_synthetic(tiered_synth_config(200, 42));
  const TrainTestSplit split = train_test_split(data, 0.8, 42);
  const Dataset train = data.subset(split.train_indices);
  const Dataset test = data.subset(split.test_indices);

  const auto fused_train = feature_fuse(train, {SensorKind::Accelerometer, SensorKind::Gyroscope, SensorKind::Magnetometer});
  const auto fused_test = feature_fuse(test, {SensorKind::Accelerometer, SensorKind::Gyroscope, SensorKind::Magnetometer});

  ForestParams params;
  params.seed = 42;
  const auto forest = rf_fit(fused_train.materialize(), train.labels(), train.num_classes(), params);

  const FeatureMatrix X = fused_test.materialize();
  std::vector<ClassIndex> predicted;
  std::vector<std::vector<double>> proba;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    predicted.push_back(rf_predict(forest, X.row(i)).label);
    proba.push_back(rf_predict_proba(forest, X.row(i)));
  }
  const auto truth = test.labels();
  const auto report = metrics(truth, predicted, test.num_classes(), rmse_proba(proba, truth));

  std::cout << "test rows:  " << test.size() << "\n"
            << "accuracy:   " << report.accuracy << "\n"
            << "weighted F1: " << report.f1_weighted << "\n"
            << "RMSE:       " << *report.rmse << "\n\n"
            << confusion_csv(report.confusion, data.vocabulary());

  // Kalman fusion of the three sensor triples into one filtered 3-vector.
  const auto filtered = kalman_filter_dataset(data, KalmanConfig::stacked(0.1, 0.5));
  const auto& last = filtered.filtered.back();
  std::cout << "\nlast filtered state: " << last[0] << ", " << last[1] << ", " << last[2] << "\n";
}
