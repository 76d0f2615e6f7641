#include <cmath>
#include <numeric>

#include "fusionhar/fusion.hpp"
#include "fusionhar/ingest.hpp"
#include "test_support.hpp"

using namespace fusionhar;
using testsupport::error_kind_of;

namespace {

Dataset small_dataset() {
  std::vector<SyncRecord> rows;
  for (int i = 0; i < 4; ++i) {
    SyncRecord r;
    r.timestamp = i;
    for (std::size_t c = 0; c < 9; ++c) r.sensor(static_cast<SensorKind>(c / 3))[c % 3] = 10.0 * i + static_cast<double>(c);
    rows.push_back(r);
  }
  return Dataset(std::move(rows), LabelVocabulary({"a"}));
}

Dataset rows_from(const std::vector<std::array<double, 9>>& values) {
  std::vector<SyncRecord> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SyncRecord r;
    r.timestamp = static_cast<TimestampMs>(i);
    for (std::size_t c = 0; c < 9; ++c) r.sensor(static_cast<SensorKind>(c / 3))[c % 3] = values[i][c];
    rows.push_back(r);
  }
  return Dataset(std::move(rows), LabelVocabulary({"a"}));
}

double variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(FeatureFuse, AllSensorsInCanonicalOrder) {
  const auto ds = small_dataset();
  const auto view = feature_fuse(ds, {SensorKind::Magnetometer, SensorKind::Accelerometer, SensorKind::Gyroscope});
  ASSERT_EQ(view.cols(), 9u);
  EXPECT_EQ(view.columns(), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  const auto m = view.materialize();
  for (std::size_t r = 0; r < ds.size(); ++r)
    for (std::size_t c = 0; c < 9; ++c) EXPECT_EQ(m(r, c), ds[r].channel(c));
}

TEST(FeatureFuse, GyroscopeOnly) {
  const auto ds = small_dataset();
  const auto view = feature_fuse(ds, {SensorKind::Gyroscope});
  EXPECT_EQ(view.columns(), (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(view(2, 0), 23.0);
}

TEST(FeatureFuse, AccelerometerAndMagnetometer) {
  const auto ds = small_dataset();
  const auto view = feature_fuse(ds, {SensorKind::Magnetometer, SensorKind::Accelerometer});
  EXPECT_EQ(view.columns(), (std::vector<std::size_t>{0, 1, 2, 6, 7, 8}));
  EXPECT_EQ(view.column_names()[3], "Magnetic field X (Bx)");
}

TEST(FeatureFuse, WidthIsThreePerSensor) {
  const auto ds = small_dataset();
  for (unsigned mask = 1; mask < 8; ++mask) {
    std::vector<SensorKind> sel;
    for (unsigned s = 0; s < 3; ++s)
      if (mask & (1u << s)) sel.push_back(static_cast<SensorKind>(s));
    EXPECT_EQ(feature_fuse(ds, sel).cols(), 3 * sel.size());
  }
}

TEST(FeatureFuse, EmptySelectionRejected) {
  const auto ds = small_dataset();
  EXPECT_EQ(error_kind_of([&] { feature_fuse(ds, std::span<const SensorKind>{}); }), ErrorKind::Argument);
}

TEST(KalmanPredict, AddsProcessNoise) {
  const auto cfg = KalmanConfig::direct();
  KalmanState s{Eigen::Vector3d(1, 2, 3), Eigen::Matrix3d::Identity()};
  const auto p = kalman_predict(s, cfg);
  EXPECT_EQ(p.x_hat, Eigen::Vector3d(1, 2, 3));
  EXPECT_TRUE(p.P.isApprox(1.1 * Eigen::Matrix3d::Identity(), 1e-15));
}

TEST(KalmanPredict, ZeroProcessNoiseIsIdentity) {
  auto cfg = KalmanConfig::direct(0.0);
  Eigen::Matrix3d P;
  P << 2, 0.5, 0, 0.5, 1, 0.1, 0, 0.1, 3;
  KalmanState s{Eigen::Vector3d(4, 5, 6), P};
  const auto p = kalman_predict(s, cfg);
  EXPECT_EQ(p.x_hat, s.x_hat);
  EXPECT_EQ(p.P, s.P);
}

TEST(KalmanPredict, ZeroPriorBecomesQ) {
  KalmanState s{Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
  const auto p = kalman_predict(s, KalmanConfig::direct());
  EXPECT_TRUE(p.P.isApprox(0.1 * Eigen::Matrix3d::Identity()));
}

TEST(KalmanUpdate, HandArithmetic) {
  const auto cfg = KalmanConfig::direct();
  KalmanState s{Eigen::Vector3d::Zero(), 1.1 * Eigen::Matrix3d::Identity()};
  const auto K = kalman_gain(s, cfg);
  EXPECT_TRUE(K.isApprox(0.6875 * Eigen::MatrixXd::Identity(3, 3), 1e-12));
  const auto u = kalman_update(s, Eigen::Vector3d(1, 1, 1), cfg);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(u.x_hat(a), 0.6875, 1e-12);
  EXPECT_TRUE(u.P.isApprox(0.34375 * Eigen::Matrix3d::Identity(), 1e-12));
}

TEST(KalmanUpdate, ZeroCovarianceIgnoresMeasurement) {
  const auto cfg = KalmanConfig::stacked();
  KalmanState s{Eigen::Vector3d(1, -1, 2), Eigen::Matrix3d::Zero()};
  Eigen::VectorXd z(9);
  z << 9, 9, 9, -9, -9, -9, 4, 4, 4;
  const auto u = kalman_update(s, z, cfg);
  EXPECT_NEAR((u.x_hat - s.x_hat).norm(), 0.0, 1e-15);
  EXPECT_NEAR(kalman_gain(s, cfg).norm(), 0.0, 1e-15);
}

TEST(KalmanUpdate, ZeroInnovationKeepsEstimate) {
  const auto cfg = KalmanConfig::stacked();
  KalmanState s{Eigen::Vector3d(0.3, 7, -2), 2.0 * Eigen::Matrix3d::Identity()};
  const Eigen::VectorXd z = cfg.H * s.x_hat;
  const auto u = kalman_update(s, z, cfg);
  EXPECT_NEAR((u.x_hat - s.x_hat).norm(), 0.0, 1e-12);
}

TEST(KalmanUpdate, LargePriorGivesSensorMean) {
  const auto cfg = KalmanConfig::stacked();
  KalmanState s{Eigen::Vector3d(100, -100, 50), 1e6 * Eigen::Matrix3d::Identity()};
  Eigen::VectorXd z(9);
  z << 1, 2, 3, 4, 6, 8, -2, 1, 7;
  const auto u = kalman_update(kalman_predict(s, cfg), z, cfg);
  const Eigen::Vector3d mean((1 + 4 - 2) / 3.0, (2 + 6 + 1) / 3.0, (3 + 8 + 7) / 3.0);
  EXPECT_LT((u.x_hat - mean).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(KalmanUpdate, ScalarGainClosedForm) {
  auto g = testsupport::rng_for(77);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = testsupport::uniform_real(g, 1e-3, 50.0);
    const double r = testsupport::uniform_real(g, 1e-3, 50.0);
    auto cfg = KalmanConfig::direct(0.0, r);
    KalmanState s{Eigen::Vector3d::Zero(), p * Eigen::Matrix3d::Identity()};
    const auto K = kalman_gain(s, cfg);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(K(a, a), p / (p + r), 1e-14);
    EXPECT_NEAR((K - K.diagonal().asDiagonal().toDenseMatrix()).norm(), 0.0, 1e-14);
  }
}

TEST(KalmanUpdate, CovarianceStaysSymmetricPsd) {
  auto g = testsupport::rng_for(31337);
  const auto cfg = KalmanConfig::stacked();
  KalmanState s{Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()};
  Eigen::VectorXd z(9);
  for (int step = 0; step < 10000; ++step) {
    for (int i = 0; i < 9; ++i) z(i) = testsupport::uniform_real(g, -100.0, 100.0);
    s = kalman_update(kalman_predict(s, cfg), z, cfg);
    ASSERT_LT((s.P - s.P.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(s.P).eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(KalmanUpdate, PassThroughWithTinyMeasurementNoise) {
  auto cfg = KalmanConfig::direct(0.0, 1e-12);
  KalmanState s{Eigen::Vector3d(5, 5, 5), Eigen::Matrix3d::Identity()};
  const Eigen::Vector3d z(-1.25, 3.5, 0.75);
  const auto u = kalman_update(s, z, cfg);
  EXPECT_LT((u.x_hat - z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(KalmanUpdate, SingularInnovationIsNumericalError) {
  auto cfg = KalmanConfig::direct(0.0, 0.0);
  KalmanState s{Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
  try {
    kalman_update(s, Eigen::Vector3d(1, 2, 3), cfg);
    FAIL() << "expected numerical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(KalmanUpdate, WrongMeasurementSizeIsConfigError) {
  const auto cfg = KalmanConfig::stacked();
  KalmanState s;
  EXPECT_EQ(error_kind_of([&] { kalman_update(s, Eigen::Vector3d(1, 2, 3), cfg); }), ErrorKind::Config);
}

TEST(KalmanConfig, ValidateRejectsBadShapes) {
  auto cfg = KalmanConfig::stacked();
  cfg.R = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(error_kind_of([&] { cfg.validate(); }), ErrorKind::Config);
  cfg = KalmanConfig::stacked();
  cfg.Q(0, 1) = 1.0;
  EXPECT_EQ(error_kind_of([&] { cfg.validate(); }), ErrorKind::Config);
  cfg = KalmanConfig::stacked(-0.1);
  EXPECT_EQ(error_kind_of([&] { cfg.validate(); }), ErrorKind::Config);
}

TEST(KalmanDataset, SingleRowIsOneStep) {
  const auto ds = rows_from({{1, 2, 3, 4, 5, 6, 7, 8, 9}});
  const auto cfg = KalmanConfig::stacked();
  const auto out = kalman_filter_dataset(ds, cfg);
  ASSERT_EQ(out.filtered.size(), 1u);
  KalmanState s{sensor_mean(ds[0]), Eigen::Matrix3d::Identity()};
  const auto expect = kalman_update(kalman_predict(s, cfg), measurement_vector(ds[0], 9), cfg);
  for (int a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(out.filtered[0][static_cast<std::size_t>(a)], expect.x_hat(a));
}

TEST(KalmanDataset, ConstantInputIsFixedPoint) {
  std::vector<std::array<double, 9>> v(200, {2, -1, 4, 2, -1, 4, 2, -1, 4});
  const auto out = kalman_filter_dataset(rows_from(v), KalmanConfig::stacked(1e-9, 1e-9));
  for (const auto& f : out.filtered) {
    EXPECT_NEAR(f[0], 2.0, 1e-9);
    EXPECT_NEAR(f[1], -1.0, 1e-9);
    EXPECT_NEAR(f[2], 4.0, 1e-9);
  }
}

TEST(KalmanDataset, SmoothsNoisyConstant) {
  Rng rng(2718);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::array<double, 9>> v(1000);
  std::vector<double> raw_mean;
  for (auto& row : v) {
    for (auto& x : row) x = 3.0 + noise(rng);
    raw_mean.push_back((row[0] + row[3] + row[6]) / 3.0);
  }
  const auto out = kalman_filter_dataset(rows_from(v), KalmanConfig::stacked());
  std::vector<double> fx, rx;
  for (std::size_t i = 500; i < 1000; ++i) {
    fx.push_back(out.filtered[i][0]);
    rx.push_back(raw_mean[i]);
  }
  EXPECT_LT(variance(fx), 0.5 * variance(rx));
}

TEST(KalmanDataset, ExtraColumnsAndFeatures) {
  const auto ds = generate_synthetic(separable_synth_config(2, 10, 5.0, 1.0, 4));
  const auto out = kalman_filter_dataset(ds, KalmanConfig::stacked());
  const auto cols = out.extra_columns();
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[2].first, "Kalman Filtered Z");
  const auto f = out.features();
  EXPECT_EQ(f.rows(), ds.size());
  EXPECT_EQ(f.cols(), 3u);
  EXPECT_EQ(f(7, 1), cols[1].second[7]);
}

TEST(KalmanDataset, EmptyDatasetRejected) {
  EXPECT_EQ(error_kind_of([] { kalman_filter_dataset(Dataset{}, KalmanConfig::stacked()); }), ErrorKind::Argument);
}
