#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "fusionhar/core.hpp"

namespace fusionhar {

// Dense row-major N x d matrix of model inputs.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, ErrorKind::Argument, "feature matrix data has wrong size");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      require(indices[i] < rows_, ErrorKind::Argument, "row index out of range");
      std::copy_n(row(indices[i]).begin(), cols_, out.row(i).begin());
    }
    return out;
  }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Feature-level fusion
// ---------------------------------------------------------------------------

// Column selection over a dataset: the selected sensors' triples in canonical
// sensor order. Holds a reference; the dataset must outlive the view.
class FeatureView {
 public:
  FeatureView(const Dataset& dataset, std::vector<SensorKind> sensors)
      : dataset_(&dataset), sensors_(std::move(sensors)) {
    for (auto s : sensors_) {
      const auto f = first_channel(s);
      for (std::size_t a = 0; a < 3; ++a) columns_.push_back(f + a);
    }
  }

  std::size_t rows() const noexcept { return dataset_->size(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<SensorKind>& sensors() const noexcept { return sensors_; }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  const Dataset& dataset() const noexcept { return *dataset_; }

  double operator()(std::size_t r, std::size_t c) const { return (*dataset_)[r].channel(columns_[c]); }

  std::vector<std::string> column_names() const {
    std::vector<std::string> out;
    for (auto c : columns_) out.emplace_back(kChannelNames[c]);
    return out;
  }

  FeatureMatrix materialize() const {
    FeatureMatrix out(rows(), cols());
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t c = 0; c < cols(); ++c) out(r, c) = (*this)(r, c);
    return out;
  }

 private:
  const Dataset* dataset_;
  std::vector<SensorKind> sensors_;
  std::vector<std::size_t> columns_;
};

inline FeatureView feature_fuse(const Dataset& dataset, std::span<const SensorKind> sensors) {
  require(!sensors.empty(), ErrorKind::Argument, "feature fusion needs at least one sensor");
  std::set<SensorKind> unique(sensors.begin(), sensors.end());
  return FeatureView(dataset, std::vector<SensorKind>(unique.begin(), unique.end()));
}

inline FeatureView feature_fuse(const Dataset& dataset, std::initializer_list<SensorKind> sensors) {
  return feature_fuse(dataset, std::span<const SensorKind>(sensors.begin(), sensors.size()));
}

// ---------------------------------------------------------------------------
// Kalman filter
// ---------------------------------------------------------------------------

inline constexpr double kDefaultProcessNoise = 0.1;
inline constexpr double kDefaultMeasurementNoise = 0.5;
inline constexpr double kMinReciprocalCondition = 1e-12;

// Linear filter over a 3-vector latent state. B and u are carried for
// completeness; the default configuration has them at zero.
struct KalmanConfig {
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  Eigen::MatrixXd H;
  Eigen::Matrix3d Q = kDefaultProcessNoise * Eigen::Matrix3d::Identity();
  Eigen::MatrixXd R;

  std::size_t measurement_dim() const { return static_cast<std::size_t>(H.rows()); }

  // H = [I3; I3; I3]: each sensor is one noisy observation of the state.
  static KalmanConfig stacked(double q_scale = kDefaultProcessNoise, double r_scale = kDefaultMeasurementNoise) {
    KalmanConfig cfg;
    cfg.H = Eigen::MatrixXd::Zero(9, 3);
    for (int s = 0; s < 3; ++s) cfg.H.block<3, 3>(3 * s, 0).setIdentity();
    cfg.Q = q_scale * Eigen::Matrix3d::Identity();
    cfg.R = r_scale * Eigen::MatrixXd::Identity(9, 9);
    return cfg;
  }

  // H = I3, for a single direct 3-vector measurement.
  static KalmanConfig direct(double q_scale = kDefaultProcessNoise, double r_scale = kDefaultMeasurementNoise) {
    KalmanConfig cfg;
    cfg.H = Eigen::MatrixXd::Identity(3, 3);
    cfg.Q = q_scale * Eigen::Matrix3d::Identity();
    cfg.R = r_scale * Eigen::MatrixXd::Identity(3, 3);
    return cfg;
  }

  void validate() const {
    require(H.cols() == 3 && H.rows() >= 1, ErrorKind::Config, "H must be m x 3");
    require(R.rows() == H.rows() && R.cols() == H.rows(), ErrorKind::Config, "R must be m x m with m = rows(H)");
    require((Q - Q.transpose()).norm() < 1e-12, ErrorKind::Config, "Q must be symmetric");
    require((R - R.transpose()).norm() < 1e-12, ErrorKind::Config, "R must be symmetric");
    require(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(Q).eigenvalues().minCoeff() >= -1e-12,
            ErrorKind::Config, "Q must be positive semi-definite");
    require(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R).eigenvalues().minCoeff() >= -1e-12,
            ErrorKind::Config, "R must be positive semi-definite");
  }
};

struct KalmanState {
  Eigen::Vector3d x_hat = Eigen::Vector3d::Zero();
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
};

inline KalmanState kalman_predict(const KalmanState& state, const KalmanConfig& config) {
  KalmanState out;
  out.x_hat = config.F * state.x_hat + config.B * config.u;
  out.P = config.F * state.P * config.F.transpose() + config.Q;
  return out;
}

inline KalmanState kalman_update(const KalmanState& state, const Eigen::VectorXd& z, const KalmanConfig& config) {
  require(static_cast<std::size_t>(z.size()) == config.measurement_dim(), ErrorKind::Config,
          "measurement has " + std::to_string(z.size()) + " entries, H expects " +
              std::to_string(config.measurement_dim()));
  require(config.R.rows() == config.H.rows(), ErrorKind::Config, "R does not match H");
  const Eigen::MatrixXd PHt = state.P * config.H.transpose();
  const Eigen::MatrixXd S = config.H * PHt + config.R;
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond >= kMinReciprocalCondition)) {
    std::ostringstream msg;
    msg << "innovation covariance is singular or not positive definite (reciprocal condition " << rcond
        << " < " << kMinReciprocalCondition << ")";
    fail(ErrorKind::Numerical, msg.str());
  }
  // K = P H^T S^-1, solved as S K^T = H P (S and P symmetric).
  const Eigen::MatrixXd K = llt.solve(PHt.transpose()).transpose();
  KalmanState out;
  out.x_hat = state.x_hat + K * (z - config.H * state.x_hat);
  out.P = (Eigen::Matrix3d::Identity() - K * config.H) * state.P;
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

// Gain for a given predicted state, exposed for diagnostics and tests.
inline Eigen::MatrixXd kalman_gain(const KalmanState& predicted, const KalmanConfig& config) {
  const Eigen::MatrixXd PHt = predicted.P * config.H.transpose();
  const Eigen::MatrixXd S = config.H * PHt + config.R;
  return Eigen::LLT<Eigen::MatrixXd>(S).solve(PHt.transpose()).transpose();
}

// Measurement vector for one row: the three sensor triples stacked when
// m = 9, or their per-axis mean when m = 3.
inline Eigen::VectorXd measurement_vector(const SyncRecord& row, std::size_t m) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(m));
  if (m == 9) {
    for (std::size_t c = 0; c < 9; ++c) z(static_cast<Eigen::Index>(c)) = row.channel(c);
  } else if (m == 3) {
    for (std::size_t a = 0; a < 3; ++a) z(static_cast<Eigen::Index>(a)) = (row.accel[a] + row.gyro[a] + row.mag[a]) / 3.0;
  } else {
    fail(ErrorKind::Config, "measurement dimension must be 3 or 9 to filter a dataset");
  }
  return z;
}

inline Eigen::Vector3d sensor_mean(const SyncRecord& row) {
  Eigen::Vector3d out;
  for (std::size_t a = 0; a < 3; ++a) out(static_cast<Eigen::Index>(a)) = (row.accel[a] + row.gyro[a] + row.mag[a]) / 3.0;
  return out;
}

struct KalmanFiltered {
  Dataset dataset;
  // Posterior estimate after each row.
  std::vector<Vec3> filtered;

  static constexpr std::array<std::string_view, 3> kColumnNames = {"Kalman Filtered X", "Kalman Filtered Y",
                                                                   "Kalman Filtered Z"};

  FeatureMatrix features() const {
    FeatureMatrix out(filtered.size(), 3);
    for (std::size_t i = 0; i < filtered.size(); ++i)
      for (std::size_t a = 0; a < 3; ++a) out(i, a) = filtered[i][a];
    return out;
  }

  std::vector<std::pair<std::string, std::vector<double>>> extra_columns() const {
    std::vector<std::pair<std::string, std::vector<double>>> out;
    for (std::size_t a = 0; a < 3; ++a) {
      std::vector<double> col;
      col.reserve(filtered.size());
      for (const auto& v : filtered) col.push_back(v[a]);
      out.emplace_back(std::string(kColumnNames[a]), std::move(col));
    }
    return out;
  }
};

// Sequential predict/update over rows in timestamp order, starting from the
// row-0 sensor mean with the given prior covariance.
inline KalmanFiltered kalman_filter_dataset(const Dataset& dataset, const KalmanConfig& config,
                                            const Eigen::Matrix3d& initial_P = Eigen::Matrix3d::Identity()) {
  require(!dataset.empty(), ErrorKind::Argument, "cannot filter an empty dataset");
  config.validate();
  KalmanState state{sensor_mean(dataset[0]), initial_P};
  KalmanFiltered out{dataset, {}};
  out.filtered.reserve(dataset.size());
  const auto m = config.measurement_dim();
  for (const auto& row : dataset.rows()) {
    state = kalman_update(kalman_predict(state, config), measurement_vector(row, m), config);
    out.filtered.push_back({state.x_hat(0), state.x_hat(1), state.x_hat(2)});
  }
  return out;
}

}  // namespace fusionhar
