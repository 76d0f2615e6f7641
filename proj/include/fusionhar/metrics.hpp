#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fusionhar/core.hpp"
#include "fusionhar/ingest.hpp"

namespace fusionhar {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t k = 0) : k_(k), counts_(k * k, 0) {}

  std::size_t num_classes() const noexcept { return k_; }
  std::uint64_t operator()(std::size_t truth, std::size_t pred) const { return counts_[truth * k_ + pred]; }
  std::uint64_t& operator()(std::size_t truth, std::size_t pred) { return counts_[truth * k_ + pred]; }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts_) n += c;
    return n;
  }

  std::uint64_t trace() const {
    std::uint64_t t = 0;
    for (std::size_t k = 0; k < k_; ++k) t += (*this)(k, k);
    return t;
  }

  std::uint64_t support(std::size_t k) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) s += (*this)(k, j);
    return s;
  }

  std::uint64_t predicted(std::size_t k) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += (*this)(i, k);
    return s;
  }

  std::vector<std::vector<std::uint64_t>> to_rows() const {
    std::vector<std::vector<std::uint64_t>> rows(k_, std::vector<std::uint64_t>(k_));
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) rows[i][j] = (*this)(i, j);
    return rows;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred,
                                        std::size_t k) {
  require(y_true.size() == y_pred.size(), ErrorKind::Argument, "y_true and y_pred differ in length");
  require(!y_true.empty(), ErrorKind::Argument, "confusion matrix of zero samples");
  ConfusionMatrix cm(k);
  for (std::size_t t = 0; t < y_true.size(); ++t) {
    require(y_true[t] < k && y_pred[t] < k, ErrorKind::Argument,
            "class index out of range at position " + std::to_string(t));
    ++cm(y_true[t], y_pred[t]);
  }
  return cm;
}

struct ClassBreakdown {
  ClassIndex cls = 0;
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ClassBreakdown&) const = default;
};

inline ClassBreakdown class_breakdown(const ConfusionMatrix& cm, ClassIndex k) {
  require(k < cm.num_classes(), ErrorKind::Argument, "class index out of range");
  ClassBreakdown b;
  b.cls = k;
  b.tp = cm(k, k);
  b.fp = cm.predicted(k) - b.tp;
  b.fn = cm.support(k) - b.tp;
  b.tn = cm.total() - b.tp - b.fp - b.fn;
  return b;
}

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  std::optional<double> rmse;
  std::vector<ClassScores> per_class;
  std::vector<ClassBreakdown> breakdowns;
  ConfusionMatrix confusion;
};

// 0/0 is taken as 0.
inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline MetricsReport metrics(const ConfusionMatrix& cm, std::optional<double> rmse = std::nullopt) {
  const auto n = cm.total();
  require(n >= 1, ErrorKind::Argument, "metrics of an empty confusion matrix");
  MetricsReport r;
  r.confusion = cm;
  r.rmse = rmse;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(cm.num_classes());
  r.accuracy = static_cast<double>(cm.trace()) / nd;
  for (std::size_t k = 0; k < cm.num_classes(); ++k) {
    const auto b = class_breakdown(cm, k);
    ClassScores s;
    s.support = cm.support(k);
    s.precision = safe_ratio(static_cast<double>(b.tp), static_cast<double>(b.tp + b.fp));
    s.recall = safe_ratio(static_cast<double>(b.tp), static_cast<double>(b.tp + b.fn));
    s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    const auto w = static_cast<double>(s.support);
    r.precision_weighted += w * s.precision;
    r.recall_weighted += w * s.recall;
    r.f1_weighted += w * s.f1;
    r.precision_macro += s.precision / kd;
    r.recall_macro += s.recall / kd;
    r.f1_macro += s.f1 / kd;
    r.per_class.push_back(s);
    r.breakdowns.push_back(b);
  }
  r.precision_weighted /= nd;
  r.recall_weighted /= nd;
  r.f1_weighted /= nd;
  return r;
}

inline MetricsReport metrics(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred, std::size_t k,
                             std::optional<double> rmse = std::nullopt) {
  return metrics(confusion_matrix(y_true, y_pred, k), rmse);
}

// sqrt( 1/(N K) sum_i sum_k (p_ik - 1{y_i = k})^2 )
inline double rmse_proba(std::span<const std::vector<double>> proba, std::span<const ClassIndex> y_true) {
  require(proba.size() == y_true.size(), ErrorKind::Argument, "probabilities and labels differ in length");
  require(!proba.empty(), ErrorKind::Argument, "rmse of zero samples");
  const std::size_t k = proba.front().size();
  require(k >= 1, ErrorKind::Argument, "probability rows are empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < proba.size(); ++i) {
    const auto& row = proba[i];
    require(row.size() == k, ErrorKind::Argument, "probability rows differ in width");
    require(y_true[i] < k, ErrorKind::Argument, "label out of range for probability row");
    double row_sum = 0.0;
    for (double p : row) {
      require(std::isfinite(p) && p >= -1e-12 && p <= 1.0 + 1e-12, ErrorKind::Argument,
              "probability outside [0, 1] in row " + std::to_string(i));
      row_sum += p;
    }
    require(std::fabs(row_sum - 1.0) <= 1e-6, ErrorKind::Argument,
            "probability row " + std::to_string(i) + " does not sum to 1");
    for (std::size_t c = 0; c < k; ++c) {
      const double e = row[c] - (y_true[i] == c ? 1.0 : 0.0);
      sum += e * e;
    }
  }
  return std::sqrt(sum / (static_cast<double>(proba.size()) * static_cast<double>(k)));
}

// RMSE of hard predictions, scored as one-hot probability rows.
inline double rmse_hard(std::span<const ClassIndex> y_pred, std::span<const ClassIndex> y_true, std::size_t k) {
  std::vector<std::vector<double>> rows;
  rows.reserve(y_pred.size());
  for (auto p : y_pred) {
    require(p < k, ErrorKind::Argument, "prediction out of range");
    std::vector<double> r(k, 0.0);
    r[p] = 1.0;
    rows.push_back(std::move(r));
  }
  return rmse_proba(rows, y_true);
}

// ---------------------------------------------------------------------------
// Exploratory statistics
// ---------------------------------------------------------------------------

// Pearson correlation of the nine channels. Pairs involving a zero-variance
// channel are 0 off the diagonal; the diagonal is always 1.
inline std::array<std::array<double, kNumChannels>, kNumChannels> correlation_matrix(const Dataset& dataset) {
  require(dataset.size() >= 2, ErrorKind::Argument, "correlation needs at least 2 rows");
  const auto n = static_cast<double>(dataset.size());
  std::array<double, kNumChannels> mean{};
  for (const auto& r : dataset.rows())
    for (std::size_t c = 0; c < kNumChannels; ++c) mean[c] += r.channel(c);
  for (auto& m : mean) m /= n;
  std::array<std::array<double, kNumChannels>, kNumChannels> cov{};
  for (const auto& r : dataset.rows())
    for (std::size_t a = 0; a < kNumChannels; ++a) {
      const double da = r.channel(a) - mean[a];
      for (std::size_t b = a; b < kNumChannels; ++b) cov[a][b] += da * (r.channel(b) - mean[b]);
    }
  std::array<std::array<double, kNumChannels>, kNumChannels> out{};
  for (std::size_t a = 0; a < kNumChannels; ++a) {
    out[a][a] = 1.0;
    for (std::size_t b = a + 1; b < kNumChannels; ++b) {
      const double den = std::sqrt(cov[a][a] * cov[b][b]);
      const double r = den > 0.0 ? std::clamp(cov[a][b] / den, -1.0, 1.0) : 0.0;
      out[a][b] = out[b][a] = r;
    }
  }
  return out;
}

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1
  std::vector<std::uint64_t> counts;
};

// Equal-width bins over [min, max]; the maximum lands in the last bin. A
// constant input yields one zero-width bin holding every value.
inline Histogram histogram(std::span<const double> values, std::size_t n_bins) {
  require(n_bins >= 1, ErrorKind::Argument, "histogram needs at least one bin");
  require(!values.empty(), ErrorKind::Argument, "histogram of no values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  if (!(hi > lo)) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(n_bins, 0);
  for (double v : values) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    if (bin >= n_bins) bin = n_bins - 1;
    ++h.counts[bin];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json_report(const MetricsReport& r, const LabelVocabulary* vocab = nullptr) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& s = r.per_class[k];
    const auto& b = r.breakdowns[k];
    nlohmann::json row{{"class", k},   {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                       {"support", s.support}, {"tp", b.tp}, {"fp", b.fp}, {"fn", b.fn}, {"tn", b.tn}};
    if (vocab && k < vocab->size()) row["name"] = vocab->name(k);
    per_class.push_back(std::move(row));
  }
  nlohmann::json j{{"n", r.confusion.total()},
                   {"accuracy", r.accuracy},
                   {"precision_weighted", r.precision_weighted},
                   {"recall_weighted", r.recall_weighted},
                   {"f1_weighted", r.f1_weighted},
                   {"precision_macro", r.precision_macro},
                   {"recall_macro", r.recall_macro},
                   {"f1_macro", r.f1_macro},
                   {"per_class", per_class},
                   {"confusion_matrix", r.confusion.to_rows()}};
  j["rmse"] = r.rmse ? nlohmann::json(*r.rmse) : nlohmann::json(nullptr);
  return j;
}

inline std::string confusion_csv(const ConfusionMatrix& cm, const LabelVocabulary& vocab) {
  auto name = [&](std::size_t k) { return k < vocab.size() ? vocab.name(k) : "class_" + std::to_string(k); };
  std::string out = "true\\predicted";
  for (std::size_t k = 0; k < cm.num_classes(); ++k) out += "," + csv::escape(name(k));
  out += '\n';
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    out += csv::escape(name(i));
    for (std::size_t j = 0; j < cm.num_classes(); ++j) out += "," + std::to_string(cm(i, j));
    out += '\n';
  }
  return out;
}

inline std::string correlation_csv(const std::array<std::array<double, kNumChannels>, kNumChannels>& corr) {
  std::string out = "channel";
  for (auto n : kChannelNames) out += "," + csv::escape(n);
  out += '\n';
  for (std::size_t a = 0; a < kNumChannels; ++a) {
    out += csv::escape(kChannelNames[a]);
    for (std::size_t b = 0; b < kNumChannels; ++b) out += "," + csv::format_double(corr[a][b]);
    out += '\n';
  }
  return out;
}

inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_start,bin_end,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out += csv::format_double(h.edges[i]) + "," + csv::format_double(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) + "\n";
  return out;
}

}  // namespace fusionhar
