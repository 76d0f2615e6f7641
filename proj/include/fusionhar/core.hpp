#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusionhar/error.hpp"

namespace fusionhar {

using ClassIndex = std::size_t;
using TimestampMs = std::int64_t;
using Vec3 = std::array<double, 3>;

inline constexpr std::size_t kNumChannels = 9;

enum class SensorKind { Accelerometer = 0, Gyroscope = 1, Magnetometer = 2 };

inline constexpr std::array<SensorKind, 3> kAllSensors = {
    SensorKind::Accelerometer, SensorKind::Gyroscope, SensorKind::Magnetometer};

// First column of the sensor's triple in a fused 9-channel row.
inline constexpr std::size_t first_channel(SensorKind s) { return 3 * static_cast<std::size_t>(s); }

inline std::string_view sensor_name(SensorKind s) {
  switch (s) {
    case SensorKind::Accelerometer: return "accelerometer";
    case SensorKind::Gyroscope: return "gyroscope";
    case SensorKind::Magnetometer: return "magnetometer";
  }
  return "?";
}

inline std::optional<SensorKind> parse_sensor(std::string_view name) {
  if (name == "accelerometer" || name == "acc" || name == "accel") return SensorKind::Accelerometer;
  if (name == "gyroscope" || name == "gyr" || name == "gyro") return SensorKind::Gyroscope;
  if (name == "magnetometer" || name == "mag") return SensorKind::Magnetometer;
  return std::nullopt;
}

// Canonical channel headers, in fused-row order.
inline constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "Acceleration X (g)",       "Acceleration Y (g)",       "Acceleration Z (g)",
    "Angular velocity X (°/s)", "Angular velocity Y (°/s)", "Angular velocity Z (°/s)",
    "Magnetic field X (Bx)",    "Magnetic field Y (By)",    "Magnetic field Z (Bz)"};

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kPrimaryActivities = {"walking", "working", "sitting",
                                                                       "lying"};

enum class LabelScheme {
  // walking=0, working=1, sitting=2, lying=3; other names appended after.
  Primary,
  // Dense indices in order of first appearance.
  FirstAppearance,
};

struct ActivityLabel {
  std::string name;
  ClassIndex index = 0;

  bool operator==(const ActivityLabel&) const = default;
};

class LabelVocabulary {
 public:
  LabelVocabulary() = default;

  explicit LabelVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      require(!names_[i].empty(), ErrorKind::Argument, "empty activity name in vocabulary");
      for (std::size_t j = 0; j < i; ++j)
        require(names_[j] != names_[i], ErrorKind::Argument, "duplicate activity name '" + names_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  const std::string& name(ClassIndex k) const {
    require(k < names_.size(), ErrorKind::Argument, "class index out of range");
    return names_[k];
  }

  std::optional<ClassIndex> find(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<ClassIndex>(it - names_.begin());
  }

  ClassIndex index_of(std::string_view name) const {
    auto k = find(name);
    require(k.has_value(), ErrorKind::Argument, "unknown activity '" + std::string(name) + "'");
    return *k;
  }

  ActivityLabel label(ClassIndex k) const { return {name(k), k}; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const LabelVocabulary&) const = default;

 private:
  std::vector<std::string> names_;
};

struct EncodedLabels {
  LabelVocabulary vocabulary;
  std::vector<ClassIndex> indices;
};

inline std::string normalize_activity(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Under the Primary scheme, any primary activity name present pulls in the
// full four-class vocabulary so that K stays 4 regardless of which classes
// a file happens to contain.
inline EncodedLabels encode_labels(std::span<const std::string> raw_names,
                                   LabelScheme scheme = LabelScheme::Primary) {
  require(!raw_names.empty(), ErrorKind::Argument, "no labels to encode");
  std::vector<std::string> normalized;
  normalized.reserve(raw_names.size());
  for (std::size_t i = 0; i < raw_names.size(); ++i) {
    normalized.push_back(normalize_activity(raw_names[i]));
    require(!normalized.back().empty(), ErrorKind::Parse, "empty activity label at row " + std::to_string(i + 1));
  }

  std::vector<std::string> vocab;
  if (scheme == LabelScheme::Primary) {
    bool any_primary = std::any_of(normalized.begin(), normalized.end(), [](const std::string& n) {
      return std::find(kPrimaryActivities.begin(), kPrimaryActivities.end(), n) != kPrimaryActivities.end();
    });
    if (any_primary) vocab.assign(kPrimaryActivities.begin(), kPrimaryActivities.end());
  }
  for (const auto& n : normalized)
    if (std::find(vocab.begin(), vocab.end(), n) == vocab.end()) vocab.push_back(n);

  EncodedLabels out{LabelVocabulary(std::move(vocab)), {}};
  out.indices.reserve(normalized.size());
  for (const auto& n : normalized) out.indices.push_back(out.vocabulary.index_of(n));
  return out;
}

// ---------------------------------------------------------------------------
// Records and datasets
// ---------------------------------------------------------------------------

struct SyncRecord {
  TimestampMs timestamp = 0;
  Vec3 accel{};
  Vec3 gyro{};
  Vec3 mag{};
  ClassIndex label = 0;

  const Vec3& sensor(SensorKind s) const {
    switch (s) {
      case SensorKind::Accelerometer: return accel;
      case SensorKind::Gyroscope: return gyro;
      case SensorKind::Magnetometer: return mag;
    }
    return accel;
  }
  Vec3& sensor(SensorKind s) { return const_cast<Vec3&>(std::as_const(*this).sensor(s)); }

  double channel(std::size_t c) const { return sensor(static_cast<SensorKind>(c / 3))[c % 3]; }

  bool all_finite() const {
    for (std::size_t c = 0; c < kNumChannels; ++c)
      if (!std::isfinite(channel(c))) return false;
    return true;
  }

  bool operator==(const SyncRecord&) const = default;
};

// Immutable once built. Rows are timestamp-ordered and every label is in
// range of the vocabulary.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<SyncRecord> rows, LabelVocabulary vocabulary)
      : rows_(std::move(rows)), vocabulary_(std::move(vocabulary)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      require(r.all_finite(), ErrorKind::Argument, "non-finite channel value in row " + std::to_string(i));
      require(r.label < vocabulary_.size(), ErrorKind::Argument,
              "label index out of vocabulary range in row " + std::to_string(i));
      require(i == 0 || rows_[i - 1].timestamp <= r.timestamp, ErrorKind::Argument,
              "rows not sorted by timestamp at row " + std::to_string(i));
    }
  }

  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t num_classes() const noexcept { return vocabulary_.size(); }

  const SyncRecord& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<SyncRecord>& rows() const noexcept { return rows_; }
  const LabelVocabulary& vocabulary() const noexcept { return vocabulary_; }

  static constexpr const std::array<std::string_view, kNumChannels>& feature_names() { return kChannelNames; }

  std::vector<ClassIndex> labels() const {
    std::vector<ClassIndex> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.label);
    return out;
  }

  std::vector<double> channel_values(std::size_t c) const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.channel(c));
    return out;
  }

  // Rows at the given indices, re-sorted into timestamp order.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<SyncRecord> rows;
    rows.reserve(sorted.size());
    for (auto i : sorted) {
      require(i < rows_.size(), ErrorKind::Argument, "subset index out of range");
      rows.push_back(rows_[i]);
    }
    return Dataset(std::move(rows), vocabulary_);
  }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<SyncRecord> rows_;
  LabelVocabulary vocabulary_;
};

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream seed for the i-th worker (tree, class, ...) of `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

using Rng = std::mt19937_64;

// Uniform integer in [0, n) by rejection; portable across standard libraries.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

struct TrainTestSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

inline TrainTestSplit train_test_split(std::size_t n, double ratio, std::uint64_t seed) {
  require(n >= 2, ErrorKind::Argument, "split needs at least 2 rows");
  require(ratio > 0.0 && ratio < 1.0, ErrorKind::Argument, "split ratio must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
  TrainTestSplit out;
  out.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  out.seed = seed;
  out.ratio = ratio;
  return out;
}

inline TrainTestSplit train_test_split(const Dataset& dataset, double ratio, std::uint64_t seed) {
  return train_test_split(dataset.size(), ratio, seed);
}

}  // namespace fusionhar
