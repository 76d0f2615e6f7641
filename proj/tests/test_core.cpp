#include <cmath>
#include <set>

#include "fusionhar/core.hpp"
#include "test_support.hpp"

using namespace fusionhar;
using testsupport::error_kind_of;

TEST(SensorKind, ChannelTriplesAreContiguous) {
  EXPECT_EQ(first_channel(SensorKind::Accelerometer), 0u);
  EXPECT_EQ(first_channel(SensorKind::Gyroscope), 3u);
  EXPECT_EQ(first_channel(SensorKind::Magnetometer), 6u);
  EXPECT_EQ(kAllSensors.size(), 3u);
}

TEST(SensorKind, NamesRoundTrip) {
  for (auto s : kAllSensors) EXPECT_EQ(parse_sensor(sensor_name(s)), s);
  EXPECT_EQ(parse_sensor("acc"), SensorKind::Accelerometer);
  EXPECT_EQ(parse_sensor("gyro"), SensorKind::Gyroscope);
  EXPECT_EQ(parse_sensor("mag"), SensorKind::Magnetometer);
  EXPECT_FALSE(parse_sensor("barometer").has_value());
}

TEST(SyncRecord, ChannelIndexingFollowsSensorOrder) {
  SyncRecord r;
  r.accel = {1, 2, 3};
  r.gyro = {4, 5, 6};
  r.mag = {7, 8, 9};
  for (std::size_t c = 0; c < kNumChannels; ++c) EXPECT_EQ(r.channel(c), static_cast<double>(c + 1));
}

TEST(EncodeLabels, PrimaryNamesUseFixedIndices) {
  const std::vector<std::string> names = {"walking", "sitting", "walking"};
  const auto enc = encode_labels(names);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{0, 2, 0}));
  EXPECT_EQ(enc.vocabulary.index_of("walking"), 0u);
  EXPECT_EQ(enc.vocabulary.index_of("sitting"), 2u);
}

TEST(EncodeLabels, SinglePrimaryClass) {
  const std::vector<std::string> names = {"lying"};
  const auto enc = encode_labels(names);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{3}));
  EXPECT_EQ(enc.vocabulary.index_of("lying"), 3u);
}

TEST(EncodeLabels, PrimaryVocabularyIsDense) {
  const std::vector<std::string> names = {"sitting"};
  const auto enc = encode_labels(names);
  ASSERT_EQ(enc.vocabulary.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(enc.vocabulary.name(k), kPrimaryActivities[k]);
}

TEST(EncodeLabels, UnknownNamesFallBackToFirstAppearance) {
  const std::vector<std::string> names = {"running", "standing", "running"};
  const auto enc = encode_labels(names);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{0, 1, 0}));
  EXPECT_EQ(enc.vocabulary.size(), 2u);
}

TEST(EncodeLabels, UnknownNamesFollowPrimaryNames) {
  const std::vector<std::string> names = {"running", "walking", "cycling"};
  const auto enc = encode_labels(names);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{4, 0, 5}));
}

TEST(EncodeLabels, FirstAppearanceSchemeIgnoresPrimaryOrder) {
  const std::vector<std::string> names = {"sitting", "walking"};
  const auto enc = encode_labels(names, LabelScheme::FirstAppearance);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{0, 1}));
}

TEST(EncodeLabels, NormalizesCaseAndWhitespace) {
  const std::vector<std::string> names = {" Walking ", "LYING"};
  const auto enc = encode_labels(names);
  EXPECT_EQ(enc.indices, (std::vector<ClassIndex>{0, 3}));
}

TEST(EncodeLabels, EmptyNameIsIngestionError) {
  const std::vector<std::string> names = {"walking", "  "};
  EXPECT_EQ(error_kind_of([&] { encode_labels(names); }), ErrorKind::Parse);
}

TEST(EncodeLabels, EmptyInputRejected) {
  EXPECT_EQ(error_kind_of([] { encode_labels(std::vector<std::string>{}); }), ErrorKind::Argument);
}

TEST(EncodeLabels, DecodeRoundTrip) {
  auto g = testsupport::rng_for(11);
  const std::vector<std::string> pool = {"walking", "working", "sitting", "lying", "running", "jumping", "standing"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> names(testsupport::uniform_int(g, 1, 30));
    for (auto& n : names) n = pool[testsupport::uniform_int(g, 0, pool.size() - 1)];
    for (auto scheme : {LabelScheme::Primary, LabelScheme::FirstAppearance}) {
      const auto enc = encode_labels(names, scheme);
      for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(enc.vocabulary.name(enc.indices[i]), names[i]);
      for (std::size_t k = 0; k < enc.vocabulary.size(); ++k)
        EXPECT_EQ(enc.vocabulary.index_of(enc.vocabulary.name(k)), k);
    }
  }
}

TEST(LabelVocabulary, RejectsDuplicates) {
  EXPECT_EQ(error_kind_of([] { LabelVocabulary({"a", "a"}); }), ErrorKind::Argument);
}

namespace {

SyncRecord record(TimestampMs t, ClassIndex label, double v = 0.0) {
  SyncRecord r;
  r.timestamp = t;
  r.label = label;
  r.accel = {v, v, v};
  return r;
}

}  // namespace

TEST(Dataset, RejectsNonFiniteChannel) {
  auto r = record(0, 0);
  r.mag[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(error_kind_of([&] { Dataset({r}, LabelVocabulary({"a"})); }), ErrorKind::Argument);
  r.mag[1] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(error_kind_of([&] { Dataset({r}, LabelVocabulary({"a"})); }), ErrorKind::Argument);
}

TEST(Dataset, RejectsLabelOutsideVocabulary) {
  EXPECT_EQ(error_kind_of([] { Dataset({record(0, 2)}, LabelVocabulary({"a", "b"})); }), ErrorKind::Argument);
}

TEST(Dataset, RejectsUnsortedTimestamps) {
  EXPECT_EQ(error_kind_of([] { Dataset({record(5, 0), record(4, 0)}, LabelVocabulary({"a"})); }),
            ErrorKind::Argument);
}

TEST(Dataset, SubsetKeepsTimestampOrder) {
  Dataset ds({record(0, 0, 0), record(1, 1, 1), record(2, 0, 2), record(3, 1, 3)}, LabelVocabulary({"a", "b"}));
  const std::vector<std::size_t> idx = {3, 0, 2};
  const auto sub = ds.subset(idx);
  ASSERT_EQ(sub.size(), 3u);
  EXPECT_EQ(sub[0].timestamp, 0);
  EXPECT_EQ(sub[1].timestamp, 2);
  EXPECT_EQ(sub[2].timestamp, 3);
  EXPECT_EQ(sub.vocabulary(), ds.vocabulary());
}

TEST(TrainTestSplit, TenRows) {
  const auto s = train_test_split(10, 0.8, 1);
  EXPECT_EQ(s.train_indices.size(), 8u);
  EXPECT_EQ(s.test_indices.size(), 2u);
}

TEST(TrainTestSplit, LargeOddCount) {
  const std::size_t expected_train = static_cast<std::size_t>(std::floor(3239 * 0.8));
  const auto s = train_test_split(3239, 0.8, 7);
  EXPECT_EQ(expected_train, 2591u);
  EXPECT_EQ(s.train_indices.size(), 2591u);
  EXPECT_EQ(s.test_indices.size(), 648u);
}

TEST(TrainTestSplit, DeterministicForSeed) {
  const auto a = train_test_split(500, 0.7, 99);
  const auto b = train_test_split(500, 0.7, 99);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  const auto c = train_test_split(500, 0.7, 100);
  EXPECT_NE(a.train_indices, c.train_indices);
}

TEST(TrainTestSplit, PartitionPropertyOverRandomTriples) {
  auto g = testsupport::rng_for(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = testsupport::uniform_int(g, 2, 400);
    const double ratio = testsupport::uniform_real(g, 0.01, 0.99);
    const std::uint64_t seed = g();
    const auto s = train_test_split(n, ratio, seed);
    ASSERT_EQ(s.train_indices.size(), static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio)));
    std::vector<int> seen(n, 0);
    for (auto i : s.train_indices) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
    for (auto i : s.test_indices) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(seen[i], 1) << "index " << i << " n=" << n;
  }
}

TEST(TrainTestSplit, RejectsBadArguments) {
  EXPECT_EQ(error_kind_of([] { train_test_split(1, 0.8, 0); }), ErrorKind::Argument);
  EXPECT_EQ(error_kind_of([] { train_test_split(10, 0.0, 0); }), ErrorKind::Argument);
  EXPECT_EQ(error_kind_of([] { train_test_split(10, 1.0, 0); }), ErrorKind::Argument);
  EXPECT_EQ(error_kind_of([] { train_test_split(10, -0.5, 0); }), ErrorKind::Argument);
}

TEST(Seeding, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(Seeding, UniformIndexStaysInRange) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_index(rng, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Seeding, ShuffleIsPermutation) {
  Rng rng(5);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  shuffle(std::span<int>(v), rng);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}
