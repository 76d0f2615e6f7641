#include <cmath>
#include <set>

#include "fusionhar/ingest.hpp"
#include "test_support.hpp"

using namespace fusionhar;
using testsupport::error_kind_of;

namespace {

const char* kHeader9 =
    "Timestamp,Acceleration X (g),Acceleration Y (g),Acceleration Z (g),"
    "Angular velocity X (°/s),Angular velocity Y (°/s),Angular velocity Z (°/s),"
    "Magnetic field X (Bx),Magnetic field Y (By),Magnetic field Z (Bz),label\n";

std::string row9(int t, double base, const std::string& label) {
  std::string out = std::to_string(t);
  for (int c = 0; c < 9; ++c) out += "," + csv::format_double(base + c);
  return out + "," + label + "\n";
}

RawSensorStream stream(SensorKind kind, std::vector<TimestampMs> ts, double base = 0.0) {
  RawSensorStream s;
  s.kind = kind;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = base + static_cast<double>(i);
    s.samples.push_back({ts[i], {v, v + 0.1, v + 0.2}});
  }
  if (kind == SensorKind::Accelerometer) s.file_label = "walking";
  return s;
}

AdapterConfig secondary_adapter() {
  AdapterConfig a;
  a.timestamp_column = "time";
  a.label_column = "activity";
  const std::array<std::string, 9> src = {"ax", "ay", "az", "gx", "gy", "gz", "mx", "my", "mz"};
  for (std::size_t c = 0; c < 9; ++c) a.channels[std::string(kChannelNames[c])] = src[c];
  return a;
}

std::string secondary_csv(const std::vector<std::string>& labels) {
  std::string out = "time,ax,ay,az,gx,gy,gz,mx,my,mz,activity\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i * 20);
    for (int c = 0; c < 9; ++c) out += "," + csv::format_double(0.5 * static_cast<double>(i) + c);
    out += "," + labels[i] + "\n";
  }
  return out;
}

}  // namespace

TEST(ParsePrimary, FiveValidRows) {
  std::string csv = kHeader9;
  for (int i = 0; i < 5; ++i) csv += row9(i * 10, i, i % 2 ? "sitting" : "walking");
  const auto res = parse_primary_csv(csv);
  ASSERT_TRUE(res.is_dataset());
  EXPECT_EQ(res.dataset().size(), 5u);
  EXPECT_EQ(res.dropped_rows, 0u);
  EXPECT_EQ(res.dataset()[1].label, 2u);
  EXPECT_DOUBLE_EQ(res.dataset()[2].mag[2], 2.0 + 8.0);
}

TEST(ParsePrimary, BlankCellDropsRow) {
  std::string csv = kHeader9;
  csv += row9(0, 0, "walking");
  csv += row9(10, 1, "walking");
  csv += "20,1,2,3,4,5,6,7,,9,walking\n";
  csv += row9(30, 3, "lying");
  csv += row9(40, 4, "lying");
  const auto res = parse_primary_csv(csv);
  ASSERT_TRUE(res.is_dataset());
  EXPECT_EQ(res.dataset().size(), 4u);
  EXPECT_EQ(res.dropped_rows, 1u);
}

TEST(ParsePrimary, HeadersAreCaseAndUnitInsensitive) {
  std::string csv =
      "timestamp,acceleration x,ACCELERATION Y (m/s2),acceleration_z,angular velocity x,angular velocity y,"
      "angular velocity z,magnetic field x,magnetic field y,magnetic field z,Activity\n";
  csv += row9(0, 0, "working");
  const auto res = parse_primary_csv(csv);
  ASSERT_TRUE(res.is_dataset());
  EXPECT_EQ(res.dataset()[0].label, 1u);
}

TEST(ParsePrimary, GyroscopeFileBecomesStream) {
  const std::string csv =
      "Timestamp,Angular velocity X (°/s),Angular velocity Y (°/s),Angular velocity Z (°/s)\n"
      "0,1,2,3\n10,4,5,6\n";
  const auto res = parse_primary_csv(csv);
  ASSERT_FALSE(res.is_dataset());
  EXPECT_EQ(res.stream().kind, SensorKind::Gyroscope);
  ASSERT_EQ(res.stream().samples.size(), 2u);
  EXPECT_EQ(res.stream().samples[1].timestamp, 10);
  EXPECT_EQ(res.stream().samples[1].value, (Vec3{4, 5, 6}));
}

TEST(ParsePrimary, UnknownColumnIsSchemaError) {
  const std::string csv = "Timestamp,Acceleration X (g),Temperature,label\n0,1,2,walking\n";
  try {
    parse_primary_csv(csv);
    FAIL() << "expected schema error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
    EXPECT_NE(std::string(e.what()).find("Temperature"), std::string::npos);
  }
}

TEST(ParsePrimary, NonNumericCellReportsLine) {
  std::string csv = kHeader9;
  csv += row9(0, 0, "walking");
  csv += "10,1,2,abc,4,5,6,7,8,9,walking\n";
  try {
    parse_primary_csv(csv);
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParsePrimary, IsoTimestamps) {
  std::string csv = kHeader9;
  std::string r = row9(0, 0, "walking");
  csv += "2000-01-01T00:00:00Z" + r.substr(1);
  csv += "2000-01-01T00:00:00.250Z" + r.substr(1);
  const auto res = parse_primary_csv(csv);
  ASSERT_EQ(res.dataset().size(), 2u);
  EXPECT_EQ(res.dataset()[0].timestamp, 946684800000LL);
  EXPECT_EQ(res.dataset()[1].timestamp, 946684800250LL);
}

TEST(ParseTimestamp, IsoVariants) {
  EXPECT_EQ(parse_timestamp("1970-01-01T00:00:01.5Z"), 1500);
  EXPECT_EQ(parse_timestamp("1970-01-01T01:00:00+01:00"), 0);
  EXPECT_EQ(parse_timestamp("1970-01-02"), 86400000);
  EXPECT_EQ(parse_timestamp("1234.9"), 1234);
  EXPECT_FALSE(parse_timestamp("yesterday").has_value());
  EXPECT_FALSE(parse_timestamp("1970-13-01").has_value());
}

TEST(CanonicalCsv, RoundTripIsIdentity) {
  const auto ds = generate_synthetic(separable_synth_config(4, 40, 5.0, 1.3, 19));
  const std::string text = write_canonical_csv(ds);
  const auto back = parse_primary_csv(text);
  ASSERT_TRUE(back.is_dataset());
  EXPECT_EQ(back.dataset(), ds);
  EXPECT_EQ(write_canonical_csv(back.dataset()), text);
}

TEST(CanonicalCsv, ExtraColumnsAreIgnoredOnRead) {
  const auto ds = generate_synthetic(separable_synth_config(4, 5, 5.0, 1.0, 3));
  std::vector<std::pair<std::string, std::vector<double>>> extra = {
      {"Kalman Filtered X", std::vector<double>(ds.size(), 1.0)}};
  const auto text = write_canonical_csv(ds, extra);
  EXPECT_NE(text.find(",Kalman Filtered X\n"), std::string::npos);
  EXPECT_EQ(parse_primary_csv(text).dataset(), ds);
}

TEST(CanonicalCsv, HeaderOrder) {
  EXPECT_EQ(canonical_header_line(),
            "Timestamp,Acceleration X (g),Acceleration Y (g),Acceleration Z (g),Angular velocity X (°/s),"
            "Angular velocity Y (°/s),Angular velocity Z (°/s),Magnetic field X (Bx),Magnetic field Y (By),"
            "Magnetic field Z (Bz),label");
}

TEST(Synchronize, IdenticalTimestamps) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {0, 10, 20}),
                                          stream(SensorKind::Gyroscope, {0, 10, 20}, 100),
                                          stream(SensorKind::Magnetometer, {0, 10, 20}, 200)};
  const auto res = synchronize(s, 50);
  ASSERT_EQ(res.dataset.size(), 3u);
  EXPECT_EQ(res.dropped_rows, 0u);
  EXPECT_DOUBLE_EQ(res.dataset[2].gyro[0], 102.0);
  EXPECT_DOUBLE_EQ(res.dataset[2].mag[1], 202.1);
}

TEST(Synchronize, GyroOffsetWithinTolerance) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {0, 100, 200}),
                                          stream(SensorKind::Gyroscope, {10, 110, 210}, 100),
                                          stream(SensorKind::Magnetometer, {0, 100, 200}, 200)};
  const auto res = synchronize(s, 50);
  ASSERT_EQ(res.dataset.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(res.dataset[i].gyro[0], 100.0 + static_cast<double>(i));
}

TEST(Synchronize, FarMagnetometerIsEmptyJoin) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {0, 10, 20}),
                                          stream(SensorKind::Gyroscope, {0, 10, 20}),
                                          stream(SensorKind::Magnetometer, {1000, 1010, 1020})};
  EXPECT_EQ(error_kind_of([&] { synchronize(s, 50); }), ErrorKind::EmptyJoin);
}

TEST(Synchronize, DuplicateKindIsArgumentError) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {0}), stream(SensorKind::Gyroscope, {0}),
                                          stream(SensorKind::Gyroscope, {0})};
  EXPECT_EQ(error_kind_of([&] { synchronize(s, 50); }), ErrorKind::Argument);
}

TEST(Synchronize, EquidistantTieGoesEarlier) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {100}),
                                          stream(SensorKind::Gyroscope, {90, 110}),
                                          stream(SensorKind::Magnetometer, {100})};
  const auto res = synchronize(s, 50);
  ASSERT_EQ(res.dataset.size(), 1u);
  EXPECT_DOUBLE_EQ(res.dataset[0].gyro[0], 0.0);
}

TEST(Synchronize, EachPartnerUsedOnce) {
  const std::vector<RawSensorStream> s = {stream(SensorKind::Accelerometer, {0, 1, 2}),
                                          stream(SensorKind::Gyroscope, {1}),
                                          stream(SensorKind::Magnetometer, {0, 1, 2})};
  const auto res = synchronize(s, 50);
  EXPECT_EQ(res.dataset.size(), 1u);
  EXPECT_EQ(res.dropped_rows, 2u);
}

TEST(Synchronize, SizeAndToleranceProperty) {
  auto g = testsupport::rng_for(404);
  for (int trial = 0; trial < 300; ++trial) {
    const TimestampMs tol = static_cast<TimestampMs>(testsupport::uniform_int(g, 0, 40));
    std::array<RawSensorStream, 3> s;
    std::array<std::vector<TimestampMs>, 3> ts;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t n = testsupport::uniform_int(g, 1, 40);
      TimestampMs t = static_cast<TimestampMs>(testsupport::uniform_int(g, 0, 30));
      for (std::size_t i = 0; i < n; ++i) {
        ts[k].push_back(t);
        t += static_cast<TimestampMs>(testsupport::uniform_int(g, 0, 25));
      }
      s[k] = stream(static_cast<SensorKind>(k), ts[k], 1000.0 * static_cast<double>(k));
    }
    SyncResult res;
    try {
      res = synchronize(s, tol);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::EmptyJoin);
      continue;
    }
    const std::size_t min_len = std::min({ts[0].size(), ts[1].size(), ts[2].size()});
    ASSERT_LE(res.dataset.size(), min_len);
    ASSERT_EQ(res.dataset.size() + res.dropped_rows, ts[0].size());
    std::set<std::size_t> used_g, used_m;
    for (const auto& r : res.dataset.rows()) {
      const auto gi = static_cast<std::size_t>(std::lround(r.gyro[0] - 1000.0));
      const auto mi = static_cast<std::size_t>(std::lround(r.mag[0] - 2000.0));
      const auto ai = static_cast<std::size_t>(std::lround(r.accel[0]));
      ASSERT_TRUE(used_g.insert(gi).second);
      ASSERT_TRUE(used_m.insert(mi).second);
      const TimestampMs ta = ts[0][ai], tg = ts[1][gi], tm = ts[2][mi];
      ASSERT_EQ(r.timestamp, ta);
      ASSERT_LE(std::abs(ta - tg), tol);
      ASSERT_LE(std::abs(ta - tm), tol);
      ASSERT_LE(std::abs(tg - tm), 2 * tol);
    }
  }
}

TEST(ParseSecondary, HundredRowsFiveActivities) {
  const std::vector<std::string> acts = {"walking", "running", "standing", "walking upstairs", "walking downstairs"};
  std::vector<std::string> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(acts[static_cast<std::size_t>(i / 20)]);
  const auto res = parse_secondary_csv(secondary_csv(labels), secondary_adapter());
  EXPECT_EQ(res.dataset.size(), 100u);
  ASSERT_EQ(res.dataset.num_classes(), 5u);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(res.dataset.vocabulary().name(k), acts[k]);
}

TEST(ParseSecondary, SingleActivity) {
  const auto res = parse_secondary_csv(secondary_csv(std::vector<std::string>(12, "running")), secondary_adapter());
  EXPECT_EQ(res.dataset.num_classes(), 1u);
  EXPECT_EQ(res.dataset.size(), 12u);
}

TEST(ParseSecondary, MissingChannelMappingIsSchemaError) {
  auto adapter = secondary_adapter();
  adapter.channels.erase(std::string(kChannelNames[8]));
  EXPECT_EQ(error_kind_of([&] { parse_secondary_csv(secondary_csv({"running"}), adapter); }), ErrorKind::Schema);
}

TEST(ParseSecondary, MissingSourceColumnIsSchemaError) {
  auto adapter = secondary_adapter();
  adapter.channels[std::string(kChannelNames[0])] = "acc_x";
  EXPECT_EQ(error_kind_of([&] { parse_secondary_csv(secondary_csv({"running"}), adapter); }), ErrorKind::Schema);
}

TEST(ParseSecondary, DropsIncompleteRows) {
  std::string csv = secondary_csv({"running", "standing"});
  csv += "60,1,2,3,4,5,6,7,8,,running\n";
  const auto res = parse_secondary_csv(csv, secondary_adapter());
  EXPECT_EQ(res.dataset.size(), 2u);
  EXPECT_EQ(res.dropped_rows, 1u);
}

TEST(Synthetic, CountsPerClass) {
  const auto ds = generate_synthetic(separable_synth_config(4, 250, 10.0, 1.0, 7));
  ASSERT_EQ(ds.size(), 1000u);
  std::vector<std::size_t> counts(4, 0);
  for (auto l : ds.labels()) ++counts[l];
  for (auto c : counts) EXPECT_EQ(c, 250u);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(ds[i].timestamp, static_cast<TimestampMs>(i));
}

TEST(Synthetic, ZeroStddevGivesExactMeans) {
  const auto cfg = separable_synth_config(3, 20, 10.0, 0.0, 1);
  const auto ds = generate_synthetic(cfg);
  for (const auto& r : ds.rows())
    for (auto s : kAllSensors) EXPECT_EQ(r.sensor(s), cfg.gaussians[r.label][static_cast<std::size_t>(s)].mean);
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto cfg = tiered_synth_config(50, 21);
  EXPECT_EQ(write_canonical_csv(generate_synthetic(cfg)), write_canonical_csv(generate_synthetic(cfg)));
  auto other = cfg;
  other.seed = 22;
  EXPECT_NE(write_canonical_csv(generate_synthetic(cfg)), write_canonical_csv(generate_synthetic(other)));
}

TEST(Synthetic, InvalidConfigRejected) {
  auto cfg = separable_synth_config(2, 5, 10.0, 1.0, 1);
  cfg.samples_per_class = 0;
  EXPECT_EQ(error_kind_of([&] { generate_synthetic(cfg); }), ErrorKind::Config);
  cfg = separable_synth_config(2, 5, 10.0, 1.0, 1);
  cfg.gaussians[0][1].stddev = -1.0;
  EXPECT_EQ(error_kind_of([&] { generate_synthetic(cfg); }), ErrorKind::Config);
}

TEST(Synthetic, SeparableMeansKeepMinimumDistance) {
  for (std::size_t k : {2u, 3u, 4u, 5u, 8u}) {
    const auto cfg = separable_synth_config(k, 1, 10.0, 2.0, 1);
    for (std::size_t s = 0; s < 3; ++s) {
      double best = 1e300;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
          double d2 = 0;
          for (std::size_t a = 0; a < 3; ++a) {
            const double d = cfg.gaussians[i][s].mean[a] - cfg.gaussians[j][s].mean[a];
            d2 += d * d;
          }
          best = std::min(best, std::sqrt(d2));
        }
      EXPECT_NEAR(best, 20.0, 1e-9) << "k=" << k << " sensor " << s;
    }
  }
}

TEST(Synthetic, SampleMeansConverge) {
  const int trials = 100;
  const std::size_t n = 10000;
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    auto cfg = separable_synth_config(2, n, 4.0, 1.5, 1000 + static_cast<std::uint64_t>(t));
    const auto ds = generate_synthetic(cfg);
    bool ok = true;
    for (std::size_t k = 0; k < 2; ++k) {
      std::array<double, 9> sum{};
      for (std::size_t i = k * n; i < (k + 1) * n; ++i)
        for (std::size_t c = 0; c < 9; ++c) sum[c] += ds[i].channel(c);
      for (std::size_t c = 0; c < 9; ++c) {
        const auto& gauss = cfg.gaussians[k][c / 3];
        const double err = std::fabs(sum[c] / static_cast<double>(n) - gauss.mean[c % 3]);
        if (err >= 5.0 * gauss.stddev / std::sqrt(static_cast<double>(n))) ok = false;
      }
    }
    within += ok;
  }
  EXPECT_GE(within, 99);
}
