#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fusionhar/fusion.hpp"
#include "fusionhar/ingest.hpp"
#include "fusionhar/json_schema.hpp"
#include "fusionhar/metrics.hpp"
#include "fusionhar/models.hpp"
#include "fusionhar/schemas.hpp"
#include "fusionhar/svg.hpp"

namespace fusionhar {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitTraining = 2;
inline constexpr int kExitConfig = 3;

enum class DatasetKind { Primary, Secondary, Synthetic };
enum class FusionMode { None, Feature, Decision, Kalman };
enum class SynthPreset { Separable, Tiered, Noiseless };
enum class Subset { Train, Test, All };

inline std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Primary: return "primary";
    case DatasetKind::Secondary: return "secondary";
    case DatasetKind::Synthetic: return "synthetic";
  }
  return "?";
}

inline std::string_view to_string(FusionMode f) {
  switch (f) {
    case FusionMode::None: return "none";
    case FusionMode::Feature: return "feature";
    case FusionMode::Decision: return "decision";
    case FusionMode::Kalman: return "kalman";
  }
  return "?";
}

inline std::string_view to_string(SynthPreset p) {
  switch (p) {
    case SynthPreset::Separable: return "separable";
    case SynthPreset::Tiered: return "tiered";
    case SynthPreset::Noiseless: return "noiseless";
  }
  return "?";
}

inline std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::Train: return "train";
    case Subset::Test: return "test";
    case Subset::All: return "all";
  }
  return "?";
}

template <class E, std::size_t N>
E parse_choice(std::string_view text, const std::array<E, N>& options, std::string_view what) {
  const auto t = csv::lower(csv::trim(text));
  for (auto o : options)
    if (to_string(o) == t) return o;
  std::string allowed;
  for (auto o : options) allowed += (allowed.empty() ? "" : "|") + std::string(to_string(o));
  fail(ErrorKind::Config, "invalid " + std::string(what) + " '" + std::string(text) + "' (expected " + allowed + ")");
}

inline DatasetKind parse_dataset_kind(std::string_view s) {
  return parse_choice(s, std::array{DatasetKind::Primary, DatasetKind::Secondary, DatasetKind::Synthetic},
                      "dataset kind");
}
inline FusionMode parse_fusion_mode(std::string_view s) {
  return parse_choice(s, std::array{FusionMode::None, FusionMode::Feature, FusionMode::Decision, FusionMode::Kalman},
                      "fusion mode");
}
inline SynthPreset parse_preset(std::string_view s) {
  return parse_choice(s, std::array{SynthPreset::Separable, SynthPreset::Tiered, SynthPreset::Noiseless}, "preset");
}
inline Subset parse_subset(std::string_view s) {
  return parse_choice(s, std::array{Subset::Train, Subset::Test, Subset::All}, "subset");
}

inline ModelFamily parse_model_family(std::string_view s) {
  auto f = parse_family(csv::lower(csv::trim(s)));
  require(f.has_value(), ErrorKind::Config, "invalid model '" + std::string(s) + "' (expected svm|gboost|rf)");
  return *f;
}

// Comma-separated sensor names, e.g. "acc,mag".
inline std::vector<SensorKind> parse_sensor_list(std::string_view s) {
  std::vector<SensorKind> out;
  for (const auto& part : csv::split_line(s)) {
    const auto name = csv::trim(part);
    if (name.empty()) continue;
    auto k = parse_sensor(csv::lower(name));
    require(k.has_value(), ErrorKind::Config, "unknown sensor '" + std::string(name) + "'");
    if (std::find(out.begin(), out.end(), *k) == out.end()) out.push_back(*k);
  }
  require(!out.empty(), ErrorKind::Config, "empty sensor list");
  std::sort(out.begin(), out.end());
  return out;
}

struct RunConfig {
  std::vector<std::string> inputs;
  DatasetKind dataset_kind = DatasetKind::Synthetic;
  double ratio = 0.8;
  std::uint64_t seed = 7;
  ModelFamily model = ModelFamily::RandomForest;
  FusionMode fusion = FusionMode::Feature;
  std::vector<SensorKind> sensors{kAllSensors.begin(), kAllSensors.end()};
  std::string out = "out";
  double q_scale = kDefaultProcessNoise;
  double r_scale = kDefaultMeasurementNoise;
  std::size_t trees = 100;
  std::size_t stages = 100;
  double eta = 0.1;
  ModelFamily decision_base = ModelFamily::RandomForest;
  std::size_t threads = 1;
  Subset subset = Subset::Test;
  std::string model_file;
  // Synthetic data when no input file is given.
  SynthPreset preset = SynthPreset::Separable;
  std::size_t classes = 4;
  std::size_t samples_per_class = 250;
  double separation = 10.0;
  double stddev = 1.0;
  // Secondary datasets.
  std::optional<AdapterConfig> adapter;
  TimestampMs tolerance_ms = kDefaultSyncToleranceMs;
  std::size_t bins = 30;

  void validate() const {
    require(ratio > 0.0 && ratio < 1.0, ErrorKind::Config, "ratio must lie in (0, 1)");
    require(trees >= 1, ErrorKind::Config, "trees must be >= 1");
    require(stages >= 1, ErrorKind::Config, "stages must be >= 1");
    require(std::isfinite(eta) && eta >= 0.0, ErrorKind::Config, "eta must be >= 0");
    require(std::isfinite(q_scale) && q_scale >= 0.0, ErrorKind::Config, "q-scale must be >= 0");
    require(std::isfinite(r_scale) && r_scale >= 0.0, ErrorKind::Config, "r-scale must be >= 0");
    require(threads >= 1, ErrorKind::Config, "threads must be >= 1");
    require(classes >= 1, ErrorKind::Config, "classes must be >= 1");
    require(samples_per_class >= 1, ErrorKind::Config, "samples-per-class must be >= 1");
    require(std::isfinite(stddev) && stddev >= 0.0, ErrorKind::Config, "stddev must be >= 0");
    require(std::isfinite(separation) && separation >= 0.0, ErrorKind::Config, "separation must be >= 0");
    require(tolerance_ms >= 0, ErrorKind::Config, "tolerance must be >= 0");
    require(bins >= 1, ErrorKind::Config, "bins must be >= 1");
    require(!sensors.empty(), ErrorKind::Config, "empty sensor list");
    if (fusion == FusionMode::None)
      require(sensors.size() == 1, ErrorKind::Config, "fusion 'none' trains on exactly one sensor (use --sensors)");
  }

  Hyperparams hyperparams() const {
    Hyperparams hp;
    hp.forest.n_trees = trees;
    hp.boost.n_stages = stages;
    hp.boost.learning_rate = eta;
    hp.set_seed(seed);
    hp.set_threads(threads);
    return hp;
  }

  KalmanConfig kalman() const { return KalmanConfig::stacked(q_scale, r_scale); }
};

inline AdapterConfig adapter_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::Config, "adapter must be a JSON object");
  AdapterConfig a;
  for (const auto& [key, value] : j.items()) {
    if (key == "timestamp_column") a.timestamp_column = value.get<std::string>();
    else if (key == "label_column") a.label_column = value.get<std::string>();
    else if (key == "channels") a.channels = value.get<std::map<std::string, std::string>>();
    else fail(ErrorKind::Config, "unknown adapter key '" + key + "'");
  }
  return a;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reads and parses a JSON file; every failure is reported as `kind`.
inline nlohmann::json parse_json_file(const std::filesystem::path& path, ErrorKind kind) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(kind, e.what());
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(kind, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

// Applies a JSON config document; keys mirror the long flag names with
// '-' replaced by '_'.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::Config, "config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      auto text = [&] { return v.get<std::string>(); };
      if (key == "input") {
        if (v.is_array()) cfg.inputs = v.get<std::vector<std::string>>();
        else cfg.inputs = {text()};
      } else if (key == "dataset_kind") cfg.dataset_kind = parse_dataset_kind(text());
      else if (key == "ratio") cfg.ratio = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "model") cfg.model = parse_model_family(text());
      else if (key == "fusion") cfg.fusion = parse_fusion_mode(text());
      else if (key == "sensors") {
        if (v.is_array()) {
          std::string joined;
          for (const auto& s : v) joined += s.get<std::string>() + ",";
          cfg.sensors = parse_sensor_list(joined);
        } else {
          cfg.sensors = parse_sensor_list(text());
        }
      } else if (key == "out") cfg.out = text();
      else if (key == "q_scale") cfg.q_scale = v.get<double>();
      else if (key == "r_scale") cfg.r_scale = v.get<double>();
      else if (key == "trees") cfg.trees = v.get<std::size_t>();
      else if (key == "stages") cfg.stages = v.get<std::size_t>();
      else if (key == "eta") cfg.eta = v.get<double>();
      else if (key == "decision_base") cfg.decision_base = parse_model_family(text());
      else if (key == "threads") cfg.threads = v.get<std::size_t>();
      else if (key == "subset") cfg.subset = parse_subset(text());
      else if (key == "model_file") cfg.model_file = text();
      else if (key == "preset") cfg.preset = parse_preset(text());
      else if (key == "classes") cfg.classes = v.get<std::size_t>();
      else if (key == "samples_per_class") cfg.samples_per_class = v.get<std::size_t>();
      else if (key == "separation") cfg.separation = v.get<double>();
      else if (key == "stddev") cfg.stddev = v.get<double>();
      else if (key == "adapter")
        cfg.adapter = adapter_from_json(v.is_string() ? parse_json_file(text(), ErrorKind::Config) : v);
      else if (key == "tolerance_ms") cfg.tolerance_ms = v.get<TimestampMs>();
      else if (key == "bins") cfg.bins = v.get<std::size_t>();
      else fail(ErrorKind::Config, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("config value has the wrong type: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Data loading
// ---------------------------------------------------------------------------

struct LoadedData {
  Dataset dataset;
  std::size_t dropped_rows = 0;
  std::string source;
};

inline SynthConfig synth_config(const RunConfig& cfg) {
  switch (cfg.preset) {
    case SynthPreset::Separable:
      return separable_synth_config(cfg.classes, cfg.samples_per_class, cfg.separation, cfg.stddev, cfg.seed);
    case SynthPreset::Tiered: return tiered_synth_config(cfg.samples_per_class, cfg.seed);
    case SynthPreset::Noiseless:
      return separable_synth_config(cfg.classes, cfg.samples_per_class, cfg.separation, 0.0, cfg.seed);
  }
  fail(ErrorKind::Config, "unknown preset");
}

inline LoadedData load_dataset(const RunConfig& cfg) {
  LoadedData out;
  if (cfg.inputs.empty()) {
    require(cfg.dataset_kind == DatasetKind::Synthetic, ErrorKind::Config,
            "--input is required for " + std::string(to_string(cfg.dataset_kind)) + " data");
    out.dataset = generate_synthetic(synth_config(cfg));
    out.source = "synthetic:" + std::string(to_string(cfg.preset));
    return out;
  }
  for (const auto& p : cfg.inputs) out.source += (out.source.empty() ? "" : ";") + p;

  if (cfg.dataset_kind == DatasetKind::Secondary) {
    require(cfg.adapter.has_value(), ErrorKind::Config, "secondary data needs an adapter (--adapter or config 'adapter')");
    require(cfg.inputs.size() == 1, ErrorKind::Config, "secondary data is read from exactly one file");
    auto r = parse_secondary_csv(read_file(cfg.inputs.front()), *cfg.adapter);
    out.dataset = std::move(r.dataset);
    out.dropped_rows = r.dropped_rows;
    return out;
  }

  if (cfg.inputs.size() == 1) {
    auto r = parse_primary_csv(read_file(cfg.inputs.front()));
    if (!r.is_dataset())
      fail(ErrorKind::Schema, "'" + cfg.inputs.front() + "' holds a single " +
                                  std::string(sensor_name(r.stream().kind)) +
                                  " stream; pass one file per sensor to synchronize");
    out.dataset = r.dataset();
    out.dropped_rows = r.dropped_rows;
    return out;
  }
  require(cfg.inputs.size() == 3, ErrorKind::Config, "pass one synchronized file or three per-sensor files");
  std::vector<RawSensorStream> streams;
  for (const auto& p : cfg.inputs) {
    auto r = parse_primary_csv(read_file(p));
    require(!r.is_dataset(), ErrorKind::Schema, "'" + p + "' is already synchronized; pass it alone");
    out.dropped_rows += r.dropped_rows;
    streams.push_back(r.stream());
  }
  auto sync = synchronize(streams, cfg.tolerance_ms);
  out.dataset = std::move(sync.dataset);
  out.dropped_rows += sync.dropped_rows;
  return out;
}

struct SplitData {
  TrainTestSplit split;
  std::vector<std::size_t> train;  // sorted
  std::vector<std::size_t> test;   // sorted
};

inline SplitData split_dataset(const Dataset& ds, double ratio, std::uint64_t seed) {
  SplitData s;
  s.split = train_test_split(ds, ratio, seed);
  s.train = s.split.train_indices;
  s.test = s.split.test_indices;
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline std::vector<ClassIndex> gather(std::span<const ClassIndex> y, std::span<const std::size_t> idx) {
  std::vector<ClassIndex> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(y[i]);
  return out;
}

inline std::vector<std::size_t> subset_indices(const SplitData& s, Subset which, std::size_t n) {
  switch (which) {
    case Subset::Train: return s.train;
    case Subset::Test: return s.test;
    case Subset::All: {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      return all;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Staged output
// ---------------------------------------------------------------------------

// Collects output files in memory; commit() writes each to a temporary
// sibling and renames them into place only once every write succeeded.
class OutputStage {
 public:
  explicit OutputStage(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& relative, std::string content) { files_.emplace_back(relative, std::move(content)); }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

  std::vector<std::filesystem::path> commit() const {
    namespace fs = std::filesystem;
    std::vector<std::pair<fs::path, fs::path>> moves;
    auto cleanup = [&] {
      std::error_code ec;
      for (const auto& [tmp, dst] : moves) fs::remove(tmp, ec);
    };
    try {
      for (const auto& [rel, content] : files_) {
        const fs::path dst = dir_ / rel;
        fs::create_directories(dst.parent_path());
        const fs::path tmp = dst.parent_path() / ("." + dst.filename().string() + ".tmp");
        moves.emplace_back(tmp, dst);
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.close();
        require(!f.fail(), ErrorKind::Io, "cannot write '" + tmp.string() + "'");
      }
    } catch (const std::filesystem::filesystem_error& e) {
      cleanup();
      fail(ErrorKind::Io, e.what());
    } catch (...) {
      cleanup();
      throw;
    }
    std::vector<fs::path> written;
    for (const auto& [tmp, dst] : moves) {
      fs::rename(tmp, dst);
      written.push_back(dst);
    }
    return written;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void require_schema(const nlohmann::json& doc, std::string_view schema_text, std::string_view what) {
  const SchemaValidator validator(nlohmann::json::parse(schema_text));
  const auto errors = validator.validate(doc);
  if (!errors.empty()) fail(ErrorKind::Numerical, std::string(what) + " violates its schema: " + errors.front());
}

// ---------------------------------------------------------------------------
// Model documents
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

struct ModelDocument {
  FusionMode fusion = FusionMode::Feature;
  std::vector<SensorKind> sensors;
  ModelFamily family = ModelFamily::RandomForest;
  std::vector<std::string> labels;
  double ratio = 0.8;
  std::uint64_t seed = 7;
  std::optional<std::pair<double, double>> kalman_qr;
  TrainedModel model;                           // all modes but decision
  std::optional<DecisionFusionModel> decision;  // decision mode

  std::size_t num_classes() const { return labels.size(); }
};

inline nlohmann::json sensor_names_json(std::span<const SensorKind> sensors) {
  nlohmann::json a = nlohmann::json::array();
  for (auto s : sensors) a.push_back(sensor_name(s));
  return a;
}

inline nlohmann::json to_json(const ModelDocument& m) {
  nlohmann::json j{{"format", "fusionhar-model"},
                   {"version", kModelFormatVersion},
                   {"fusion", to_string(m.fusion)},
                   {"sensors", sensor_names_json(m.sensors)},
                   {"family", family_id(m.family)},
                   {"labels", m.labels},
                   {"split", {{"ratio", m.ratio}, {"seed", m.seed}}}};
  if (m.kalman_qr) j["kalman"] = {{"q", m.kalman_qr->first}, {"r", m.kalman_qr->second}};
  if (m.decision) {
    nlohmann::json per = nlohmann::json::object();
    for (auto s : kAllSensors) per[std::string(sensor_name(s))] = m.decision->per_sensor[static_cast<std::size_t>(s)];
    j["sensor_models"] = per;
  } else {
    j["model"] = m.model;
  }
  return j;
}

inline ModelDocument model_from_json(const nlohmann::json& j) {
  try {
    require(j.value("format", std::string{}) == "fusionhar-model", ErrorKind::Parse, "not a model document");
    const int version = j.at("version").get<int>();
    require(version == kModelFormatVersion, ErrorKind::Parse,
            "unsupported model document version " + std::to_string(version));
    ModelDocument m;
    m.fusion = parse_fusion_mode(j.at("fusion").get<std::string>());
    std::string joined;
    for (const auto& s : j.at("sensors")) joined += s.get<std::string>() + ",";
    m.sensors = parse_sensor_list(joined);
    m.family = parse_model_family(j.at("family").get<std::string>());
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.ratio = j.at("split").at("ratio").get<double>();
    m.seed = j.at("split").at("seed").get<std::uint64_t>();
    if (j.contains("kalman")) m.kalman_qr = std::pair{j["kalman"].at("q").get<double>(), j["kalman"].at("r").get<double>()};
    if (m.fusion == FusionMode::Decision) {
      DecisionFusionModel d;
      d.base = m.family;
      for (auto s : kAllSensors)
        d.per_sensor[static_cast<std::size_t>(s)] = j.at("sensor_models").at(std::string(sensor_name(s))).get<TrainedModel>();
      m.decision = std::move(d);
    } else {
      m.model = j.at("model").get<TrainedModel>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) fail(ErrorKind::Parse, std::string("malformed model document: ") + e.what());
    throw;
  }
}

// ---------------------------------------------------------------------------
// Evaluation helpers shared by train/eval/compare
// ---------------------------------------------------------------------------

struct EvalResult {
  std::vector<ClassIndex> y_true;
  std::vector<ClassIndex> y_pred;
  std::vector<std::vector<double>> proba;
  MetricsReport report;
};

inline EvalResult evaluate_predictions(std::vector<ClassIndex> y_true, const std::vector<Prediction>& preds,
                                       std::size_t k) {
  EvalResult r;
  r.y_true = std::move(y_true);
  for (const auto& p : preds) {
    r.y_pred.push_back(p.label);
    r.proba.push_back(p.proba);
  }
  r.report = metrics(confusion_matrix(r.y_true, r.y_pred, k), rmse_proba(r.proba, r.y_true));
  return r;
}

// Features a non-decision model consumes for every row of `ds`.
inline FeatureMatrix model_features(const Dataset& ds, FusionMode fusion, std::span<const SensorKind> sensors,
                                    const KalmanConfig& kalman) {
  if (fusion == FusionMode::Kalman) return kalman_filter_dataset(ds, kalman).features();
  return feature_fuse(ds, sensors).materialize();
}

inline std::vector<Prediction> predict_document(const ModelDocument& m, const Dataset& ds,
                                                std::span<const std::size_t> rows) {
  std::vector<Prediction> out;
  out.reserve(rows.size());
  if (m.decision) {
    for (auto i : rows) out.push_back(m.decision->predict(ds[i]));
    return out;
  }
  const KalmanConfig kc = m.kalman_qr ? KalmanConfig::stacked(m.kalman_qr->first, m.kalman_qr->second) : KalmanConfig{};
  const auto X = model_features(ds, m.fusion, m.sensors, kc);
  for (auto i : rows) out.push_back(m.model.predict(X.row(i)));
  return out;
}

inline ModelDocument train_document(const RunConfig& cfg, const Dataset& ds, const SplitData& split) {
  ModelDocument m;
  m.fusion = cfg.fusion;
  m.sensors = cfg.fusion == FusionMode::Decision || cfg.fusion == FusionMode::Kalman
                  ? std::vector<SensorKind>(kAllSensors.begin(), kAllSensors.end())
                  : cfg.sensors;
  m.family = cfg.model;
  m.labels = ds.vocabulary().names();
  m.ratio = cfg.ratio;
  m.seed = cfg.seed;
  const auto hp = cfg.hyperparams();
  const auto y = ds.labels();
  if (cfg.fusion == FusionMode::Decision) {
    m.decision = fit_decision_fusion(cfg.model, ds.subset(split.train), hp);
    return m;
  }
  if (cfg.fusion == FusionMode::Kalman) m.kalman_qr = std::pair{cfg.q_scale, cfg.r_scale};
  const auto X = model_features(ds, cfg.fusion, m.sensors, cfg.kalman());
  m.model = fit_model(cfg.model, X.select_rows(split.train), gather(y, split.train), ds.num_classes(), hp);
  return m;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

enum class Phase { Config, Load, Train, Write };

inline int exit_code_for(ErrorKind kind, Phase phase) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::EmptyJoin:
    case ErrorKind::Io: return kExitInput;
    case ErrorKind::Argument:
    case ErrorKind::Degenerate:
    case ErrorKind::Numerical: break;
  }
  if (phase == Phase::Config) return kExitConfig;
  if (phase == Phase::Load) return kExitInput;
  return kExitTraining;
}

// Runs `body(phase)`, translating failures into the exit-code scheme.
template <class Body>
int run_command(std::ostream& err, Body&& body) {
  Phase phase = Phase::Config;
  try {
    body(phase);
    return kExitOk;
  } catch (const Error& e) {
    err << "fusionhar: " << e.what() << "\n";
    return exit_code_for(e.kind(), phase);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fusionhar: i/o error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "fusionhar: " << e.what() << "\n";
    return phase == Phase::Load ? kExitInput : kExitTraining;
  }
}

inline std::string channel_slug(std::size_t c) {
  static constexpr std::array<const char*, kNumChannels> slugs = {
      "acceleration_x", "acceleration_y", "acceleration_z", "angular_velocity_x", "angular_velocity_y",
      "angular_velocity_z", "magnetic_field_x", "magnetic_field_y", "magnetic_field_z"};
  return slugs[c];
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    const auto sc = synth_config(cfg);
    phase = Phase::Load;
    const auto ds = generate_synthetic(sc);
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    stage.add("synthetic.csv", write_canonical_csv(ds));
    stage.commit();
    log << "wrote " << ds.size() << " rows (" << ds.num_classes() << " classes) to "
        << (std::filesystem::path(cfg.out) / "synthetic.csv").string() << "\n";
  });
}

inline int cmd_explore(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    phase = Phase::Load;
    const auto data = load_dataset(cfg);
    const auto& ds = data.dataset;
    require(ds.size() >= 2, ErrorKind::Parse, "explore needs at least 2 rows");
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      std::string ts = "timestamp," + csv::escape(kChannelNames[c]) + ",label\n";
      for (const auto& r : ds.rows())
        ts += std::to_string(r.timestamp) + "," + csv::format_double(r.channel(c)) + "," +
              csv::escape(ds.vocabulary().name(r.label)) + "\n";
      stage.add("timeseries_" + channel_slug(c) + ".csv", std::move(ts));
      const auto values = ds.channel_values(c);
      stage.add("histogram_" + channel_slug(c) + ".csv", histogram_csv(histogram(values, cfg.bins)));
    }
    const auto corr = correlation_matrix(ds);
    stage.add("correlation.csv", correlation_csv(corr));
    std::vector<std::string> labels(kChannelNames.begin(), kChannelNames.end());
    std::vector<std::vector<double>> values;
    for (const auto& row : corr) values.emplace_back(row.begin(), row.end());
    stage.add("correlation.svg", svg::heat_map("Channel correlation", labels, values));
    stage.commit();
    log << "explored " << ds.size() << " rows";
    if (data.dropped_rows) log << " (" << data.dropped_rows << " dropped)";
    log << "; wrote " << stage.files().size() << " files to " << cfg.out << "\n";
  });
}

inline int cmd_kalman(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    const auto kc = cfg.kalman();
    kc.validate();
    phase = Phase::Load;
    const auto data = load_dataset(cfg);
    phase = Phase::Train;
    const auto filtered = kalman_filter_dataset(data.dataset, kc);
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    const auto extra = filtered.extra_columns();
    stage.add("kalman_filtered.csv", write_canonical_csv(data.dataset, extra));
    stage.commit();
    log << "filtered " << data.dataset.size() << " rows with Q=" << cfg.q_scale << "I, R=" << cfg.r_scale << "I\n";
  });
}

inline int cmd_train(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    if (cfg.fusion == FusionMode::Kalman) cfg.kalman().validate();
    phase = Phase::Load;
    const auto data = load_dataset(cfg);
    const auto split = split_dataset(data.dataset, cfg.ratio, cfg.seed);
    phase = Phase::Train;
    const auto doc = train_document(cfg, data.dataset, split);
    const auto preds = predict_document(doc, data.dataset, split.train);
    const auto fit = evaluate_predictions(gather(data.dataset.labels(), split.train), preds, doc.num_classes());
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    stage.add("model.json", dump_json(to_json(doc)));
    stage.commit();
    log << "trained " << family_title(doc.family) << " (" << to_string(doc.fusion) << ") on " << split.train.size()
        << " rows; training accuracy " << fit.report.accuracy << "\n";
  });
}

inline nlohmann::json metrics_document(const ModelDocument& m, Subset subset, const EvalResult& r,
                                       const LabelVocabulary& vocab) {
  return nlohmann::json{{"format", "fusionhar-metrics-report"},
                        {"version", 1},
                        {"model",
                         {{"family", family_id(m.family)},
                          {"fusion", to_string(m.fusion)},
                          {"sensors", sensor_names_json(m.sensors)}}},
                        {"subset", to_string(subset)},
                        {"metrics", to_json_report(r.report, &vocab)}};
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    const std::filesystem::path model_path =
        cfg.model_file.empty() ? std::filesystem::path(cfg.out) / "model.json" : std::filesystem::path(cfg.model_file);
    phase = Phase::Load;
    const auto doc = model_from_json(parse_json_file(model_path, ErrorKind::Parse));
    const auto data = load_dataset(cfg);
    require(data.dataset.vocabulary().names() == doc.labels, ErrorKind::Schema,
            "dataset labels do not match the model's label vocabulary");
    const auto split = split_dataset(data.dataset, doc.ratio, doc.seed);
    const auto rows = subset_indices(split, cfg.subset, data.dataset.size());
    require(!rows.empty(), ErrorKind::Argument, "selected subset is empty");
    phase = Phase::Train;
    const auto preds = predict_document(doc, data.dataset, rows);
    const auto result = evaluate_predictions(gather(data.dataset.labels(), rows), preds, doc.num_classes());
    const auto report = metrics_document(doc, cfg.subset, result, data.dataset.vocabulary());
    require_schema(report, schemas::kMetricsReport, "metrics report");
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    stage.add("metrics.json", dump_json(report));
    stage.add("confusion.csv", confusion_csv(result.report.confusion, data.dataset.vocabulary()));
    stage.commit();
    log << to_string(cfg.subset) << " accuracy " << result.report.accuracy << " over " << rows.size() << " rows\n";
  });
}

// ---------------------------------------------------------------------------
// Comparison grid
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kGridColumns = {"accelerometer", "gyroscope", "magnetometer",
                                                                 "feature_fusion"};

struct CompareCell {
  std::string confusion_file;
  MetricsReport report;
};

struct ComparisonResult {
  std::array<std::array<CompareCell, 4>, 3> grid;  // [family][column]
  CompareCell decision_fusion;
  CompareCell kalman_fusion;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

inline ComparisonResult run_comparison(const RunConfig& cfg, const Dataset& ds) {
  ComparisonResult out;
  const auto split = split_dataset(ds, cfg.ratio, cfg.seed);
  out.train_rows = split.train.size();
  out.test_rows = split.test.size();
  const auto y = ds.labels();
  const auto y_train = gather(y, split.train);
  const auto y_test = gather(y, split.test);
  const auto hp = cfg.hyperparams();
  const std::size_t k = ds.num_classes();

  auto score = [&](const TrainedModel& m, const FeatureMatrix& X_test) {
    return evaluate_predictions(y_test, predict_all(m, X_test), k).report;
  };

  for (std::size_t col = 0; col < 4; ++col) {
    std::vector<SensorKind> sensors;
    if (col < 3) sensors = {static_cast<SensorKind>(col)};
    else sensors.assign(kAllSensors.begin(), kAllSensors.end());
    const auto X = feature_fuse(ds, sensors).materialize();
    const auto X_train = X.select_rows(split.train), X_test = X.select_rows(split.test);
    for (std::size_t f = 0; f < 3; ++f) {
      const auto family = kAllFamilies[f];
      auto& cell = out.grid[f][col];
      cell.report = score(fit_model(family, X_train, y_train, k, hp), X_test);
      cell.confusion_file = "confusion/" + std::string(family_id(family)) + "_" + std::string(kGridColumns[col]) + ".csv";
    }
  }

  const auto decision = fit_decision_fusion(cfg.decision_base, ds.subset(split.train), hp);
  std::vector<Prediction> votes;
  for (auto i : split.test) votes.push_back(decision.predict(ds[i]));
  out.decision_fusion.report = evaluate_predictions(y_test, votes, k).report;
  out.decision_fusion.confusion_file = "confusion/decision_fusion.csv";

  const auto filtered = kalman_filter_dataset(ds, cfg.kalman()).features();
  const auto kalman_model =
      fit_model(ModelFamily::RandomForest, filtered.select_rows(split.train), y_train, k, hp);
  out.kalman_fusion.report = score(kalman_model, filtered.select_rows(split.test));
  out.kalman_fusion.confusion_file = "confusion/kalman_fusion.csv";
  return out;
}

inline nlohmann::json cell_json(const CompareCell& c, const LabelVocabulary& vocab) {
  nlohmann::json breakdown = nlohmann::json::array();
  for (const auto& b : c.report.breakdowns)
    breakdown.push_back({{"class", b.cls}, {"name", vocab.name(b.cls)}, {"tp", b.tp}, {"fp", b.fp}, {"fn", b.fn}, {"tn", b.tn}});
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& b : c.report.breakdowns) {
    tp += b.tp;
    fp += b.fp;
    fn += b.fn;
    tn += b.tn;
  }
  return nlohmann::json{{"accuracy", c.report.accuracy},
                        {"rmse", c.report.rmse.value_or(0.0)},
                        {"precision_weighted", c.report.precision_weighted},
                        {"recall_weighted", c.report.recall_weighted},
                        {"f1_weighted", c.report.f1_weighted},
                        {"confusion_csv", c.confusion_file},
                        {"breakdown", breakdown},
                        {"totals", {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"tn", tn}}}};
}

inline nlohmann::json comparison_json(const RunConfig& cfg, const LoadedData& data, const ComparisonResult& r) {
  const auto& vocab = data.dataset.vocabulary();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t f = 0; f < 3; ++f) {
    nlohmann::json cells = nlohmann::json::object();
    for (std::size_t c = 0; c < 4; ++c) cells[std::string(kGridColumns[c])] = cell_json(r.grid[f][c], vocab);
    rows.push_back({{"model", family_id(kAllFamilies[f])}, {"title", family_title(kAllFamilies[f])}, {"cells", cells}});
  }
  auto decision = cell_json(r.decision_fusion, vocab);
  decision["base"] = family_id(cfg.decision_base);
  auto kalman = cell_json(r.kalman_fusion, vocab);
  kalman["model"] = family_id(ModelFamily::RandomForest);
  return nlohmann::json{
      {"format", "fusionhar-compare-report"},
      {"version", 1},
      {"dataset",
       {{"kind", to_string(cfg.dataset_kind)},
        {"source", data.source},
        {"rows", data.dataset.size()},
        {"dropped_rows", data.dropped_rows},
        {"classes", vocab.names()},
        {"train_rows", r.train_rows},
        {"test_rows", r.test_rows}}},
      {"protocol",
       {{"ratio", cfg.ratio},
        {"seed", cfg.seed},
        {"n_trees", cfg.trees},
        {"n_stages", cfg.stages},
        {"learning_rate", cfg.eta},
        {"kalman_q", cfg.q_scale},
        {"kalman_r", cfg.r_scale}}},
      {"columns", kGridColumns},
      {"rows", rows},
      {"decision_fusion", decision},
      {"kalman_fusion", kalman}};
}

inline std::string comparison_chart(const ComparisonResult& r, ModelFamily decision_base) {
  std::vector<std::string> series;
  for (auto f : kAllFamilies) series.emplace_back(family_title(f));
  std::vector<svg::BarGroup> groups;
  const std::array<std::string, 4> titles = {"Accelerometer", "Gyroscope", "Magnetometer", "Feature fusion"};
  for (std::size_t c = 0; c < 4; ++c) {
    svg::BarGroup g{titles[c], {}};
    for (std::size_t f = 0; f < 3; ++f) g.values.push_back(r.grid[f][c].report.accuracy);
    groups.push_back(std::move(g));
  }
  const double none = std::numeric_limits<double>::quiet_NaN();
  svg::BarGroup decision{"Decision fusion", {none, none, none}};
  svg::BarGroup kalman{"Kalman fusion", {none, none, none}};
  const auto slot = [](ModelFamily f) { return static_cast<std::size_t>(f); };
  decision.values[slot(decision_base)] = r.decision_fusion.report.accuracy;
  kalman.values[slot(ModelFamily::RandomForest)] = r.kalman_fusion.report.accuracy;
  groups.push_back(std::move(decision));
  groups.push_back(std::move(kalman));
  return svg::grouped_bar_chart("Test accuracy by sensor and fusion strategy", series, groups);
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return run_command(err, [&](Phase& phase) {
    cfg.validate();
    cfg.kalman().validate();
    phase = Phase::Load;
    const auto data = load_dataset(cfg);
    phase = Phase::Train;
    const auto result = run_comparison(cfg, data.dataset);
    const auto report = comparison_json(cfg, data, result);
    require_schema(report, schemas::kCompareReport, "comparison report");
    phase = Phase::Write;
    OutputStage stage(cfg.out);
    stage.add("compare_report.json", dump_json(report));
    const auto& vocab = data.dataset.vocabulary();
    for (const auto& row : result.grid)
      for (const auto& cell : row) stage.add(cell.confusion_file, confusion_csv(cell.report.confusion, vocab));
    stage.add(result.decision_fusion.confusion_file, confusion_csv(result.decision_fusion.report.confusion, vocab));
    stage.add(result.kalman_fusion.confusion_file, confusion_csv(result.kalman_fusion.report.confusion, vocab));
    stage.add("accuracy_comparison.svg", comparison_chart(result, cfg.decision_base));
    stage.commit();

    log << "model            accel    gyro     mag      feature\n";
    for (std::size_t f = 0; f < 3; ++f) {
      std::string line(family_title(kAllFamilies[f]));
      line.resize(16, ' ');
      for (const auto& cell : result.grid[f]) line += " " + svg::num(cell.report.accuracy, 4) + "  ";
      log << line << "\n";
    }
    log << "decision fusion (" << family_id(cfg.decision_base) << "): " << svg::num(result.decision_fusion.report.accuracy, 4)
        << "\nkalman fusion (rf): " << svg::num(result.kalman_fusion.report.accuracy, 4) << "\n";
  });
}

}  // namespace fusionhar
