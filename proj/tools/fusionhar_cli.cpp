#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "fusionhar/pipeline.hpp"

namespace {

using namespace fusionhar;

struct Flags {
  std::vector<std::string> input;
  std::string dataset_kind, model, fusion, sensors, out, decision_base, subset, model_file, preset, config, adapter;
  double ratio = 0, q_scale = 0, r_scale = 0, eta = 0, separation = 0, stddev = 0;
  std::uint64_t seed = 0;
  std::size_t trees = 0, stages = 0, threads = 0, classes = 0, samples_per_class = 0, bins = 0;
  std::int64_t tolerance_ms = 0;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_flags(CLI::App* cmd, Flags& f) {
  auto add = [&](const std::string& name, auto& target, const std::string& help) {
    f.opts[name] = cmd->add_option(name, target, help);
  };
  add("--config", f.config, "JSON config file; flags given on the command line override it");
  f.opts["--input"] = cmd->add_option("--input", f.input, "input CSV (one synchronized file or three per-sensor files)")
                          ->expected(1, 3);
  add("--dataset-kind", f.dataset_kind, "primary | secondary | synthetic");
  add("--ratio", f.ratio, "training fraction (default 0.8)");
  add("--seed", f.seed, "seed for synthesis, splitting and training (default 7)");
  add("--model", f.model, "svm | gboost | rf (default rf)");
  add("--fusion", f.fusion, "none | feature | decision | kalman (default feature)");
  add("--sensors", f.sensors, "comma-separated subset of acc,gyro,mag (default all)");
  add("--out", f.out, "output directory (default out)");
  add("--q-scale", f.q_scale, "process noise Q = q*I (default 0.1)");
  add("--r-scale", f.r_scale, "measurement noise R = r*I (default 0.5)");
  add("--trees", f.trees, "random forest size (default 100)");
  add("--stages", f.stages, "boosting stages (default 100)");
  add("--eta", f.eta, "boosting learning rate (default 0.1)");
  add("--decision-base", f.decision_base, "model family behind decision fusion in compare (default rf)");
  add("--threads", f.threads, "worker threads for training (default 1)");
  add("--subset", f.subset, "rows scored by eval: train | test | all (default test)");
  add("--model-file", f.model_file, "model JSON for eval (default <out>/model.json)");
  add("--preset", f.preset, "synthetic preset: separable | tiered | noiseless (default separable)");
  add("--classes", f.classes, "synthetic class count (default 4)");
  add("--samples-per-class", f.samples_per_class, "synthetic rows per class (default 250)");
  add("--separation", f.separation, "synthetic class separation in stddevs (default 10)");
  add("--stddev", f.stddev, "synthetic noise stddev (default 1)");
  add("--adapter", f.adapter, "JSON column mapping for secondary data");
  add("--tolerance-ms", f.tolerance_ms, "synchronization tolerance (default 50)");
  add("--bins", f.bins, "histogram bins for explore (default 30)");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (f.given("--config")) apply_config_json(c, parse_json_file(f.config, ErrorKind::Config));
  if (f.given("--input")) c.inputs = f.input;
  if (f.given("--dataset-kind")) c.dataset_kind = parse_dataset_kind(f.dataset_kind);
  if (f.given("--ratio")) c.ratio = f.ratio;
  if (f.given("--seed")) c.seed = f.seed;
  if (f.given("--model")) c.model = parse_model_family(f.model);
  if (f.given("--fusion")) c.fusion = parse_fusion_mode(f.fusion);
  if (f.given("--sensors")) c.sensors = parse_sensor_list(f.sensors);
  if (f.given("--out")) c.out = f.out;
  if (f.given("--q-scale")) c.q_scale = f.q_scale;
  if (f.given("--r-scale")) c.r_scale = f.r_scale;
  if (f.given("--trees")) c.trees = f.trees;
  if (f.given("--stages")) c.stages = f.stages;
  if (f.given("--eta")) c.eta = f.eta;
  if (f.given("--decision-base")) c.decision_base = parse_model_family(f.decision_base);
  if (f.given("--threads")) c.threads = f.threads;
  if (f.given("--subset")) c.subset = parse_subset(f.subset);
  if (f.given("--model-file")) c.model_file = f.model_file;
  if (f.given("--preset")) c.preset = parse_preset(f.preset);
  if (f.given("--classes")) c.classes = f.classes;
  if (f.given("--samples-per-class")) c.samples_per_class = f.samples_per_class;
  if (f.given("--separation")) c.separation = f.separation;
  if (f.given("--stddev")) c.stddev = f.stddev;
  if (f.given("--adapter")) c.adapter = adapter_from_json(parse_json_file(f.adapter, ErrorKind::Config));
  if (f.given("--tolerance-ms")) c.tolerance_ms = f.tolerance_ms;
  if (f.given("--bins")) c.bins = f.bins;
  return c;
}

using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-sensor fusion and activity recognition toolkit"};
  app.require_subcommand(1);

  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"synth", "write a seeded synthetic dataset as canonical CSV", cmd_synth},
      {"explore", "export time series, histograms and the channel correlation matrix", cmd_explore},
      {"train", "train one model and save it as JSON", cmd_train},
      {"eval", "score a saved model and write a metrics report", cmd_eval},
      {"kalman", "append Kalman-filtered columns to a dataset", cmd_kalman},
      {"compare", "train every model on every sensor and fusion strategy", cmd_compare},
  };
  std::vector<std::pair<CLI::App*, std::unique_ptr<Flags>>> subs;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto flags = std::make_unique<Flags>();
    add_flags(sub, *flags);
    subs.emplace_back(sub, std::move(flags));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i].first->parsed()) continue;
    RunConfig cfg;
    try {
      cfg = resolve(*subs[i].second);
    } catch (const Error& e) {
      std::cerr << "fusionhar: " << e.what() << "\n";
      return exit_code_for(e.kind(), Phase::Config);
    }
    return std::get<2>(commands[i])(cfg, std::cout, std::cerr);
  }
  return kExitConfig;
}
