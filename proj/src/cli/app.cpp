#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fingerloc/augmentation.hpp"
#include "fingerloc/cli.hpp"
#include "fingerloc/dataset.hpp"
#include "fingerloc/error.hpp"
#include "fingerloc/pipeline.hpp"
#include "fingerloc/rationalization.hpp"
#include "fingerloc/report.hpp"
#include "fingerloc/rng.hpp"
#include "fingerloc/serialize.hpp"
#include "fingerloc/synth.hpp"
#include "fingerloc/tuning.hpp"

namespace fingerloc::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kLabelledFile = "iBeacon_RSSI_Labeled.csv";
constexpr const char* kUnlabelledFile = "iBeacon_RSSI_Unlabeled.csv";
constexpr const char* kLayoutFile = "layout.json";

struct Inputs {
  std::string labelled;
  std::string unlabelled;
  std::string layout;
};

struct Invocation {
  std::string command;
  RunConfig config;
  Inputs inputs;
  fs::path out_dir;
  std::vector<std::string> argv;
};

// Writes files under the output directory and remembers their hashes.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& bytes, bool track = true) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    if (track) artifacts_.push_back({{"path", name}, {"sha256", sha256_hex(bytes)}});
  }

  const json& artifacts() const { return artifacts_; }

 private:
  fs::path dir_;
  json artifacts_ = json::array();
};

std::string data_default(const char* file) {
  const char* root = std::getenv("FINGERLOC_DATA_DIR");
  if (root == nullptr || *root == '\0') return {};
  return (fs::path(root) / file).string();
}

std::string absolute(const std::string& path) {
  return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

BeaconLayout load_layout(const Inputs& inputs) {
  if (inputs.layout.empty()) {
    throw ConfigError("no layout: pass --layout or set FINGERLOC_DATA_DIR");
  }
  if (!fs::exists(inputs.layout)) {
    throw ConfigError("layout file not found: " + inputs.layout);
  }
  return BeaconLayout::load(inputs.layout);
}

std::vector<LabelledSample> load_labelled(const Inputs& inputs,
                                          const BeaconLayout& layout) {
  if (inputs.labelled.empty()) {
    throw DataError("no labelled data: pass --labelled or set FINGERLOC_DATA_DIR");
  }
  std::vector<LabelledSample> samples = read_labelled_csv(inputs.labelled, layout);
  if (samples.empty()) throw DataError("labelled dataset is empty: " + inputs.labelled);
  return samples;
}

std::vector<UnlabelledSample> load_unlabelled(const Inputs& inputs,
                                              const BeaconLayout& layout) {
  if (inputs.unlabelled.empty()) {
    throw DataError("no unlabelled data: pass --unlabelled or set FINGERLOC_DATA_DIR");
  }
  std::vector<UnlabelledSample> samples = read_unlabelled_csv(inputs.unlabelled, layout);
  if (samples.empty()) throw DataError("unlabelled dataset is empty: " + inputs.unlabelled);
  return samples;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cdf_csv(const Metrics& metrics, double cell_feet) {
  std::vector<double> feet(metrics.errors_grid.size());
  std::transform(metrics.errors_grid.begin(), metrics.errors_grid.end(), feet.begin(),
                 [&](double e) { return e * cell_feet; });
  std::ostringstream out;
  ErrorCdf::from_errors(feet).write_csv(out);
  return out.str();
}

json metrics_json(const Metrics& m) {
  return {{"mean_error_grid", m.mean_error_grid},
          {"mean_error_ft", m.mean_error_ft},
          {"rmse", m.rmse},
          {"test_samples", m.errors_grid.size()}};
}

struct Split {
  std::vector<LabelledSample> train;
  std::vector<LabelledSample> test;
};

Split split_samples(std::span<const LabelledSample> samples, const RunConfig& c) {
  auto [train, test] = split<LabelledSample>(samples, c.split_ratio, c.seed);
  return {std::move(train), std::move(test)};
}

TrainConfig seeded_train(const RunConfig& c) {
  TrainConfig t = c.train;
  t.seed = derive_seed(c.seed, "train");
  return t;
}

std::uint64_t init_seed(const RunConfig& c) { return derive_seed(c.seed, "model-init"); }

void require_localizer(ModelKind kind) {
  if (kind == ModelKind::kAutoencoder) {
    throw ConfigError("--model must be dnn or cnn");
  }
}

void cmd_train(const Invocation& inv, Outputs& outputs, json& seeds, std::ostream& out) {
  const RunConfig& c = inv.config;
  require_localizer(c.model);
  const BeaconLayout layout = load_layout(inv.inputs);
  const std::vector<LabelledSample> samples = load_labelled(inv.inputs, layout);
  const Split parts = split_samples(samples, c);
  const TrainConfig train = seeded_train(c);
  const FitResult fit = fit_and_evaluate(c.model, parts.train, parts.test, layout, train,
                                         init_seed(c), c.options);
  const Metrics centroid = centroid_baseline(parts.train, parts.test, layout.cell_feet());

  json metrics = metrics_json(fit.metrics);
  metrics["model"] = model_name(c.model);
  metrics["optimizer"] = optimizer_name(c.train.optimizer);
  metrics["parameters"] = count_params(fit.network);
  metrics["train_samples"] = parts.train.size();
  metrics["centroid_baseline_ft"] = centroid.mean_error_ft;
  metrics["epoch_loss"] = fit.history.epoch_loss;
  outputs.write("metrics.json", dump(metrics));
  outputs.write("cdf.csv", cdf_csv(fit.metrics, layout.cell_feet()));
  outputs.write("model.fnet", save_network(fit.network));

  seeds = {{"split", c.seed}, {"train", train.seed}, {"init", init_seed(c)}};
  out << model_name(c.model) << ": mean error " << format_double(fit.metrics.mean_error_ft)
      << " ft (" << format_double(fit.metrics.mean_error_grid) << " grid) on "
      << parts.test.size() << " test samples\n";
}

void cmd_tune(const Invocation& inv, Outputs& outputs, json& seeds, std::ostream& out) {
  const RunConfig& c = inv.config;
  require_localizer(c.model);
  const BeaconLayout layout = load_layout(inv.inputs);
  const std::vector<LabelledSample> samples = load_labelled(inv.inputs, layout);
  const Split parts = split_samples(samples, c);
  const SearchSpace space(c.space.empty() ? default_space(c.train.optimizer) : c.space);
  ExperimentConfig experiment = c.experiment;
  experiment.seed = derive_seed(c.seed, "experiment", c.experiment.seed);
  const TrainConfig base = seeded_train(c);

  const ExperimentResult result = run_experiment(
      c.model, TuningData{parts.train, parts.test, &layout}, base, space, experiment,
      c.options);

  std::ostringstream table;
  table << "trial";
  for (const ParameterRange& r : space.ranges()) table << ',' << r.name;
  table << ",objective,status\n";
  for (const Trial& t : result.trials) {
    table << t.index;
    for (double v : t.params) table << ',' << format_double(v);
    table << ',' << (t.objective ? format_double(*t.objective) : "") << ','
          << (t.status == TrialStatus::kOk ? "ok" : "diverged") << '\n';
  }
  outputs.write("trials.csv", table.str());

  RunConfig best = c;
  best.train = bind_assignment(c.train, space, result.best->params);
  outputs.write("best_config.json", config_to_json(best) + "\n");

  json summary = {{"best_trial", result.best->index},
                  {"best_objective", *result.best->objective},
                  {"goal", c.experiment.goal},
                  {"goal_reached", result.goal_reached},
                  {"trials", result.trials.size()}};
  outputs.write("experiment.json", dump(summary));

  seeds = {{"split", c.seed}, {"train", base.seed}, {"experiment", experiment.seed}};
  out << "best trial " << result.best->index << ": objective "
      << format_double(*result.best->objective) << " grid after "
      << result.trials.size() << " trials\n";
}

void cmd_augment(const Invocation& inv, Outputs& outputs, json& seeds, std::ostream& out) {
  const RunConfig& c = inv.config;
  const BeaconLayout layout = load_layout(inv.inputs);
  const std::vector<LabelledSample> samples = load_labelled(inv.inputs, layout);
  AugmentationPolicy policy = c.augment;
  policy.seed = derive_seed(c.seed, "augment");
  seeds = {{"augment", policy.seed}};

  std::optional<AutoencoderModel> ae;
  if (c.strategy == Strategy::kAutoencoder || c.strategy == Strategy::kHybrid) {
    const std::uint64_t ae_seed = derive_seed(c.seed, "autoencoder");
    ae = train_autoencoder(load_unlabelled(inv.inputs, layout), policy, ae_seed);
    outputs.write("autoencoder.fnet", save_network(ae->network));
    seeds["autoencoder"] = ae_seed;
  }
  const Network* ae_net = ae ? &ae->network : nullptr;

  // Without --paper-protocol only the training split is augmented, so no test
  // sample has a synthetic sibling in training.
  const bool split_first = c.evaluate && !c.paper_protocol;
  Split parts;
  if (split_first) parts = split_samples(samples, c);
  const AugmentedDataset aug =
      augment(split_first ? std::span<const LabelledSample>(parts.train)
                          : std::span<const LabelledSample>(samples),
              c.strategy, ae_net, policy);

  std::vector<std::string> sources;
  sources.reserve(aug.sources.size());
  for (SampleSource s : aug.sources) sources.emplace_back(source_name(s));
  std::ostringstream csv;
  write_labelled_csv(csv, aug.samples, layout, sources);
  outputs.write("augmented.csv", csv.str());

  json counts = {{"strategy", strategy_name(c.strategy)},
                 {"original", aug.counts.original},
                 {"naive", aug.counts.naive},
                 {"kept", aug.counts.kept},
                 {"discarded", aug.counts.discarded},
                 {"total", aug.samples.size()}};
  outputs.write("counts.json", dump(counts));
  out << strategy_name(c.strategy) << ": " << aug.counts.original << " original, "
      << aug.counts.naive << " naive, " << aug.counts.kept << " kept, "
      << aug.counts.discarded << " discarded\n";
  if (!c.evaluate) return;

  require_localizer(c.model);
  const Split baseline_parts = split_samples(samples, c);
  Split augmented_parts;
  if (split_first) {
    augmented_parts = {aug.samples, parts.test};
  } else {
    augmented_parts = split_samples(aug.samples, c);
  }
  const TrainConfig train = seeded_train(c);
  const FitResult baseline = fit_and_evaluate(c.model, baseline_parts.train,
                                              baseline_parts.test, layout, train,
                                              init_seed(c), c.options);
  const FitResult augmented = fit_and_evaluate(c.model, augmented_parts.train,
                                               augmented_parts.test, layout, train,
                                               init_seed(c), c.options);
  const double base_ft = baseline.metrics.mean_error_ft;
  json metrics = {{"model", model_name(c.model)},
                  {"protocol", c.paper_protocol ? "pool-then-split" : "train-only"},
                  {"baseline", metrics_json(baseline.metrics)},
                  {"augmented", metrics_json(augmented.metrics)},
                  {"relative_reduction",
                   (base_ft - augmented.metrics.mean_error_ft) / base_ft}};
  outputs.write("metrics.json", dump(metrics));
  outputs.write("cdf.csv", cdf_csv(augmented.metrics, layout.cell_feet()));
  seeds["split"] = c.seed;
  seeds["train"] = train.seed;
  seeds["init"] = init_seed(c);
  out << "baseline " << format_double(base_ft) << " ft, augmented "
      << format_double(augmented.metrics.mean_error_ft) << " ft\n";
}

void cmd_rationalize(const Invocation& inv, Outputs& outputs, json& seeds,
                     std::ostream& out) {
  const RunConfig& c = inv.config;
  require_localizer(c.model);
  if (c.study_seeds < 1) throw ConfigError("rationalize.seeds must be >= 1");
  const BeaconLayout layout = load_layout(inv.inputs);
  const std::vector<LabelledSample> samples = load_labelled(inv.inputs, layout);

  StudyConfig study{c.model, c.train, c.options, c.split_ratio, {}, c.jobs};
  for (int i = 0; i < c.study_seeds; ++i) {
    study.seeds.push_back(derive_seed(c.seed, "study", static_cast<std::uint64_t>(i)));
  }
  const DropoutStudyResult result = dropout_study(samples, layout, study);
  const std::vector<RankedBeacon> ranked = rank_beacons(result);

  std::ostringstream csv;
  csv << "beacon,residual_samples,mean_error_ft,delta_ft,flag\n";
  json failures = json::object();
  for (const RankedBeacon& r : ranked) {
    const BeaconImpact& b = result.beacons[*layout.index_of(r.id)];
    csv << b.id << ',' << b.residual_samples << ','
        << (b.mean_error_ft ? format_double(*b.mean_error_ft) : "") << ','
        << (b.delta_ft ? format_double(*b.delta_ft) : "") << ',';
    if (!b.error.empty()) {
      csv << "failed";
      failures[b.id] = b.error;
    } else if (r.removal_improves) {
      csv << "removal_improves";
    }
    csv << '\n';
  }
  outputs.write("study.csv", csv.str());

  json ranking = json::array();
  for (const RankedBeacon& r : ranked) ranking.push_back(r.id);
  json summary = {{"model", model_name(c.model)},
                  {"baseline_ft", result.baseline_ft},
                  {"seeds", result.seeds},
                  {"ranking", ranking},
                  {"failures", failures}};
  outputs.write("study_summary.json", dump(summary));
  seeds = {{"study", result.seeds}};
  out << "baseline " << format_double(result.baseline_ft) << " ft; most important "
      << ranked.front().id << "\n";
}

void cmd_synth(const Invocation& inv, Outputs& outputs, json& seeds, std::ostream& out) {
  const RunConfig& c = inv.config;
  const BeaconLayout layout =
      inv.inputs.layout.empty() ? BeaconLayout::default_layout() : load_layout(inv.inputs);
  SynthParams params = c.synth;
  params.seed = c.seed;
  const Dataset data = synth_generate(layout, params);

  std::ostringstream labelled, unlabelled;
  write_labelled_csv(labelled, data.labelled, layout);
  write_unlabelled_csv(unlabelled, data.unlabelled, layout);
  outputs.write(kLabelledFile, labelled.str());
  outputs.write(kUnlabelledFile, unlabelled.str());
  outputs.write(kLayoutFile, layout.to_json() + "\n");
  seeds = {{"synth", params.seed}};
  out << "synth: " << data.labelled.size() << " labelled, " << data.unlabelled.size()
      << " unlabelled samples\n";
}

json input_record(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return nullptr;
  return {{"path", path}, {"sha256", sha256_file(path)}};
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// Runs one command and writes its manifest. Returns the artifact list.
json execute(const Invocation& inv, std::ostream& out) {
  const RunConfig& c = inv.config;
  if (c.jobs < 1) throw ConfigError("--jobs must be >= 1");
  omp_set_num_threads(c.jobs);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  Outputs outputs(inv.out_dir);
  json seeds = json::object();
  if (inv.command == "train") {
    cmd_train(inv, outputs, seeds, out);
  } else if (inv.command == "tune") {
    cmd_tune(inv, outputs, seeds, out);
  } else if (inv.command == "augment") {
    cmd_augment(inv, outputs, seeds, out);
  } else if (inv.command == "rationalize") {
    cmd_rationalize(inv, outputs, seeds, out);
  } else if (inv.command == "synth") {
    cmd_synth(inv, outputs, seeds, out);
  } else {
    throw ConfigError("unknown command '" + inv.command + "'");
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  json manifest = {
      {"tool", "fingerloc"},
      {"version", kVersion},
      {"command", inv.command},
      {"argv", inv.argv},
      {"config", json::parse(config_to_json(c))},
      {"seeds", seeds},
      {"inputs",
       {{"labelled", input_record(inv.inputs.labelled)},
        {"unlabelled", input_record(inv.inputs.unlabelled)},
        {"layout", input_record(inv.inputs.layout)}}},
      {"artifacts", outputs.artifacts()},
      {"started_at", started},
      {"wall_clock_seconds", elapsed.count()},
  };
  outputs.write("manifest.json", dump(manifest), false);
  return outputs.artifacts();
}

int replay(const std::string& manifest_path, const std::string& out_dir,
           std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot read manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("manifest: invalid JSON: ") + e.what());
  }
  Invocation inv;
  try {
    inv.command = m.at("command").get<std::string>();
    inv.config = apply_config_json(RunConfig{}, m.at("config").dump());
    inv.argv = m.at("argv").get<std::vector<std::string>>();
    const json& inputs = m.at("inputs");
    for (const auto& [name, field] :
         {std::pair{"labelled", &inv.inputs.labelled},
          std::pair{"unlabelled", &inv.inputs.unlabelled},
          std::pair{"layout", &inv.inputs.layout}}) {
      const json& rec = inputs.at(name);
      if (rec.is_null()) continue;
      *field = rec.at("path").get<std::string>();
      if (!fs::exists(*field) || sha256_file(*field) != rec.at("sha256").get<std::string>()) {
        throw DataError("manifest input '" + *field + "' is missing or has changed");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  inv.out_dir = out_dir.empty() ? fs::path(manifest_path).parent_path() / "replay"
                                : fs::path(out_dir);

  const json produced = execute(inv, out);
  std::size_t mismatches = 0;
  for (const json& want : m.at("artifacts")) {
    const auto match = std::find_if(produced.begin(), produced.end(), [&](const json& got) {
      return got.at("path") == want.at("path");
    });
    if (match == produced.end() || match->at("sha256") != want.at("sha256")) {
      err << "replay: " << want.at("path").get<std::string>() << " differs\n";
      ++mismatches;
    }
  }
  if (mismatches != 0 || produced.size() != m.at("artifacts").size()) {
    err << "replay: outputs are not identical to the manifest\n";
    return exit_code(ErrorKind::kNumerical);
  }
  out << "replay: " << produced.size() << " artifacts identical\n";
  return 0;
}

struct Flags {
  std::string config_path;
  std::string labelled = data_default(kLabelledFile);
  std::string unlabelled = data_default(kUnlabelledFile);
  std::string layout = data_default(kLayoutFile);
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string model;
  std::string optimizer;
  std::string strategy;
  bool paper_protocol = false;
  bool evaluate = false;
  std::string manifest;
};

struct FlagHandles {
  CLI::Option* seed = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* layout = nullptr;
};

FlagHandles add_common(CLI::App& sub, Flags& f) {
  FlagHandles h;
  sub.add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub.add_option("--labelled", f.labelled, "labelled RSSI CSV");
  sub.add_option("--unlabelled", f.unlabelled, "unlabelled RSSI CSV");
  h.layout = sub.add_option("--layout", f.layout, "beacon layout JSON");
  h.seed = sub.add_option("--seed", f.seed, "root seed");
  h.jobs = sub.add_option("--jobs", f.jobs, "worker threads");
  sub.add_option("--out-dir", f.out_dir, "output directory");
  sub.add_option("--model", f.model, "dnn or cnn");
  sub.add_option("--optimizer", f.optimizer, "adam or sgd");
  return h;
}

RunConfig resolve_config(const Flags& f, const FlagHandles& h) {
  RunConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    std::stringstream text;
    text << in.rdbuf();
    c = apply_config_json(c, text.str());
  }
  if (h.seed->count() > 0) c.seed = f.seed;
  if (h.jobs->count() > 0) c.jobs = f.jobs;
  if (!f.model.empty()) c.model = parse_model(f.model);
  if (!f.optimizer.empty()) {
    c = apply_config_json(c, json{{"train", {{"optimizer", f.optimizer}}}}.dump());
  }
  if (!f.strategy.empty()) c.strategy = parse_strategy(f.strategy);
  if (f.paper_protocol) c.paper_protocol = true;
  if (f.evaluate) c.evaluate = true;
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Indoor localization from BLE RSSI fingerprints", "fingerloc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Flags f;
  std::vector<std::pair<CLI::App*, FlagHandles>> subs;
  for (const auto& [name, help] :
       {std::pair{"train", "train and evaluate a localization model"},
        std::pair{"tune", "hyperparameter search"},
        std::pair{"augment", "augment the labelled dataset"},
        std::pair{"rationalize", "beacon dropout study"},
        std::pair{"synth", "generate a synthetic corpus"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs.emplace_back(sub, add_common(*sub, f));
    if (std::string_view(name) == "augment") {
      sub->add_option("--strategy", f.strategy, "none, naive, autoencoder or hybrid");
      sub->add_flag("--paper-protocol", f.paper_protocol,
                    "augment the whole pool before the train/test split");
      sub->add_flag("--evaluate", f.evaluate, "train on the result and report errors");
    }
  }
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a command from its manifest");
  replay_cmd->add_option("--manifest", f.manifest, "manifest.json to replay")->required();
  CLI::Option* replay_out = replay_cmd->add_option("--out-dir", f.out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::kConfig);
  }

  try {
    if (replay_cmd->parsed()) {
      return replay(f.manifest, replay_out->count() > 0 ? f.out_dir : "", out, err);
    }
    for (const auto& [sub, handles] : subs) {
      if (!sub->parsed()) continue;
      Invocation inv;
      inv.command = sub->get_name();
      inv.config = resolve_config(f, handles);
      inv.inputs = {absolute(f.labelled), absolute(f.unlabelled), absolute(f.layout)};
      if (inv.command == "synth" && handles.layout->count() == 0) inv.inputs.layout.clear();
      inv.out_dir = f.out_dir;
      inv.argv = args;
      execute(inv, out);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::kData);
  }
  return exit_code(ErrorKind::kConfig);
}

}  // namespace fingerloc::cli
