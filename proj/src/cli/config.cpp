#include <set>
#include <string>

#include <json.hpp>

#include "fingerloc/cli.hpp"
#include "fingerloc/error.hpp"

namespace fingerloc::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& where,
                    const std::set<std::string>& known) {
  if (!section.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : section.items()) {
    if (!known.contains(key)) {
      throw ConfigError("config: unknown key '" + key + "' in '" + where + "'");
    }
  }
}

template <typename T>
void read(const json& section, const char* key, T& out, const std::string& where) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for '" + where + "." + key + "'");
  }
}

std::string loss_name(LossKind kind) { return kind == LossKind::kMse ? "mse" : "rmse"; }

LossKind parse_loss(const std::string& name) {
  if (name == "rmse") return LossKind::kRmse;
  if (name == "mse") return LossKind::kMse;
  throw ConfigError("unknown loss '" + name + "'");
}

void apply_train(const json& j, TrainConfig& train) {
  reject_unknown(j, "train",
                 {"epochs", "batch_size", "loss", "optimizer", "learning_rate",
                  "beta1", "beta2", "epsilon", "momentum"});
  if (j.contains("optimizer")) {
    // Switching optimizer starts from that optimizer's defaults.
    const OptimizerKind kind = parse_optimizer(j.at("optimizer").get<std::string>());
    if (kind != train.optimizer) {
      const int epochs = train.epochs;
      const std::size_t batch = train.batch_size;
      const LossKind loss = train.loss;
      train = TrainConfig::defaults_for(kind);
      train.epochs = epochs;
      train.batch_size = batch;
      train.loss = loss;
    }
  }
  read(j, "epochs", train.epochs, "train");
  read(j, "batch_size", train.batch_size, "train");
  if (j.contains("loss")) train.loss = parse_loss(j.at("loss").get<std::string>());
  read(j, "learning_rate", train.learning_rate, "train");
  read(j, "beta1", train.beta1, "train");
  read(j, "beta2", train.beta2, "train");
  read(j, "epsilon", train.epsilon, "train");
  read(j, "momentum", train.momentum, "train");
}

void apply_augment(const json& j, RunConfig& c) {
  reject_unknown(j, "augment",
                 {"strategy", "threshold", "samples_per_location", "autoencoder_epochs",
                  "presence_threshold", "paper_protocol", "evaluate"});
  if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  read(j, "threshold", c.augment.threshold, "augment");
  read(j, "samples_per_location", c.augment.samples_per_location, "augment");
  read(j, "autoencoder_epochs", c.augment.autoencoder_epochs, "augment");
  read(j, "presence_threshold", c.augment.presence_threshold, "augment");
  read(j, "paper_protocol", c.paper_protocol, "augment");
  read(j, "evaluate", c.evaluate, "augment");
}

void apply_experiment(const json& j, RunConfig& c) {
  reject_unknown(j, "experiment", {"algorithm", "max_trials", "goal", "seed", "space"});
  if (j.contains("algorithm")) {
    c.experiment.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  }
  read(j, "max_trials", c.experiment.max_trials, "experiment");
  read(j, "goal", c.experiment.goal, "experiment");
  read(j, "seed", c.experiment.seed, "experiment");
  if (j.contains("space")) {
    c.space.clear();
    for (const json& r : j.at("space")) {
      reject_unknown(r, "experiment.space", {"name", "min", "max"});
      ParameterRange range;
      read(r, "name", range.name, "experiment.space");
      read(r, "min", range.lower, "experiment.space");
      read(r, "max", range.upper, "experiment.space");
      c.space.push_back(range);
    }
  }
}

void apply_synth(const json& j, SynthParams& s) {
  reject_unknown(j, "synth", {"locations", "samples_per_location", "unlabelled", "path_loss"});
  read(j, "locations", s.locations, "synth");
  read(j, "samples_per_location", s.samples_per_location, "synth");
  read(j, "unlabelled", s.unlabelled, "synth");
  if (j.contains("path_loss")) {
    const json& p = j.at("path_loss");
    reject_unknown(p, "synth.path_loss",
                   {"reference_power", "exponent", "reference_distance", "noise_std",
                    "detection_floor"});
    read(p, "reference_power", s.model.reference_power, "synth.path_loss");
    read(p, "exponent", s.model.exponent, "synth.path_loss");
    read(p, "reference_distance", s.model.reference_distance, "synth.path_loss");
    read(p, "noise_std", s.model.noise_std, "synth.path_loss");
    read(p, "detection_floor", s.model.detection_floor, "synth.path_loss");
  }
}

}  // namespace

std::vector<ParameterRange> default_space(OptimizerKind optimizer) {
  if (optimizer == OptimizerKind::kAdam) {
    return {{"learning_rate", 0.001, 0.002}, {"beta1", 0.88, 0.93}};
  }
  return {{"learning_rate", 0.005, 0.02}, {"momentum", 0.85, 0.95}};
}

RunConfig apply_config_json(const RunConfig& base, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, "config",
                 {"seed", "model", "cnn", "split_ratio", "jobs", "train", "augment",
                  "rationalize", "experiment", "synth"});
  RunConfig c = base;
  try {
    read(j, "seed", c.seed, "config");
    if (j.contains("model")) c.model = parse_model(j.at("model").get<std::string>());
    read(j, "split_ratio", c.split_ratio, "config");
    read(j, "jobs", c.jobs, "config");
    if (j.contains("cnn")) {
      const json& cnn = j.at("cnn");
      reject_unknown(cnn, "cnn", {"pool1", "pool2", "no_signal_pixels"});
      read(cnn, "pool1", c.options.cnn_pool1, "cnn");
      read(cnn, "pool2", c.options.cnn_pool2, "cnn");
      read(cnn, "no_signal_pixels", c.options.image_no_signal_pixels, "cnn");
    }
    if (j.contains("train")) apply_train(j.at("train"), c.train);
    if (j.contains("augment")) apply_augment(j.at("augment"), c);
    if (j.contains("rationalize")) {
      const json& r = j.at("rationalize");
      reject_unknown(r, "rationalize", {"seeds"});
      read(r, "seeds", c.study_seeds, "rationalize");
    }
    if (j.contains("experiment")) apply_experiment(j.at("experiment"), c);
    if (j.contains("synth")) apply_synth(j.at("synth"), c.synth);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json space = json::array();
  for (const ParameterRange& r : c.space) {
    space.push_back({{"name", r.name}, {"min", r.lower}, {"max", r.upper}});
  }
  const json j = {
      {"seed", c.seed},
      {"model", std::string(model_name(c.model))},
      {"cnn",
       {{"pool1", c.options.cnn_pool1},
        {"pool2", c.options.cnn_pool2},
        {"no_signal_pixels", c.options.image_no_signal_pixels}}},
      {"split_ratio", c.split_ratio},
      {"jobs", c.jobs},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"loss", loss_name(c.train.loss)},
        {"optimizer", std::string(optimizer_name(c.train.optimizer))},
        {"learning_rate", c.train.learning_rate},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"epsilon", c.train.epsilon},
        {"momentum", c.train.momentum}}},
      {"augment",
       {{"strategy", std::string(strategy_name(c.strategy))},
        {"threshold", c.augment.threshold},
        {"samples_per_location", c.augment.samples_per_location},
        {"autoencoder_epochs", c.augment.autoencoder_epochs},
        {"presence_threshold", c.augment.presence_threshold},
        {"paper_protocol", c.paper_protocol},
        {"evaluate", c.evaluate}}},
      {"rationalize", {{"seeds", c.study_seeds}}},
      {"experiment",
       {{"algorithm", std::string(algorithm_name(c.experiment.algorithm))},
        {"max_trials", c.experiment.max_trials},
        {"goal", c.experiment.goal},
        {"seed", c.experiment.seed},
        {"space", space}}},
      {"synth",
       {{"locations", c.synth.locations},
        {"samples_per_location", c.synth.samples_per_location},
        {"unlabelled", c.synth.unlabelled},
        {"path_loss",
         {{"reference_power", c.synth.model.reference_power},
          {"exponent", c.synth.model.exponent},
          {"reference_distance", c.synth.model.reference_distance},
          {"noise_std", c.synth.model.noise_std},
          {"detection_floor", c.synth.model.detection_floor}}}}},
  };
  return j.dump(2);
}

}  // namespace fingerloc::cli
