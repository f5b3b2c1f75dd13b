#include "fingerloc/tuning.hpp"

#include <cmath>

#include "fingerloc/error.hpp"
#include "fingerloc/pipeline.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {
namespace {

bool bind_one(TrainConfig& config, const std::string& name, double value) {
  if (name == "learning_rate") {
    config.learning_rate = value;
  } else if (name == "beta1") {
    config.beta1 = value;
  } else if (name == "beta2") {
    config.beta2 = value;
  } else if (name == "epsilon") {
    config.epsilon = value;
  } else if (name == "momentum") {
    config.momentum = value;
  } else if (name == "epochs") {
    config.epochs = static_cast<int>(std::lround(value));
  } else if (name == "batch_size") {
    config.batch_size = static_cast<std::size_t>(std::max(1L, std::lround(value)));
  } else {
    return false;
  }
  return true;
}

}  // namespace

void check_bindable(const SearchSpace& space) {
  TrainConfig scratch;
  for (const ParameterRange& r : space.ranges()) {
    if (!bind_one(scratch, r.name, r.lower)) {
      throw ConfigError("search space: '" + r.name +
                        "' is not a tunable training parameter");
    }
  }
}

TrainConfig bind_assignment(const TrainConfig& base, const SearchSpace& space,
                            std::span<const double> params) {
  if (params.size() != space.dimensions()) {
    throw ConfigError("assignment does not match the search space");
  }
  TrainConfig config = base;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!bind_one(config, space.ranges()[i].name, params[i])) {
      throw ConfigError("search space: '" + space.ranges()[i].name +
                        "' is not a tunable training parameter");
    }
  }
  return config;
}

ExperimentResult run_experiment(ModelKind kind, const TuningData& data,
                                const TrainConfig& base,
                                const SearchSpace& space,
                                const ExperimentConfig& config,
                                const ModelOptions& options) {
  if (data.layout == nullptr) throw ConfigError("tuning: layout missing");
  check_bindable(space);
  const std::uint64_t init_seed = derive_seed(base.seed, "model-init");
  auto objective = [&](std::span<const double> params) -> std::optional<double> {
    const TrainConfig trial = bind_assignment(base, space, params);
    try {
      return fit_and_evaluate(kind, data.train, data.test, *data.layout, trial,
                              init_seed, options)
          .metrics.mean_error_grid;
    } catch (const DivergedError&) {
      return std::nullopt;
    }
  };
  return run_search(space, config, objective);
}

}  // namespace fingerloc
