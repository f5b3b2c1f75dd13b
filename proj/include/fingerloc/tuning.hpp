#pragma once

#include <span>
#include <string>

#include "fingerloc/dataset.hpp"
#include "fingerloc/models.hpp"
#include "fingerloc/search.hpp"
#include "fingerloc/trainer.hpp"

namespace fingerloc {

// Writes the assignment into a TrainConfig. Recognised names: learning_rate,
// beta1, beta2, epsilon, momentum, epochs, batch_size (the last two rounded).
// Throws ConfigError on unknown names.
TrainConfig bind_assignment(const TrainConfig& base, const SearchSpace& space,
                            std::span<const double> params);

// Checks that every range name binds to a TrainConfig field.
void check_bindable(const SearchSpace& space);

struct TuningData {
  std::span<const LabelledSample> train;
  std::span<const LabelledSample> test;
  const BeaconLayout* layout = nullptr;
};

// Tunes `base` over `space`: each trial trains a fresh model (same
// initialization seed for every trial) and scores the mean Euclidean test
// error in grid units.
ExperimentResult run_experiment(ModelKind kind, const TuningData& data,
                                const TrainConfig& base,
                                const SearchSpace& space,
                                const ExperimentConfig& config,
                                const ModelOptions& options = {});

}  // namespace fingerloc
