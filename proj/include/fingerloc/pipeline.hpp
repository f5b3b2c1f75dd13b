#pragma once

#include <cstdint>
#include <span>

#include "fingerloc/dataset.hpp"
#include "fingerloc/models.hpp"
#include "fingerloc/network.hpp"
#include "fingerloc/trainer.hpp"

namespace fingerloc {

struct FitResult {
  Network network;
  TrainHistory history;
  Metrics metrics;
};

// Builds `kind` from init_seed, trains on `train` and scores on `test`.
FitResult fit_and_evaluate(ModelKind kind, std::span<const LabelledSample> train,
                           std::span<const LabelledSample> test,
                           const BeaconLayout& layout, const TrainConfig& config,
                           std::uint64_t init_seed,
                           const ModelOptions& options = {});

// Mean error of always predicting the centroid of the training locations.
Metrics centroid_baseline(std::span<const LabelledSample> train,
                          std::span<const LabelledSample> test,
                          double cell_feet);

}  // namespace fingerloc
