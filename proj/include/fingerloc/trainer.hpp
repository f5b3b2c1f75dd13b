#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fingerloc/ndarray.hpp"
#include "fingerloc/network.hpp"
#include "fingerloc/optimizer.hpp"

namespace fingerloc {

enum class OptimizerKind { kAdam, kSgdMomentum };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

// Loss values above this (or non-finite) abort training.
inline constexpr double kDivergenceThreshold = 1e6;

struct TrainConfig {
  int epochs = 100;
  std::size_t batch_size = 100;
  LossKind loss = LossKind::kRmse;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.9;
  std::uint64_t seed = 0;

  // Adam: lr 0.001; SGD with momentum: lr 0.01, momentum 0.9.
  static TrainConfig defaults_for(OptimizerKind kind);

  // Throws ConfigError on out-of-range fields.
  void validate() const;

  Optimizer make_optimizer(const Network& network) const;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainHistory {
  // Per-epoch training loss, accumulated over the epoch's batches before
  // each update.
  std::vector<double> epoch_loss;
};

// Mini-batch training. Each epoch visits the samples in a fresh permutation
// drawn from config.seed; the final batch may be short. Throws DivergedError
// when a batch loss is non-finite or above kDivergenceThreshold.
TrainHistory train(Network& network, const NdArray& inputs,
                   const NdArray& targets, const TrainConfig& config);

struct Metrics {
  double mean_error_grid = 0.0;
  double mean_error_ft = 0.0;
  double rmse = 0.0;
  std::vector<double> errors_grid;  // per-sample Euclidean error
};

// Targets and predictions are [N, 2] grid coordinates.
Metrics score_predictions(const NdArray& predictions, const NdArray& targets,
                          double cell_feet);

Metrics evaluate(const Network& network, const NdArray& inputs,
                 const NdArray& targets, double cell_feet);

}  // namespace fingerloc
