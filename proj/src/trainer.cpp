#include "fingerloc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fingerloc/error.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgdMomentum;
  throw ConfigError("unknown optimizer '" + std::string(name) +
                    "' (expected adam or sgd)");
}

TrainConfig TrainConfig::defaults_for(OptimizerKind kind) {
  TrainConfig config;
  config.optimizer = kind;
  config.learning_rate = kind == OptimizerKind::kAdam ? 0.001 : 0.01;
  return config;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be a finite non-negative number");
  }
  if (optimizer == OptimizerKind::kAdam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  } else if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

Optimizer TrainConfig::make_optimizer(const Network& network) const {
  const std::vector<const NdArray*> params = network.parameters();
  if (optimizer == OptimizerKind::kAdam) {
    return AdamState(AdamParams{learning_rate, beta1, beta2, epsilon}, params);
  }
  return SgdMomentumState(SgdMomentumParams{learning_rate, momentum}, params);
}

TrainHistory train(Network& network, const NdArray& inputs,
                   const NdArray& targets, const TrainConfig& config) {
  config.validate();
  if (inputs.rank() == 0 || inputs.extent(0) == 0) {
    throw DataError("train: empty training set");
  }
  if (targets.rank() == 0 || targets.extent(0) != inputs.extent(0)) {
    throw ShapeError("train: " + std::to_string(inputs.extent(0)) +
                     " inputs but " +
                     std::to_string(targets.rank() ? targets.extent(0) : 0) +
                     " targets");
  }
  const std::size_t n = inputs.extent(0);
  const std::size_t outputs = targets.sample_size();
  Optimizer optimizer = config.make_optimizer(network);
  std::vector<NdArray> grads = network.zero_gradients();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, "epoch-shuffle"));

  TrainHistory history;
  history.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double sse = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const NdArray x = gather_rows(inputs, rows);
      const NdArray y = gather_rows(targets, rows);

      const std::vector<NdArray> trace = network.forward_trace(x);
      const LossValue loss = compute_loss(config.loss, trace.back(), y);
      if (!std::isfinite(loss.value) || loss.value > kDivergenceThreshold) {
        throw DivergedError(epoch, batch_index, loss.value);
      }
      network.backward(trace, loss.gradient, grads);
      optimizer_step(optimizer, network.parameters(), grads);

      const double count = static_cast<double>(rows.size() * outputs);
      sse += config.loss == LossKind::kRmse ? loss.value * loss.value * count
                                            : loss.value * count;
    }
    const double mean = sse / static_cast<double>(n * outputs);
    history.epoch_loss.push_back(config.loss == LossKind::kRmse ? std::sqrt(mean)
                                                                : mean);
  }
  return history;
}

Metrics score_predictions(const NdArray& predictions, const NdArray& targets,
                          double cell_feet) {
  if (predictions.shape() != targets.shape() || predictions.rank() != 2 ||
      predictions.extent(1) != 2) {
    throw ShapeError("score: expected matching [N, 2] arrays, got " +
                     shape_to_string(predictions.shape()) + " and " +
                     shape_to_string(targets.shape()));
  }
  const std::size_t n = predictions.extent(0);
  if (n == 0) throw DataError("evaluate: empty test set");
  Metrics m;
  m.errors_grid.resize(n);
  double sum = 0.0, sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = predictions[2 * i] - targets[2 * i];
    const double dy = predictions[2 * i + 1] - targets[2 * i + 1];
    m.errors_grid[i] = std::hypot(dx, dy);
    sum += m.errors_grid[i];
    sse += dx * dx + dy * dy;
  }
  m.mean_error_grid = sum / static_cast<double>(n);
  m.mean_error_ft = m.mean_error_grid * cell_feet;
  m.rmse = std::sqrt(sse / static_cast<double>(2 * n));
  return m;
}

Metrics evaluate(const Network& network, const NdArray& inputs,
                 const NdArray& targets, double cell_feet) {
  return score_predictions(network.forward(inputs), targets, cell_feet);
}

}  // namespace fingerloc
