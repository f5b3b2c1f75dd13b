#include "fingerloc/pipeline.hpp"

#include "fingerloc/error.hpp"

namespace fingerloc {

FitResult fit_and_evaluate(ModelKind kind, std::span<const LabelledSample> train,
                           std::span<const LabelledSample> test,
                           const BeaconLayout& layout, const TrainConfig& config,
                           std::uint64_t init_seed, const ModelOptions& options) {
  if (kind == ModelKind::kAutoencoder) {
    throw ConfigError("the autoencoder is not a localization model");
  }
  if (train.empty()) throw DataError("training split is empty");
  if (test.empty()) throw DataError("test split is empty");
  FitResult result{build_model(kind, init_seed, options, layout.size()), {}, {}};
  result.history = fingerloc::train(result.network,
                                    model_inputs(kind, train, layout, options),
                                    location_targets(train), config);
  result.metrics = evaluate(result.network, model_inputs(kind, test, layout, options),
                            location_targets(test), layout.cell_feet());
  return result;
}

Metrics centroid_baseline(std::span<const LabelledSample> train,
                          std::span<const LabelledSample> test,
                          double cell_feet) {
  if (train.empty() || test.empty()) throw DataError("centroid baseline: empty split");
  double cx = 0.0, cy = 0.0;
  for (const LabelledSample& s : train) {
    cx += s.location.x;
    cy += s.location.y;
  }
  cx /= static_cast<double>(train.size());
  cy /= static_cast<double>(train.size());
  NdArray predictions({test.size(), 2});
  for (std::size_t i = 0; i < test.size(); ++i) {
    predictions[2 * i] = cx;
    predictions[2 * i + 1] = cy;
  }
  return score_predictions(predictions, location_targets(test), cell_feet);
}

}  // namespace fingerloc
