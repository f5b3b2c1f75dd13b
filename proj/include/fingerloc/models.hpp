#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fingerloc/dataset.hpp"
#include "fingerloc/ndarray.hpp"
#include "fingerloc/network.hpp"

namespace fingerloc {

enum class ModelKind { kDnn, kCnn, kAutoencoder };

std::string_view model_name(ModelKind kind);
ModelKind parse_model(std::string_view name);

struct ModelOptions {
  // CNN pooling windows after the first and second convolution. With 3 and 2
  // the spatial extents go 25 -> 19 -> 7 -> 3 -> 2 and the network has 5438
  // parameters.
  std::size_t cnn_pool1 = 3;
  std::size_t cnn_pool2 = 2;
  // When false, no-signal beacons leave their pixel at 0 instead of 1.0.
  bool image_no_signal_pixels = true;

  bool operator==(const ModelOptions&) const = default;
};

// DNN:         13 -> 50 -> 50 -> 50 -> 2, ReLU between dense layers.
// CNN:         [1,25,25] -> conv 12@7x7 -> pool -> conv 12@5x5 -> pool
//              -> dense 24 -> dense 2, ReLU after each hidden stage.
// Autoencoder: 13 -> 8 -> 4 -> 8 -> 13, ReLU hidden, sigmoid output.
Network build_model(ModelKind kind, std::uint64_t seed,
                    const ModelOptions& options = {},
                    std::size_t beacon_count = 13);

// rssi / -200, so 0 dBm -> 0 and no signal -> 1.
double normalize_rssi(double rssi);
double denormalize_rssi(double value);  // clamps to [-200, 0]

// Gray-scale fingerprint codec. Each beacon owns the pixel at its rounded
// grid coordinate; the pixel holds rssi / -200 and all other pixels are 0.
// Note that with this encoding a missing beacon (-200 dBm) is the brightest
// pixel, 1.0.
class ImageCodec {
 public:
  // Throws ConfigError if two beacons round onto the same pixel.
  explicit ImageCodec(const BeaconLayout& layout, bool no_signal_pixels = true);

  // Writes one [1, 25, 25] image into `pixels` (625 values).
  void encode(std::span<const double> rssi, std::span<double> pixels) const;
  NdArray encode(std::span<const double> rssi) const;
  RssiVector decode(const NdArray& image) const;

  const std::vector<std::pair<int, int>>& pixel_positions() const {
    return pixels_;
  }

 private:
  std::vector<std::pair<int, int>> pixels_;  // (col, row) per beacon
  bool no_signal_pixels_ = true;
};

// Model inputs for a batch: [N, beacons] normalized vectors for the DNN and
// autoencoder, [N, 1, 25, 25] images for the CNN.
NdArray model_inputs(ModelKind kind, std::span<const LabelledSample> samples,
                     const BeaconLayout& layout, const ModelOptions& options = {});
NdArray normalized_vectors(std::span<const RssiVector> vectors);
NdArray location_targets(std::span<const LabelledSample> samples);

}  // namespace fingerloc
