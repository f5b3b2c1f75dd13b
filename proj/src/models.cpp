#include "fingerloc/models.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <string>

#include "fingerloc/error.hpp"

namespace fingerloc {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDnn:
      return "dnn";
    case ModelKind::kCnn:
      return "cnn";
    case ModelKind::kAutoencoder:
      return "autoencoder";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  if (name == "dnn") return ModelKind::kDnn;
  if (name == "cnn") return ModelKind::kCnn;
  if (name == "autoencoder") return ModelKind::kAutoencoder;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected dnn, cnn or autoencoder)");
}

Network build_model(ModelKind kind, std::uint64_t seed,
                    const ModelOptions& options, std::size_t beacon_count) {
  Network net;
  switch (kind) {
    case ModelKind::kDnn:
      net = Network({beacon_count});
      net.add(make_dense(beacon_count, 50)).add(Relu{});
      net.add(make_dense(50, 50)).add(Relu{});
      net.add(make_dense(50, 50)).add(Relu{});
      net.add(make_dense(50, 2));
      break;
    case ModelKind::kCnn: {
      if (options.cnn_pool1 < 1 || options.cnn_pool2 < 1) {
        throw ConfigError("cnn pooling windows must be >= 1");
      }
      net = Network({1, kGridSize, kGridSize});
      net.add(make_conv2d(1, 12, 7, 7)).add(Relu{});
      net.add(MaxPool2d{options.cnn_pool1});
      net.add(make_conv2d(12, 12, 5, 5)).add(Relu{});
      net.add(MaxPool2d{options.cnn_pool2});
      net.add(Flatten{});
      const std::size_t flat = net.output_shape().at(0);
      net.add(make_dense(flat, 24)).add(Relu{});
      net.add(make_dense(24, 2));
      break;
    }
    case ModelKind::kAutoencoder:
      net = Network({beacon_count});
      net.add(make_dense(beacon_count, 8)).add(Relu{});
      net.add(make_dense(8, 4)).add(Relu{});
      net.add(make_dense(4, 8)).add(Relu{});
      net.add(make_dense(8, beacon_count)).add(Sigmoid{});
      break;
  }
  net.initialize(seed);
  return net;
}

double normalize_rssi(double rssi) { return rssi / kNoSignal; }

namespace {

int trailing_zero_bits(double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v) & ((std::uint64_t{1} << 52) - 1);
  return bits == 0 ? 64 : std::countr_zero(bits);
}

}  // namespace

// Scaling is not injective, so several doubles can share one pixel. Among the
// neighbours that re-encode to the pixel, prefer the shortest mantissa; this
// makes the round trip exact for integer dBm readings.
double denormalize_rssi(double value) {
  const double r = value * kNoSignal;
  double best = r;
  bool exact = normalize_rssi(r) == value;
  for (double c : {std::nextafter(r, 1.0), std::nextafter(r, -1e9)}) {
    if (normalize_rssi(c) != value) continue;
    if (!exact || trailing_zero_bits(c) > trailing_zero_bits(best)) best = c;
    exact = true;
  }
  return std::clamp(best, kNoSignal, 0.0);
}

ImageCodec::ImageCodec(const BeaconLayout& layout, bool no_signal_pixels)
    : no_signal_pixels_(no_signal_pixels) {
  for (const Beacon& b : layout.beacons()) {
    const int col = std::clamp(static_cast<int>(std::lround(b.x)), 0, kGridSize - 1);
    const int row = std::clamp(static_cast<int>(std::lround(b.y)), 0, kGridSize - 1);
    for (std::size_t k = 0; k < pixels_.size(); ++k) {
      if (pixels_[k] == std::pair{col, row}) {
        throw ConfigError("layout: beacons '" + layout.beacons()[k].id +
                          "' and '" + b.id + "' share pixel (" +
                          std::to_string(col) + ", " + std::to_string(row) + ")");
      }
    }
    pixels_.emplace_back(col, row);
  }
}

void ImageCodec::encode(std::span<const double> rssi,
                        std::span<double> pixels) const {
  if (rssi.size() != pixels_.size()) {
    throw ShapeError("image codec: expected " + std::to_string(pixels_.size()) +
                     " readings, got " + std::to_string(rssi.size()));
  }
  std::fill(pixels.begin(), pixels.end(), 0.0);
  for (std::size_t b = 0; b < pixels_.size(); ++b) {
    if (!no_signal_pixels_ && rssi[b] <= kNoSignal) continue;
    const auto [col, row] = pixels_[b];
    pixels[static_cast<std::size_t>(row * kGridSize + col)] = normalize_rssi(rssi[b]);
  }
}

NdArray ImageCodec::encode(std::span<const double> rssi) const {
  NdArray image({1, kGridSize, kGridSize});
  encode(rssi, image.values());
  return image;
}

RssiVector ImageCodec::decode(const NdArray& image) const {
  if (image.size() != static_cast<std::size_t>(kGridSize * kGridSize)) {
    throw ShapeError("image codec: expected a 25 x 25 image, got " +
                     shape_to_string(image.shape()));
  }
  RssiVector rssi;
  rssi.reserve(pixels_.size());
  for (const auto& [col, row] : pixels_) {
    rssi.push_back(denormalize_rssi(image[static_cast<std::size_t>(row * kGridSize + col)]));
  }
  return rssi;
}

NdArray normalized_vectors(std::span<const RssiVector> vectors) {
  const std::size_t width = vectors.empty() ? 0 : vectors.front().size();
  NdArray out({vectors.size(), width});
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != width) throw ShapeError("ragged RSSI vectors");
    for (std::size_t b = 0; b < width; ++b) {
      out[i * width + b] = normalize_rssi(vectors[i][b]);
    }
  }
  return out;
}

NdArray model_inputs(ModelKind kind, std::span<const LabelledSample> samples,
                     const BeaconLayout& layout, const ModelOptions& options) {
  if (kind == ModelKind::kCnn) {
    const ImageCodec codec(layout, options.image_no_signal_pixels);
    constexpr std::size_t kPixels = kGridSize * kGridSize;
    NdArray out({samples.size(), 1, kGridSize, kGridSize});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      codec.encode(samples[i].rssi, out.values().subspan(i * kPixels, kPixels));
    }
    return out;
  }
  NdArray out({samples.size(), layout.size()});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].rssi.size() != layout.size()) {
      throw ShapeError("sample has " + std::to_string(samples[i].rssi.size()) +
                       " readings, layout has " + std::to_string(layout.size()));
    }
    for (std::size_t b = 0; b < layout.size(); ++b) {
      out[i * layout.size() + b] = normalize_rssi(samples[i].rssi[b]);
    }
  }
  return out;
}

NdArray location_targets(std::span<const LabelledSample> samples) {
  NdArray out({samples.size(), 2});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[2 * i] = samples[i].location.x;
    out[2 * i + 1] = samples[i].location.y;
  }
  return out;
}

}  // namespace fingerloc
