#include "fingerloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fingerloc/error.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {
namespace {

RssiVector readings_at(const BeaconLayout& layout, const PathLossModel& model,
                       double x, double y, Rng& rng) {
  RssiVector rssi;
  rssi.reserve(layout.size());
  for (const Beacon& b : layout.beacons()) {
    const double noise = model.noise_std > 0.0 ? model.noise_std * rng.normal() : 0.0;
    rssi.push_back(path_loss_rssi(model, std::hypot(x - b.x, y - b.y), noise));
  }
  return rssi;
}

}  // namespace

double path_loss_rssi(const PathLossModel& model, double distance,
                      double noise_db) {
  const double d = std::max(distance, model.reference_distance);
  double rssi = model.reference_power -
                10.0 * model.exponent * std::log10(d / model.reference_distance) +
                noise_db;
  if (rssi < model.detection_floor) rssi = kNoSignal;
  return std::clamp(rssi, kNoSignal, 0.0);
}

Dataset synth_generate(const BeaconLayout& layout, const SynthParams& params) {
  const PathLossModel& model = params.model;
  if (!(model.exponent > 0.0)) throw ConfigError("synth: path-loss exponent must be > 0");
  if (!(model.reference_distance > 0.0)) {
    throw ConfigError("synth: reference distance must be > 0");
  }
  if (model.detection_floor < kNoSignal) {
    throw ConfigError("synth: detection floor must be >= -200");
  }
  if (params.locations < 1 || params.samples_per_location < 1) {
    throw ConfigError("synth: locations and samples per location must be >= 1");
  }
  if (params.locations > kGridSize * kGridSize) {
    throw ConfigError("synth: at most 625 distinct locations fit the grid");
  }
  if (params.unlabelled < 0) throw ConfigError("synth: unlabelled count must be >= 0");

  std::vector<int> cells(kGridSize * kGridSize);
  for (int i = 0; i < kGridSize * kGridSize; ++i) cells[i] = i;
  Rng pick(derive_seed(params.seed, "synth-locations"));
  pick.shuffle(std::span<int>(cells));
  cells.resize(static_cast<std::size_t>(params.locations));
  std::sort(cells.begin(), cells.end());

  Dataset data;
  data.layout = layout;
  Rng noise(derive_seed(params.seed, "synth-labelled"));
  for (int cell : cells) {
    const int x = cell / kGridSize;
    const int y = cell % kGridSize;
    const std::string label = encode_location_label(x, y);
    for (int k = 0; k < params.samples_per_location; ++k) {
      LabelledSample s;
      s.rssi = readings_at(layout, model, x, y, noise);
      s.location = {static_cast<double>(x), static_cast<double>(y)};
      s.label = label;
      s.timestamp = "synth-" + std::to_string(data.labelled.size());
      data.labelled.push_back(std::move(s));
    }
  }
  Rng free(derive_seed(params.seed, "synth-unlabelled"));
  for (int k = 0; k < params.unlabelled; ++k) {
    const double x = free.uniform(0.0, kGridSize - 1);
    const double y = free.uniform(0.0, kGridSize - 1);
    data.unlabelled.push_back(
        {readings_at(layout, model, x, y, free), "synth-u" + std::to_string(k)});
  }
  return data;
}

}  // namespace fingerloc
