#pragma once

#include <cstdint>

#include "fingerloc/dataset.hpp"

namespace fingerloc {

// Log-distance path-loss model used to generate test corpora.
struct PathLossModel {
  double reference_power = -60.0;    // dBm at the reference distance
  double exponent = 2.5;
  double reference_distance = 1.0;   // grid units
  double noise_std = 4.0;            // dB
  double detection_floor = -85.0;    // weaker readings become no-signal

  bool operator==(const PathLossModel&) const = default;
};

// P0 - 10 n log10(max(d, d0) / d0) + noise, then the floor and the
// [-200, 0] clamp.
double path_loss_rssi(const PathLossModel& model, double distance,
                      double noise_db);

struct SynthParams {
  int locations = 400;
  int samples_per_location = 3;
  int unlabelled = 0;
  std::uint64_t seed = 0;
  PathLossModel model;

  bool operator==(const SynthParams&) const = default;
};

// Picks `locations` distinct grid cells, then draws noisy readings at each.
// Unlabelled readings come from uniformly random positions on the floor.
// Throws ConfigError on non-positive counts or more locations than cells.
Dataset synth_generate(const BeaconLayout& layout, const SynthParams& params);

}  // namespace fingerloc
