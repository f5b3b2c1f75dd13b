#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fingerloc/dataset.hpp"
#include "fingerloc/models.hpp"
#include "fingerloc/trainer.hpp"

namespace fingerloc {

// Silences one beacon in every sample, then removes the samples whose only
// signal came from that beacon. The input is not modified. Throws ConfigError
// for an unknown id.
std::vector<LabelledSample> drop_beacon(std::span<const LabelledSample> samples,
                                        const BeaconLayout& layout,
                                        std::string_view beacon_id);

struct BeaconImpact {
  std::string id;
  std::size_t residual_samples = 0;
  std::optional<double> mean_error_ft;
  std::optional<double> delta_ft;  // beacon error - baseline error
  std::string error;               // non-empty if any run for it failed
};

struct DropoutStudyResult {
  double baseline_ft = 0.0;
  std::vector<BeaconImpact> beacons;  // layout order
  std::vector<std::uint64_t> seeds;
};

struct StudyConfig {
  ModelKind model = ModelKind::kDnn;
  TrainConfig train;
  ModelOptions options;
  double split_ratio = 0.8;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int jobs = 1;
};

// Baseline and per-beacon retraining, each averaged over config.seeds. For a
// given seed the baseline and every residual set use the same split,
// initialization and shuffle seeds. Per-beacon failures are recorded and the
// study continues; a failing baseline throws.
DropoutStudyResult dropout_study(std::span<const LabelledSample> samples,
                                 const BeaconLayout& layout,
                                 const StudyConfig& config);

struct RankedBeacon {
  std::string id;
  std::optional<double> delta_ft;
  bool removal_improves = false;  // negative delta
};

// Descending delta, ties by beacon id; failed beacons last.
std::vector<RankedBeacon> rank_beacons(const DropoutStudyResult& result);

}  // namespace fingerloc
