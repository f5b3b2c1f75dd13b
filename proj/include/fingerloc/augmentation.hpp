#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fingerloc/dataset.hpp"
#include "fingerloc/network.hpp"
#include "fingerloc/trainer.hpp"

namespace fingerloc {

struct AugmentationPolicy {
  int threshold = 10;            // cells with 1..threshold-1 samples
  int samples_per_location = 1;
  int autoencoder_epochs = 20;
  // Normalized decoded values below this count as "shows signal"
  // (0.9 <=> RSSI above -180 dBm).
  double presence_threshold = 0.9;
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const AugmentationPolicy&) const = default;
};

enum class SampleSource { kOriginal, kNaive, kAutoencoder };

std::string_view source_name(SampleSource source);

// For every under-represented cell, draws new samples labelled with that
// cell. A beacon heard in every existing sample there is drawn uniformly
// between its observed min and max; any other beacon is set to no-signal.
std::vector<LabelledSample> naive_augment(std::span<const LabelledSample> samples,
                                          const AugmentationPolicy& policy);

struct AutoencoderModel {
  Network network;
  TrainHistory history;
};

inline constexpr std::size_t kAutoencoderBatchSize = 10;

// Trains the 13-8-4-8-13 autoencoder to reproduce normalized vectors for
// exactly policy.autoencoder_epochs passes (Adam defaults, batch
// kAutoencoderBatchSize).
AutoencoderModel train_autoencoder(std::span<const UnlabelledSample> unlabelled,
                                   const AugmentationPolicy& policy,
                                   std::uint64_t seed);

// Beacons seen with signal in at least one of the samples.
std::vector<bool> seen_beacons(std::span<const LabelledSample> samples);

// True unless the normalized candidate shows signal (< tau) on a beacon
// outside `seen`.
bool passes_presence_filter(std::span<const double> normalized,
                            const std::vector<bool>& seen, double tau);

struct AutoencoderAugmentation {
  std::vector<LabelledSample> kept;
  std::size_t discarded = 0;
};

// Feeds the first sample of each under-represented cell through the
// autoencoder. Candidates showing signal on a beacon never heard at that cell
// are discarded; beacons at or above tau in the survivors are written as
// no-signal, the rest are decoded back to dBm.
AutoencoderAugmentation autoencoder_augment(
    std::span<const LabelledSample> samples, const Network& autoencoder,
    const AugmentationPolicy& policy);

struct AugmentationCounts {
  std::size_t original = 0;
  std::size_t naive = 0;
  std::size_t kept = 0;
  std::size_t discarded = 0;
};

struct AugmentedDataset {
  std::vector<LabelledSample> samples;  // originals first, then generated
  std::vector<SampleSource> sources;
  AugmentationCounts counts;
};

enum class Strategy { kNone, kNaive, kAutoencoder, kHybrid };

std::string_view strategy_name(Strategy strategy);
Strategy parse_strategy(std::string_view name);

// Originals followed by naive and/or autoencoder outputs. The autoencoder may
// be null for kNone and kNaive.
AugmentedDataset augment(std::span<const LabelledSample> samples,
                         Strategy strategy, const Network* autoencoder,
                         const AugmentationPolicy& policy);

inline AugmentedDataset hybrid_augment(std::span<const LabelledSample> samples,
                                       const Network& autoencoder,
                                       const AugmentationPolicy& policy) {
  return augment(samples, Strategy::kHybrid, &autoencoder, policy);
}

}  // namespace fingerloc
