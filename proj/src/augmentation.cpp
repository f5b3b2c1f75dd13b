#include "fingerloc/augmentation.hpp"

#include <algorithm>
#include <string>

#include "fingerloc/error.hpp"
#include "fingerloc/models.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {

void AugmentationPolicy::validate() const {
  if (threshold < 1) throw ConfigError("augmentation threshold must be >= 1");
  if (samples_per_location < 1) {
    throw ConfigError("samples_per_location must be >= 1");
  }
  if (autoencoder_epochs < 1) throw ConfigError("autoencoder_epochs must be >= 1");
  if (!(presence_threshold > 0.0 && presence_threshold < 1.0)) {
    throw ConfigError("presence_threshold must lie in (0, 1)");
  }
}

std::string_view source_name(SampleSource source) {
  switch (source) {
    case SampleSource::kOriginal:
      return "original";
    case SampleSource::kNaive:
      return "naive";
    case SampleSource::kAutoencoder:
      return "autoencoder";
  }
  return "?";
}

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNone:
      return "none";
    case Strategy::kNaive:
      return "naive";
    case Strategy::kAutoencoder:
      return "autoencoder";
    case Strategy::kHybrid:
      return "hybrid";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "none") return Strategy::kNone;
  if (name == "naive") return Strategy::kNaive;
  if (name == "autoencoder") return Strategy::kAutoencoder;
  if (name == "hybrid") return Strategy::kHybrid;
  throw ConfigError("unknown augmentation strategy '" + std::string(name) + "'");
}

std::vector<LabelledSample> naive_augment(std::span<const LabelledSample> samples,
                                          const AugmentationPolicy& policy) {
  policy.validate();
  const std::vector<CellSamples> cells = find_underrepresented(samples, policy.threshold);
  const auto per_cell = static_cast<std::size_t>(policy.samples_per_location);
  std::vector<LabelledSample> generated(cells.size() * per_cell);

  // Each cell draws from its own seed, so cells can be filled in parallel.
  const auto cell_count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(static) if (cell_count > 64)
  for (std::ptrdiff_t c = 0; c < cell_count; ++c) {
    const CellSamples& group = cells[c];
    const std::size_t beacons = group.samples.front().rssi.size();
    std::vector<double> lo(beacons, 0.0), hi(beacons, kNoSignal);
    std::vector<bool> everywhere(beacons, true);
    for (const LabelledSample& s : group.samples) {
      for (std::size_t b = 0; b < beacons; ++b) {
        if (s.rssi[b] <= kNoSignal) {
          everywhere[b] = false;
        } else {
          lo[b] = std::min(lo[b], s.rssi[b]);
          hi[b] = std::max(hi[b], s.rssi[b]);
        }
      }
    }
    const Cell cell = group.cell;
    Rng rng(derive_seed(policy.seed, "naive",
                        static_cast<std::uint64_t>(cell.x * kGridSize + cell.y)));
    const LabelledSample& first = group.samples.front();
    for (std::size_t k = 0; k < per_cell; ++k) {
      LabelledSample s;
      s.rssi.resize(beacons, kNoSignal);
      for (std::size_t b = 0; b < beacons; ++b) {
        if (everywhere[b]) s.rssi[b] = rng.uniform(lo[b], hi[b]);
      }
      s.location = first.location;
      s.label = first.label;
      s.timestamp = "naive";
      generated[static_cast<std::size_t>(c) * per_cell + k] = std::move(s);
    }
  }
  return generated;
}

AutoencoderModel train_autoencoder(std::span<const UnlabelledSample> unlabelled,
                                   const AugmentationPolicy& policy,
                                   std::uint64_t seed) {
  policy.validate();
  if (unlabelled.empty()) throw DataError("autoencoder: no unlabelled samples");
  std::vector<RssiVector> vectors;
  vectors.reserve(unlabelled.size());
  for (const UnlabelledSample& s : unlabelled) vectors.push_back(s.rssi);
  const NdArray x = normalized_vectors(vectors);

  AutoencoderModel model{build_model(ModelKind::kAutoencoder,
                                     derive_seed(seed, "autoencoder-init"), {},
                                     vectors.front().size()),
                         {}};
  TrainConfig config;
  config.epochs = policy.autoencoder_epochs;
  // Twenty passes at batch 100 leave the autoencoder close to its mean output
  // on sparse data; smaller batches give it enough updates to fit.
  config.batch_size = kAutoencoderBatchSize;
  config.seed = derive_seed(seed, "autoencoder-train");
  model.history = train(model.network, x, x, config);
  return model;
}

std::vector<bool> seen_beacons(std::span<const LabelledSample> samples) {
  std::vector<bool> seen;
  for (const LabelledSample& s : samples) {
    if (seen.empty()) seen.assign(s.rssi.size(), false);
    for (std::size_t b = 0; b < s.rssi.size(); ++b) {
      if (s.rssi[b] > kNoSignal) seen[b] = true;
    }
  }
  return seen;
}

bool passes_presence_filter(std::span<const double> normalized,
                            const std::vector<bool>& seen, double tau) {
  for (std::size_t b = 0; b < normalized.size(); ++b) {
    const bool shows_signal = normalized[b] < tau;
    if (shows_signal && (b >= seen.size() || !seen[b])) return false;
  }
  return true;
}

AutoencoderAugmentation autoencoder_augment(
    std::span<const LabelledSample> samples, const Network& autoencoder,
    const AugmentationPolicy& policy) {
  policy.validate();
  const std::vector<CellSamples> cells = find_underrepresented(samples, policy.threshold);
  AutoencoderAugmentation out;
  if (cells.empty()) return out;

  std::vector<RssiVector> firsts;
  firsts.reserve(cells.size());
  for (const CellSamples& c : cells) firsts.push_back(c.samples.front().rssi);
  const NdArray decoded = autoencoder.forward(normalized_vectors(firsts));
  const std::size_t width = decoded.sample_size();

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::span<const double> row(decoded.data() + c * width, width);
    if (!passes_presence_filter(row, seen_beacons(cells[c].samples),
                                policy.presence_threshold)) {
      ++out.discarded;
      continue;
    }
    LabelledSample s = cells[c].samples.front();
    for (std::size_t b = 0; b < width; ++b) {
      s.rssi[b] = row[b] >= policy.presence_threshold ? kNoSignal
                                                      : denormalize_rssi(row[b]);
    }
    s.timestamp = "autoencoder";
    out.kept.push_back(std::move(s));
  }
  return out;
}

AugmentedDataset augment(std::span<const LabelledSample> samples,
                         Strategy strategy, const Network* autoencoder,
                         const AugmentationPolicy& policy) {
  policy.validate();
  AugmentedDataset out;
  out.samples.assign(samples.begin(), samples.end());
  out.sources.assign(samples.size(), SampleSource::kOriginal);
  out.counts.original = samples.size();

  if (strategy == Strategy::kNaive || strategy == Strategy::kHybrid) {
    std::vector<LabelledSample> naive = naive_augment(samples, policy);
    out.counts.naive = naive.size();
    for (LabelledSample& s : naive) {
      out.samples.push_back(std::move(s));
      out.sources.push_back(SampleSource::kNaive);
    }
  }
  if (strategy == Strategy::kAutoencoder || strategy == Strategy::kHybrid) {
    if (autoencoder == nullptr) {
      throw ConfigError("strategy '" + std::string(strategy_name(strategy)) +
                        "' needs a trained autoencoder");
    }
    AutoencoderAugmentation ae = autoencoder_augment(samples, *autoencoder, policy);
    out.counts.kept = ae.kept.size();
    out.counts.discarded = ae.discarded;
    for (LabelledSample& s : ae.kept) {
      out.samples.push_back(std::move(s));
      out.sources.push_back(SampleSource::kAutoencoder);
    }
  }
  return out;
}

}  // namespace fingerloc
