#include "fingerloc/rationalization.hpp"

#include <algorithm>
#include <exception>
#include <string>

#include "fingerloc/error.hpp"
#include "fingerloc/pipeline.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {

std::vector<LabelledSample> drop_beacon(std::span<const LabelledSample> samples,
                                        const BeaconLayout& layout,
                                        std::string_view beacon_id) {
  const std::optional<std::size_t> index = layout.index_of(beacon_id);
  if (!index) throw ConfigError("unknown beacon '" + std::string(beacon_id) + "'");
  std::vector<LabelledSample> out;
  out.reserve(samples.size());
  for (const LabelledSample& s : samples) {
    const bool had_signal = has_signal(s.rssi);
    LabelledSample copy = s;
    copy.rssi.at(*index) = kNoSignal;
    if (had_signal && !has_signal(copy.rssi)) continue;
    out.push_back(std::move(copy));
  }
  return out;
}

namespace {

struct Run {
  std::optional<double> error_ft;
  std::string failure;
};

Run run_once(std::span<const LabelledSample> samples, const BeaconLayout& layout,
             const StudyConfig& config, std::uint64_t seed) {
  Run run;
  try {
    const auto [train_set, test_set] =
        split<LabelledSample>(samples, config.split_ratio, seed);
    TrainConfig train = config.train;
    train.seed = derive_seed(seed, "train");
    run.error_ft = fit_and_evaluate(config.model, train_set, test_set, layout, train,
                                    derive_seed(seed, "model-init"), config.options)
                       .metrics.mean_error_ft;
  } catch (const std::exception& e) {
    run.failure = e.what();
  }
  return run;
}

}  // namespace

DropoutStudyResult dropout_study(std::span<const LabelledSample> samples,
                                 const BeaconLayout& layout,
                                 const StudyConfig& config) {
  if (config.seeds.empty()) throw ConfigError("dropout study needs at least one seed");
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!(config.split_ratio > 0.0 && config.split_ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0, 1)");
  }
  config.train.validate();

  const std::size_t beacons = layout.size();
  const std::size_t seeds = config.seeds.size();
  std::vector<std::vector<LabelledSample>> residual(beacons);
  for (std::size_t b = 0; b < beacons; ++b) {
    residual[b] = drop_beacon(samples, layout, layout.beacons()[b].id);
  }

  // Slot 0 is the baseline, slot b + 1 is beacon b; each is run once per seed.
  const std::size_t tasks = (beacons + 1) * seeds;
  std::vector<Run> runs(tasks);
  const auto task_count = static_cast<std::ptrdiff_t>(tasks);
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
  for (std::ptrdiff_t t = 0; t < task_count; ++t) {
    const std::size_t slot = static_cast<std::size_t>(t) / seeds;
    const std::uint64_t seed = config.seeds[static_cast<std::size_t>(t) % seeds];
    const std::span<const LabelledSample> data =
        slot == 0 ? samples : std::span<const LabelledSample>(residual[slot - 1]);
    runs[static_cast<std::size_t>(t)] = run_once(data, layout, config, seed);
  }

  DropoutStudyResult result;
  result.seeds = config.seeds;
  double baseline = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const Run& run = runs[s];
    if (!run.error_ft) throw NumericalError("dropout study baseline failed: " + run.failure);
    baseline += *run.error_ft;
  }
  result.baseline_ft = baseline / static_cast<double>(seeds);

  for (std::size_t b = 0; b < beacons; ++b) {
    BeaconImpact impact;
    impact.id = layout.beacons()[b].id;
    impact.residual_samples = residual[b].size();
    double total = 0.0;
    for (std::size_t s = 0; s < seeds && impact.error.empty(); ++s) {
      const Run& run = runs[(b + 1) * seeds + s];
      if (run.error_ft) {
        total += *run.error_ft;
      } else {
        impact.error = run.failure;
      }
    }
    if (impact.error.empty()) {
      impact.mean_error_ft = total / static_cast<double>(seeds);
      impact.delta_ft = *impact.mean_error_ft - result.baseline_ft;
    }
    result.beacons.push_back(std::move(impact));
  }
  return result;
}

std::vector<RankedBeacon> rank_beacons(const DropoutStudyResult& result) {
  std::vector<RankedBeacon> ranked;
  ranked.reserve(result.beacons.size());
  for (const BeaconImpact& b : result.beacons) {
    ranked.push_back({b.id, b.delta_ft, b.delta_ft && *b.delta_ft < 0.0});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedBeacon& a, const RankedBeacon& b) {
    if (a.delta_ft.has_value() != b.delta_ft.has_value()) return a.delta_ft.has_value();
    if (a.delta_ft && *a.delta_ft != *b.delta_ft) return *a.delta_ft > *b.delta_ft;
    return a.id < b.id;
  });
  return ranked;
}

}  // namespace fingerloc
