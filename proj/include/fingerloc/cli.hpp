#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fingerloc/augmentation.hpp"
#include "fingerloc/models.hpp"
#include "fingerloc/search.hpp"
#include "fingerloc/synth.hpp"
#include "fingerloc/trainer.hpp"

namespace fingerloc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Fully resolved settings for one command. Command-line flags override the
// config file, which overrides the defaults. The manifest stores its JSON form.
struct RunConfig {
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::kDnn;
  ModelOptions options;
  double split_ratio = 0.8;
  TrainConfig train;

  Strategy strategy = Strategy::kHybrid;
  AugmentationPolicy augment;
  bool paper_protocol = false;
  bool evaluate = false;

  int study_seeds = 5;

  ExperimentConfig experiment;
  std::vector<ParameterRange> space;  // empty: optimizer-specific default

  SynthParams synth;
  int jobs = 1;

  bool operator==(const RunConfig&) const = default;
};

// Applies the sections present in `config` on top of `base`. Unknown keys are
// rejected with ConfigError.
RunConfig apply_config_json(const RunConfig& base, const std::string& text);

// Complete JSON snapshot; apply_config_json(RunConfig{}, to_json(c)) == c.
std::string config_to_json(const RunConfig& config);

// Default search space for the configured optimizer.
std::vector<ParameterRange> default_space(OptimizerKind optimizer);

// Entry point shared by the executable and the tests. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fingerloc::cli
