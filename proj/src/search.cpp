#include "fingerloc/search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fingerloc/error.hpp"
#include "fingerloc/gp.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {

SearchSpace::SearchSpace(std::vector<ParameterRange> ranges)
    : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw ConfigError("search space is empty");
  std::set<std::string> names;
  for (const ParameterRange& r : ranges_) {
    if (r.name.empty()) throw ConfigError("search space: unnamed parameter");
    if (!names.insert(r.name).second) {
      throw ConfigError("search space: duplicate parameter '" + r.name + "'");
    }
    if (!(r.lower < r.upper) || !std::isfinite(r.lower) || !std::isfinite(r.upper)) {
      throw ConfigError("search space: '" + r.name + "' needs min < max");
    }
  }
}

std::vector<double> SearchSpace::to_unit(std::span<const double> values) const {
  std::vector<double> unit(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    unit[i] = (values[i] - ranges_[i].lower) / (ranges_[i].upper - ranges_[i].lower);
  }
  return unit;
}

std::vector<double> SearchSpace::from_unit(std::span<const double> unit) const {
  std::vector<double> values(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const double v = ranges_[i].lower + unit[i] * (ranges_[i].upper - ranges_[i].lower);
    values[i] = std::clamp(v, ranges_[i].lower, ranges_[i].upper);
  }
  return values;
}

bool SearchSpace::contains(std::span<const double> values) const {
  if (values.size() != ranges_.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= ranges_[i].lower && values[i] <= ranges_[i].upper)) return false;
  }
  return true;
}

std::string_view algorithm_name(SearchAlgorithm algorithm) {
  switch (algorithm) {
    case SearchAlgorithm::kGrid:
      return "grid";
    case SearchAlgorithm::kRandom:
      return "random";
    case SearchAlgorithm::kBayesian:
      return "bayesian";
  }
  return "?";
}

SearchAlgorithm parse_algorithm(std::string_view name) {
  if (name == "grid") return SearchAlgorithm::kGrid;
  if (name == "random") return SearchAlgorithm::kRandom;
  if (name == "bayesian") return SearchAlgorithm::kBayesian;
  throw ConfigError("unknown search algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (max_trials < 1) throw ConfigError("max_trials must be >= 1");
  if (!(goal > 0.0)) throw ConfigError("goal must be positive");
}

Suggester::Suggester(SearchSpace space, ExperimentConfig config)
    : space_(std::move(space)), config_(config) {
  config_.validate();
  if (space_.dimensions() == 0) throw ConfigError("search space is empty");
  // Smallest r with r^d >= max_trials.
  const auto target = static_cast<std::size_t>(config_.max_trials);
  const std::size_t d = space_.dimensions();
  auto covers = [&](std::size_t r) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
      total *= r;
      if (total >= target) return true;
    }
    return total >= target;
  };
  grid_resolution_ = 1;
  while (!covers(grid_resolution_)) ++grid_resolution_;
}

std::vector<double> Suggester::random_point(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> unit(space_.dimensions());
  for (double& u : unit) u = rng.uniform();
  return space_.from_unit(unit);
}

std::optional<std::vector<double>> Suggester::next_grid_point() {
  const std::size_t d = space_.dimensions();
  const std::size_t r = grid_resolution_;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= r;
  if (grid_cursor_ >= total) return std::nullopt;
  std::vector<double> unit(d);
  std::size_t rest = grid_cursor_++;
  for (std::size_t i = d; i-- > 0;) {
    const std::size_t digit = rest % r;
    rest /= r;
    unit[i] = r == 1 ? 0.5 : static_cast<double>(digit) / static_cast<double>(r - 1);
  }
  return space_.from_unit(unit);
}

std::vector<double> Suggester::bayesian_point(std::span<const Trial> history,
                                              std::uint64_t trial_index) const {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (const Trial& t : history) {
    if (t.status != TrialStatus::kOk || !t.objective) continue;
    xs.push_back(space_.to_unit(t.params));
    ys.push_back(*t.objective);
  }
  if (history.size() < static_cast<std::size_t>(kBayesianWarmupTrials) || xs.empty()) {
    return random_point(derive_seed(config_.seed, "suggest-random", trial_index));
  }

  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  double var = 0.0;
  for (double y : ys) var += (y - mean) * (y - mean);
  var /= static_cast<double>(ys.size());
  if (!(var > 0.0)) var = mean != 0.0 ? mean * mean : 1.0;
  const KernelParams kernel{0.2, var, 1e-6 * var};
  const GpSurrogate gp = GpSurrogate::fit(xs, ys, kernel);
  const double best = *std::min_element(ys.begin(), ys.end());

  Rng rng(derive_seed(config_.seed, "suggest-candidates", trial_index));
  std::vector<double> candidate(space_.dimensions());
  std::vector<double> chosen;
  double chosen_ei = -1.0;
  for (int c = 0; c < kBayesianCandidates; ++c) {
    for (double& u : candidate) u = rng.uniform();
    const double ei = expected_improvement(gp, candidate, best);
    if (ei > chosen_ei) {
      chosen_ei = ei;
      chosen = candidate;
    }
  }
  return space_.from_unit(chosen);
}

std::optional<std::vector<double>> Suggester::suggest(std::span<const Trial> history) {
  const auto trial_index = static_cast<std::uint64_t>(history.size());
  switch (config_.algorithm) {
    case SearchAlgorithm::kGrid:
      return next_grid_point();
    case SearchAlgorithm::kRandom:
      return random_point(derive_seed(config_.seed, "suggest-random", trial_index));
    case SearchAlgorithm::kBayesian:
      return bayesian_point(history, trial_index);
  }
  return std::nullopt;
}

ExperimentResult run_search(const SearchSpace& space,
                            const ExperimentConfig& config,
                            const Objective& objective) {
  config.validate();
  Suggester suggester(space, config);
  ExperimentResult result;
  for (int i = 0; i < config.max_trials; ++i) {
    std::optional<std::vector<double>> params = suggester.suggest(result.trials);
    if (!params) break;
    Trial trial;
    trial.index = i;
    trial.params = std::move(*params);
    trial.objective = objective(trial.params);
    if (trial.objective && !std::isfinite(*trial.objective)) trial.objective.reset();
    trial.status = trial.objective ? TrialStatus::kOk : TrialStatus::kDiverged;
    result.trials.push_back(trial);
    if (trial.objective && *trial.objective <= config.goal) {
      result.goal_reached = true;
      break;
    }
  }
  for (const Trial& t : result.trials) {
    if (t.status == TrialStatus::kOk &&
        (!result.best || *t.objective < *result.best->objective)) {
      result.best = t;
    }
  }
  if (!result.best) {
    throw NumericalError("experiment failed: all " +
                         std::to_string(result.trials.size()) + " trials diverged");
  }
  return result;
}

}  // namespace fingerloc
