#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fingerloc {

struct ParameterRange {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const ParameterRange&) const = default;
};

class SearchSpace {
 public:
  SearchSpace() = default;
  // Throws ConfigError on empty or duplicate names or lower >= upper.
  explicit SearchSpace(std::vector<ParameterRange> ranges);

  const std::vector<ParameterRange>& ranges() const { return ranges_; }
  std::size_t dimensions() const { return ranges_.size(); }

  std::vector<double> to_unit(std::span<const double> values) const;
  std::vector<double> from_unit(std::span<const double> unit) const;
  bool contains(std::span<const double> values) const;

 private:
  std::vector<ParameterRange> ranges_;
};

enum class SearchAlgorithm { kGrid, kRandom, kBayesian };

std::string_view algorithm_name(SearchAlgorithm algorithm);
SearchAlgorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  SearchAlgorithm algorithm = SearchAlgorithm::kBayesian;
  int max_trials = 15;
  double goal = 1.2;  // stop once an objective is at or below this
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

enum class TrialStatus { kOk, kDiverged };

struct Trial {
  int index = 0;
  std::vector<double> params;        // aligned with SearchSpace::ranges()
  std::optional<double> objective;   // empty for diverged trials
  TrialStatus status = TrialStatus::kOk;
};

inline constexpr int kBayesianWarmupTrials = 3;
inline constexpr int kBayesianCandidates = 1024;

// Proposes the next assignment given the trials so far.
//   grid:     lattice with ceil(max_trials^(1/d)) points per dimension, visited
//             in lexicographic order; returns nullopt once exhausted.
//   random:   independent uniform draws.
//   bayesian: random warm-up, then the candidate with the highest expected
//             improvement among kBayesianCandidates seeded uniform points.
class Suggester {
 public:
  Suggester(SearchSpace space, ExperimentConfig config);

  std::optional<std::vector<double>> suggest(std::span<const Trial> history);

  std::size_t grid_resolution() const { return grid_resolution_; }

 private:
  std::vector<double> random_point(std::uint64_t seed) const;
  std::optional<std::vector<double>> next_grid_point();
  std::vector<double> bayesian_point(std::span<const Trial> history,
                                     std::uint64_t trial_index) const;

  SearchSpace space_;
  ExperimentConfig config_;
  std::size_t grid_resolution_ = 1;
  std::size_t grid_cursor_ = 0;
};

struct ExperimentResult {
  std::vector<Trial> trials;
  std::optional<Trial> best;
  bool goal_reached = false;
};

// Returns the objective for an assignment, or nullopt if training diverged.
using Objective =
    std::function<std::optional<double>(std::span<const double> params)>;

// Sequential suggest -> evaluate -> record loop. Stops once the goal is met
// or the suggester runs out of trials. Throws NumericalError if no trial
// produced an objective.
ExperimentResult run_search(const SearchSpace& space,
                            const ExperimentConfig& config,
                            const Objective& objective);

}  // namespace fingerloc
