#include <doctest.h>

#include <cmath>
#include <limits>

#include "fingerloc/error.hpp"
#include "fingerloc/gp.hpp"
#include "fingerloc/search.hpp"
#include "fingerloc/tuning.hpp"
#include "oracles.hpp"

using namespace fingerloc;

namespace {

Objective quadratic() {
  return [](std::span<const double> p) -> std::optional<double> {
    return (p[0] - 0.0015) * (p[0] - 0.0015);
  };
}

SearchSpace lr_space() { return SearchSpace({{"learning_rate", 0.001, 0.002}}); }

}  // namespace

TEST_CASE("gp posterior matches a dense-solve oracle") {
  Rng rng(12);
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t d = 1 + rng.below(3);
    const std::size_t n = 2 + rng.below(10);
    std::vector<std::vector<double>> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = oracle::random_values(rng, d, 0.0, 1.0);
      ys[i] = rng.uniform(-2.0, 2.0);
    }
    const KernelParams kernel{0.2, 1.3, 1.3e-6};
    const GpSurrogate gp = GpSurrogate::fit(xs, ys, kernel);
    for (int q = 0; q < 5; ++q) {
      const auto query = oracle::random_values(rng, d, 0.0, 1.0);
      const Posterior got = gp.predict(query);
      const Posterior want =
          oracle::gp_posterior(xs, ys, kernel, gp.prior_mean(), gp.jitter(), query);
      CHECK(std::abs(got.mean - want.mean) < 1e-8);
      CHECK(std::abs(got.variance - std::max(want.variance, 0.0)) < 1e-8);
      CHECK(got.variance <= kernel.signal_variance + 1e-9);
    }
  }
}

TEST_CASE("expected improvement closed-form values") {
  CHECK(expected_improvement(1.0, 0.0, 2.0) == 1.0);
  CHECK(expected_improvement(3.0, 0.0, 2.0) == 0.0);
  CHECK(std::abs(expected_improvement(2.0, 1.0, 2.0) - 0.3989422804014327) < 1e-12);
  CHECK(std::abs(normal_cdf(0.0) - 0.5) < 1e-12);
  CHECK(std::abs(normal_pdf(0.0) - 0.3989422804014327) < 1e-12);

  // Zero at noiseless observations, non-negative elsewhere.
  const std::vector<std::vector<double>> xs{{0.1}, {0.5}, {0.9}};
  const std::vector<double> ys{1.0, 0.2, 0.7};
  const GpSurrogate gp = GpSurrogate::fit(xs, ys, {0.2, 1.0, 0.0});
  for (const auto& x : xs) CHECK(expected_improvement(gp, x, 0.2) == 0.0);
  for (int i = 0; i <= 100; ++i) {
    const std::vector<double> q{i / 100.0};
    CHECK(expected_improvement(gp, q, 0.2) >= 0.0);
  }
}

TEST_CASE("posterior variance never grows with more data") {
  Rng rng(3);
  for (int instance = 0; instance < 20; ++instance) {
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    std::vector<double> previous(11, 1.0);
    for (int n = 0; n < 6; ++n) {
      xs.push_back({rng.uniform()});
      ys.push_back(rng.uniform(-1.0, 1.0));
      const GpSurrogate gp = GpSurrogate::fit(xs, ys, {0.2, 1.0, 1e-6}, 0.0);
      for (int q = 0; q <= 10; ++q) {
        const std::vector<double> query{q / 10.0};
        const double v = gp.predict(query).variance;
        CHECK(v <= previous[q] + 1e-9);
        previous[q] = v;
      }
    }
  }
}

TEST_CASE("gp jitter escalation and failures") {
  // Duplicate points with no noise are singular until jitter is added.
  const GpSurrogate gp = GpSurrogate::fit({{0.5}, {0.5}}, {1.0, 1.0}, {0.2, 1.0, 0.0});
  CHECK(gp.jitter() > 0.0);
  CHECK(gp.jitter() <= 1e-6);
  CHECK_THROWS_AS(GpSurrogate::fit({}, {}, {}), ConfigError);
  CHECK_THROWS_AS(GpSurrogate::fit({{0.1}}, {NAN}, {}), NumericalError);
}

TEST_CASE("grid search visits a lexicographic lattice") {
  ExperimentConfig config;
  config.algorithm = SearchAlgorithm::kGrid;
  config.max_trials = 9;
  config.goal = 1e-300;
  Suggester s(SearchSpace({{"a", 0, 1}, {"b", 10, 20}}), config);
  CHECK(s.grid_resolution() == 3);
  std::vector<Trial> history;
  std::vector<std::vector<double>> points;
  while (auto p = s.suggest(history)) {
    points.push_back(*p);
    history.push_back({static_cast<int>(history.size()), *p, 1.0, TrialStatus::kOk});
  }
  REQUIRE(points.size() == 9);
  CHECK(points[0] == std::vector<double>{0.0, 10.0});
  CHECK(points[1] == std::vector<double>{0.0, 15.0});
  CHECK(points[3] == std::vector<double>{0.5, 10.0});
  CHECK(points[8] == std::vector<double>{1.0, 20.0});

  config.max_trials = 1;
  Suggester single(SearchSpace({{"a", 0, 1}}), config);
  CHECK(single.suggest({}) == std::vector<double>{0.5});
}

TEST_CASE("search stops at the goal and respects the budget") {
  ExperimentConfig config;
  config.goal = std::numeric_limits<double>::infinity();
  const ExperimentResult one = run_search(lr_space(), config, quadratic());
  CHECK(one.trials.size() == 1);
  CHECK(one.goal_reached);

  config.goal = 1e-300;
  for (SearchAlgorithm a :
       {SearchAlgorithm::kGrid, SearchAlgorithm::kRandom, SearchAlgorithm::kBayesian}) {
    config.algorithm = a;
    const ExperimentResult r = run_search(lr_space(), config, quadratic());
    CHECK(r.trials.size() <= 15);
    for (const Trial& t : r.trials) CHECK(lr_space().contains(t.params));
    const ExperimentResult again = run_search(lr_space(), config, quadratic());
    REQUIRE(again.trials.size() == r.trials.size());
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
      CHECK(again.trials[i].params == r.trials[i].params);
    }
  }
}

TEST_CASE("bayesian search finds the analytic optimum") {
  ExperimentConfig config;
  config.goal = 1e-300;
  int hits = 0;
  double bayes_total = 0.0, random_total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    config.seed = seed;
    config.algorithm = SearchAlgorithm::kBayesian;
    const ExperimentResult b = run_search(lr_space(), config, quadratic());
    if (std::abs(b.best->params[0] - 0.0015) <= 0.05 * 0.001) ++hits;
    bayes_total += *b.best->objective;
    config.algorithm = SearchAlgorithm::kRandom;
    random_total += *run_search(lr_space(), config, quadratic()).best->objective;
  }
  CHECK(hits >= 9);
  CHECK(bayes_total <= random_total);
}

TEST_CASE("diverged trials carry no objective") {
  ExperimentConfig config;
  config.goal = 1e-300;
  config.max_trials = 6;
  int calls = 0;
  const Objective flaky = [&](std::span<const double> p) -> std::optional<double> {
    if (++calls % 2 == 0) return std::nullopt;
    return p[0];
  };
  const ExperimentResult r = run_search(lr_space(), config, flaky);
  CHECK(r.trials.size() == 6);
  CHECK(r.trials[1].status == TrialStatus::kDiverged);
  CHECK_FALSE(r.trials[1].objective);
  CHECK(r.best->status == TrialStatus::kOk);

  const Objective broken = [](std::span<const double>) -> std::optional<double> {
    return std::nullopt;
  };
  CHECK_THROWS_AS(run_search(lr_space(), config, broken), NumericalError);
}

TEST_CASE("search space validation and binding") {
  CHECK_THROWS_AS(SearchSpace(std::vector<ParameterRange>{}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({{"a", 1, 1}}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({{"a", 0, 1}, {"a", 0, 2}}), ConfigError);
  const SearchSpace space({{"learning_rate", 0.001, 0.002},
                           {"beta1", 0.88, 0.93},
                           {"batch_size", 10, 200}});
  const std::vector<double> params{0.0015, 0.9, 63.6};
  const TrainConfig bound = bind_assignment(TrainConfig{}, space, params);
  CHECK(bound.learning_rate == 0.0015);
  CHECK(bound.beta1 == 0.9);
  CHECK(bound.batch_size == 64);
  CHECK_THROWS_AS(check_bindable(SearchSpace({{"dropout", 0, 1}})), ConfigError);
  CHECK_THROWS_AS(parse_algorithm("annealing"), ConfigError);
}
