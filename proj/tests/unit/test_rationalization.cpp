#include <doctest.h>

#include "fingerloc/error.hpp"
#include "fingerloc/rationalization.hpp"
#include "fingerloc/synth.hpp"
#include "oracles.hpp"

using namespace fingerloc;

namespace {

LabelledSample sample(RssiVector rssi) {
  return {std::move(rssi), {1, 1}, "B01", "t"};
}

}  // namespace

TEST_CASE("drop_beacon removes only single-signal samples") {
  const BeaconLayout layout({{"b01", 1, 1}, {"b02", 5, 5}, {"b03", 9, 9}});
  const std::vector<LabelledSample> samples{
      sample({-70, -200, -200}),  // only b01
      sample({-70, -80, -200}),
      sample({-200, -200, -200}),  // no signal at all: kept
      sample({-200, -60, -200}),
  };
  const auto residual = drop_beacon(samples, layout, "b01");
  CHECK(residual.size() == 3);
  for (const LabelledSample& s : residual) CHECK(s.rssi[0] == kNoSignal);
  CHECK(samples[0].rssi[0] == -70);  // input untouched
  CHECK(drop_beacon(residual, layout, "b01") == residual);
  CHECK(drop_beacon(samples, layout, "b03").size() == samples.size());
  CHECK_THROWS_AS(drop_beacon(samples, layout, "b99"), ConfigError);
}

TEST_CASE("residual counts agree with a brute-force scan") {
  const BeaconLayout layout = BeaconLayout::default_layout();
  const Dataset d = synth_generate(layout, {300, 2, 0, 9, {}});
  std::size_t deficits = 0, singles = 0;
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const auto residual = drop_beacon(d.labelled, layout, layout.beacons()[b].id);
    const std::size_t removed = d.labelled.size() - residual.size();
    CHECK(removed == oracle::single_signal_count(d.labelled, b));
    deficits += removed;
    singles += oracle::single_signal_count(d.labelled, b);
    CHECK(drop_beacon(residual, layout, layout.beacons()[b].id) == residual);
  }
  CHECK(deficits == singles);
}

TEST_CASE("rank_beacons orders by descending delta") {
  DropoutStudyResult r;
  r.beacons = {{"b01", 10, 22.0, -1.0, ""}, {"b03", 10, 26.0, 3.0, ""},
               {"b07", 10, 23.2, 0.2, ""}};
  const auto ranked = rank_beacons(r);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].id == "b03");
  CHECK(ranked[1].id == "b07");
  CHECK(ranked[2].id == "b01");
  CHECK(ranked[2].removal_improves);
  CHECK_FALSE(ranked[0].removal_improves);

  r.beacons = {{"b2", 1, 1.0, 0.5, ""}, {"bx", 1, {}, {}, "boom"}, {"b1", 1, 1.0, 0.5, ""}};
  const auto ties = rank_beacons(r);
  CHECK(ties[0].id == "b1");
  CHECK(ties[1].id == "b2");
  CHECK(ties[2].id == "bx");
}

TEST_CASE("dropout study on a small synthetic corpus") {
  const BeaconLayout layout = BeaconLayout::default_layout();
  const Dataset d = synth_generate(layout, {150, 2, 0, 2, {}});
  const auto original = d.labelled;
  StudyConfig config;
  config.train.epochs = 5;
  config.seeds = {1, 2};
  const DropoutStudyResult serial = dropout_study(d.labelled, layout, config);
  CHECK(d.labelled == original);
  REQUIRE(serial.beacons.size() == 13);
  for (std::size_t b = 0; b < 13; ++b) {
    const BeaconImpact& impact = serial.beacons[b];
    CHECK(impact.id == layout.beacons()[b].id);
    CHECK(impact.residual_samples <= d.labelled.size());
    REQUIRE(impact.delta_ft);
    CHECK(*impact.delta_ft == doctest::Approx(*impact.mean_error_ft - serial.baseline_ft));
  }
  config.jobs = 3;
  const DropoutStudyResult threaded = dropout_study(d.labelled, layout, config);
  CHECK(threaded.baseline_ft == serial.baseline_ft);
  for (std::size_t b = 0; b < 13; ++b) {
    CHECK(threaded.beacons[b].mean_error_ft == serial.beacons[b].mean_error_ft);
  }
  config.seeds.clear();
  CHECK_THROWS_AS(dropout_study(d.labelled, layout, config), ConfigError);
}

TEST_CASE("a beacon whose removal empties the data is reported, not fatal") {
  const BeaconLayout layout({{"only", 5, 5}});
  std::vector<LabelledSample> samples;
  for (int i = 0; i < 20; ++i) {
    samples.push_back({{-60.0 - i}, {double(i % 5), double(i / 5)}, "A00", "t"});
  }
  StudyConfig config;
  config.train.epochs = 2;
  config.seeds = {0};
  const DropoutStudyResult r = dropout_study(samples, layout, config);
  REQUIRE(r.beacons.size() == 1);
  CHECK(r.beacons[0].residual_samples == 0);
  CHECK_FALSE(r.beacons[0].error.empty());
  CHECK_FALSE(r.beacons[0].delta_ft);
}
