#include <cmath>

#include "doctest.h"
#include "imatch/experiments.hpp"
#include "imatch/json_io.hpp"

using namespace imatch;

namespace {

SweepConfig adaptive_sweep(std::vector<Index> sizes, std::size_t seeds) {
  SweepConfig c;
  c.sizes = std::move(sizes);
  c.seeds_per_size = seeds;
  c.sweep_seed = 17;
  return c;
}

}  // namespace

TEST_CASE("single agent trial") {
  const auto r = run_trial(adaptive_sweep({1}, 1), 1, 5);
  CHECK(r.status == TrialStatus::Ok);
  CHECK(r.total_interviews == 1);
  CHECK(r.stable);
}

TEST_CASE("trials are deterministic") {
  auto c = adaptive_sweep({60}, 1);
  c.scenario.kind = TierScenario::Mixed;
  const auto a = run_trial(c, 60, 3);
  const auto b = run_trial(c, 60, 3);
  CHECK(trials_to_csv(std::vector<TrialReport>{a}) == trials_to_csv(std::vector<TrialReport>{b}));
  CHECK(io::trial_report_to_json(a, false) == io::trial_report_to_json(b, false));
}

TEST_CASE("non-adaptive single tier trial uses delta interviews per applicant") {
  SweepConfig c = adaptive_sweep({200}, 1);
  c.algorithm = Algorithm::NonAdaptive;
  c.scenario.kind = TierScenario::SingleTier;
  const auto r = run_trial(c, 200, 1);
  REQUIRE(r.status == TrialStatus::Ok);
  CHECK(r.max_interviews_applicant == static_cast<std::size_t>(r.delta));
  c.params.delta = 25;
  c.params.theta = 50;
  const auto small = run_trial(c, 200, 1);
  CHECK(small.delta == 25);
  CHECK(small.max_interviews_applicant == 25u);
  CHECK(small.total_interviews == 200u * 25u);
}

TEST_CASE("sweep of one trial wraps it") {
  const auto c = adaptive_sweep({100}, 1);
  const auto s = run_sweep(c);
  REQUIRE(s.trials.size() == 1);
  CHECK(s.sizes.size() == 1);
  const auto direct = run_trial(c, 100, trial_seed(c.sweep_seed, 100, 0));
  CHECK(trials_to_csv(s.trials) == trials_to_csv(std::vector<TrialReport>{direct}));
  CHECK(s.sizes[0].median_max_interviews == static_cast<double>(direct.max_interviews()));
}

TEST_CASE("execution order and thread count do not change results") {
  auto c = adaptive_sweep({20, 40, 80}, 6);
  c.scenario.kind = TierScenario::RandomPartition;
  const auto base = run_sweep(c);
  c.jobs = 3;
  c.shuffle_execution = true;
  const auto shuffled = run_sweep(c);
  CHECK(trials_to_csv(base.trials) == trials_to_csv(shuffled.trials));
  CHECK(io::sweep_summary_to_json(base, false) == io::sweep_summary_to_json(shuffled, false));
}

TEST_CASE("adding sizes leaves existing trials unchanged") {
  const auto small = run_sweep(adaptive_sweep({30}, 3));
  const auto large = run_sweep(adaptive_sweep({10, 30, 50}, 3));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(trials_to_csv(std::vector<TrialReport>{small.trials[k]}) ==
          trials_to_csv(std::vector<TrialReport>{large.trials[3 + k]}));
  }
}

TEST_CASE("unstable trials carry a witness") {
  SweepConfig c = adaptive_sweep({80}, 10);
  c.algorithm = Algorithm::NonAdaptive;
  c.scenario.kind = TierScenario::SingleTier;
  c.params.delta = 1;
  c.params.theta = 1;
  const auto s = run_sweep(c);
  std::size_t unstable = 0;
  for (const auto& t : s.trials) {
    if (t.stable) continue;
    ++unstable;
    CHECK(t.status == TrialStatus::Ok);
    CHECK(t.blocking_pair_count + t.uninterviewed_match_count + t.unmatched_count > 0);
    CHECK_FALSE(t.witness.empty());
  }
  CHECK(unstable > 0);
  CHECK(s.sizes[0].failure_rate == doctest::Approx(unstable / 10.0));
}

TEST_CASE("timeouts are reported") {
  SweepConfig c = adaptive_sweep({3000}, 1);
  c.timeout_seconds = 1e-9;
  const auto s = run_sweep(c);
  REQUIRE(s.trials.size() == 1);
  CHECK(s.trials[0].status == TrialStatus::Timeout);
  CHECK_FALSE(s.trials[0].stable);
  CHECK(s.sizes[0].timeouts == 1);
}

TEST_CASE("sweep config validation") {
  CHECK_THROWS_AS(adaptive_sweep({}, 1).validate(), ConfigError);
  CHECK_THROWS_AS(adaptive_sweep({10, 10}, 1).validate(), ConfigError);
  CHECK_THROWS_AS(adaptive_sweep({10}, 0).validate(), ConfigError);
  auto c = adaptive_sweep({10}, 1);
  c.algorithm = Algorithm::NonAdaptive;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("aggregation statistics") {
  std::vector<TrialReport> trials;
  const std::size_t maxima[] = {5, 1, 9, 3, 7};
  for (std::size_t k = 0; k < 5; ++k) {
    TrialReport r;
    r.n = 10;
    r.trial_index = k;
    r.max_interviews_applicant = maxima[k];
    r.stable = k != 2;
    r.upward_window_violations = k == 4 ? 2 : 0;
    trials.push_back(r);
  }
  TrialReport other;
  other.n = 20;
  other.max_interviews_position = 4;
  other.stable = true;
  trials.push_back(other);
  const auto agg = aggregate_by_size(trials);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].trials == 5);
  CHECK(agg[0].median_max_interviews == 5.0);
  CHECK(agg[0].p95_max_interviews == 9.0);  // nearest rank: ceil(0.95 * 5) = 5th
  CHECK(agg[0].max_max_interviews == 9);
  CHECK(agg[0].failures == 1);
  CHECK(agg[0].failure_rate == doctest::Approx(0.2));
  CHECK(agg[0].upward_violation_run_fraction == doctest::Approx(0.2));
  CHECK(agg[1].median_max_interviews == 4.0);
}

TEST_CASE("scaling slopes separate polylog from polynomial growth") {
  std::vector<SizeAggregate> poly, polylog;
  for (Index n : {100, 1000, 10000}) {
    SizeAggregate a;
    a.n = n;
    a.median_max_interviews = std::sqrt(static_cast<double>(n));
    poly.push_back(a);
    a.median_max_interviews = std::pow(std::log(static_cast<double>(n)), 2.0);
    polylog.push_back(a);
  }
  const auto p = scaling_diagnostics(poly);
  const auto q = scaling_diagnostics(polylog);
  REQUIRE(p.valid);
  CHECK(p.slope_vs_log == doctest::Approx(0.5));
  CHECK(q.slope_vs_loglog == doctest::Approx(2.0));
  CHECK(q.median_ratio_last_first == doctest::Approx(4.0));
  CHECK_FALSE(scaling_diagnostics(std::vector<SizeAggregate>(poly.begin(), poly.begin() + 1)).valid);
}

TEST_CASE("csv has fixed columns and no timing") {
  const auto s = run_sweep(adaptive_sweep({10}, 2));
  const auto csv = trials_to_csv(s.trials);
  CHECK(csv.rfind(std::string(csv_header()) + "\n", 0) == 0);
  CHECK(csv.find("wall") == std::string::npos);
  const auto columns = std::count(csv_header().begin(), csv_header().end(), ',') + 1;
  std::size_t start = csv.find('\n') + 1;
  while (start < csv.size()) {
    const auto end = csv.find('\n', start);
    const auto line = csv.substr(start, end - start);
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
    start = end + 1;
  }
}

TEST_CASE("mixed scenario draws tier sizes from the allowed set") {
  SweepConfig c = adaptive_sweep({300}, 1);
  c.scenario.kind = TierScenario::Mixed;
  c.params.delta = 10;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mc = make_market_config(c, 300, seed);
    for (const auto* tiers : {&*mc.applicant_tiers, &*mc.position_tiers}) {
      for (Index l = 0; l + 1 < tiers->tier_count(); ++l) {
        const Index s = tiers->tier_size(l);
        REQUIRE((s == 1 || s == 9 || s == 10 || s == 11 || s == 150));
      }
    }
  }
}
