#include <cmath>

#include "doctest.h"
#include "imatch/adaptive.hpp"
#include "support.hpp"

using namespace imatch;

namespace {

TraceEvent ev(TraceKind k, Index i, Index j) { return TraceEvent{k, i, j, 0, 0.0, 0.0}; }

const Market& three() {
  static const auto m = test::explicit_market({3, 2, 1}, {3, 2, 1}, {0.5, -0.2, 0.3, 0.1, 0.2, -0.4, 0.6, 0.7, 0.8},
                                              {0.4, -0.1, 0.2, 0.3, 0.5, 0.6, -0.7, 0.8, 0.9});
  return m;
}

}  // namespace

TEST_CASE("positive interview must be followed by its match") {
  // eps_a(0,0) = 0.5 and eps_p(0,0) = 0.4 are both non-negative.
  const std::vector<TraceEvent> good = {ev(TraceKind::Interview, 0, 0), ev(TraceKind::TentativeMatch, 0, 0)};
  CHECK(check_trace_monitors(good, three()).hard_violation_count() == 0);
  const std::vector<TraceEvent> bad = {ev(TraceKind::Interview, 0, 0), ev(TraceKind::Reject, 0, 0)};
  const auto report = check_trace_monitors(bad, three());
  CHECK(report.count(HardRule::PositiveInterviewMatches) == 1);
  CHECK(report.violations[0].event_index == 0);
}

TEST_CASE("negative draw does not trigger the positive rule") {
  const std::vector<TraceEvent> t = {ev(TraceKind::Interview, 0, 0), ev(TraceKind::TentativeMatch, 0, 0),
                                     ev(TraceKind::Interview, 1, 1), ev(TraceKind::Reject, 1, 1)};
  // eps_a(1,1) = 0.2 and eps_p(1,1) = 0.5, so the reject is a violation.
  CHECK(check_trace_monitors(t, three()).count(HardRule::PositiveInterviewMatches) == 1);
  // eps_p(0,1) = -0.1.
  const std::vector<TraceEvent> u = {ev(TraceKind::Interview, 1, 0), ev(TraceKind::Reject, 1, 0)};
  CHECK(check_trace_monitors(u, three()).hard_violation_count() == 0);
}

TEST_CASE("position interviews are bounded after a positive match") {
  // p0 matches a0 positively, so later interviews need i' < max(0, 1) = 1.
  const std::vector<TraceEvent> t = {ev(TraceKind::Interview, 0, 0), ev(TraceKind::TentativeMatch, 0, 0),
                                     ev(TraceKind::Interview, 2, 0)};
  const auto report = check_trace_monitors(t, three());
  CHECK(report.count(HardRule::PositiveInterviewWindow) == 1);
}

TEST_CASE("skipped positions break the consecutive rule") {
  const std::vector<TraceEvent> t = {ev(TraceKind::Interview, 0, 2)};
  const auto report = check_trace_monitors(t, three());
  CHECK(report.count(HardRule::ConsecutiveInterviews) == 1);
  const std::vector<TraceEvent> ok = {ev(TraceKind::Interview, 0, 0), ev(TraceKind::Reject, 0, 0),
                                      ev(TraceKind::Interview, 0, 1), ev(TraceKind::Reject, 0, 1),
                                      ev(TraceKind::Interview, 0, 2)};
  CHECK(check_trace_monitors(ok, three()).count(HardRule::ConsecutiveInterviews) == 0);
}

TEST_CASE("window counters") {
  MonitorOptions opts;
  opts.upward_coefficient = 0.5;
  opts.downward_coefficient = 0.5;
  const double w_up = 0.5 * std::log(3.0);
  const double w_down = 0.5 * std::log(3.0) * std::log(3.0);
  const std::vector<TraceEvent> t = {ev(TraceKind::Interview, 2, 0), ev(TraceKind::Interview, 1, 0),
                                     ev(TraceKind::Interview, 0, 1), ev(TraceKind::Interview, 1, 1)};
  const auto r = check_trace_monitors(t, three(), opts);
  CHECK(r.upward_window == doctest::Approx(w_up));
  CHECK(r.downward_window == doctest::Approx(w_down));
  CHECK(r.upward_window_violations == 2);    // 2 > 0 + 0.55 and 1 > 0 + 0.55
  CHECK(r.downward_window_violations == 1);  // 1 > 0 + 0.60
  CHECK(r.max_upward_gap == 2);
  CHECK(r.max_downward_gap == 1);
  CHECK(r.interviews == 4);
}

TEST_CASE("traces from another market are rejected") {
  CHECK_THROWS_AS(check_trace_monitors(std::vector<TraceEvent>{ev(TraceKind::Interview, 3, 0)}, three()),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_trace_monitors(std::vector<TraceEvent>{ev(TraceKind::TentativeMatch, 0, 0)}, three()),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_trace_monitors(
                      std::vector<TraceEvent>{ev(TraceKind::Interview, 0, 0), ev(TraceKind::Interview, 0, 0)}, three()),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_trace_monitors(std::vector<TraceEvent>{ev(TraceKind::Displace, 1, 0)}, three()),
                  std::invalid_argument);
}

TEST_CASE("hard monitors stay silent on real runs") {
  for (double spacing : {1.0, 0.3, 0.05}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto m = test::scenario_market(TierScenario::StrictlyDecreasing, 10 + static_cast<Index>(seed * 5), seed,
                                           spacing);
      const auto r = adaptive_match(m);
      REQUIRE(check_trace_monitors(r.trace, m).hard_violation_count() == 0);
    }
  }
}
