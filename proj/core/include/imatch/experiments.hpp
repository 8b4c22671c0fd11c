#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imatch/adaptive.hpp"
#include "imatch/market.hpp"
#include "imatch/nonadaptive.hpp"
#include "imatch/stability.hpp"

namespace imatch {

enum class Algorithm { Adaptive, NonAdaptive };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

enum class TierScenario {
  StrictlyDecreasing,   // singleton tiers, values spaced by 1 (adaptive default)
  SingleTier,           // one tier per side
  SingletonApplicants,  // applicants in singleton tiers, positions in one tier
  Mixed,                // tier sizes drawn from {1, delta-1, delta, delta+1, n/2}
  RandomPartition,      // each agent boundary cut with probability 1/2
  Custom,               // explicit boundaries
};

std::string_view to_string(TierScenario s);
TierScenario parse_tier_scenario(std::string_view name);

struct ScenarioSpec {
  TierScenario kind = TierScenario::StrictlyDecreasing;
  std::vector<Index> applicant_boundaries;  // Custom only
  std::vector<Index> position_boundaries;
  double value_spacing = 1.0;  // StrictlyDecreasing only

  bool operator==(const ScenarioSpec&) const = default;
};

// Overrides for the non-adaptive delta/theta. Explicit values win over
// coefficients; the defaults are 36 and 72.
struct PlanParamsSpec {
  double delta_coefficient = 36.0;
  double theta_coefficient = 72.0;
  std::optional<Index> delta;
  std::optional<Index> theta;
  LogBase log_base = LogBase::Natural;

  NonAdaptiveParams resolve(Index n) const;

  bool operator==(const PlanParamsSpec&) const = default;
};

struct SweepConfig {
  std::vector<Index> sizes;
  std::size_t seeds_per_size = 1;
  Algorithm algorithm = Algorithm::Adaptive;
  ScenarioSpec scenario{};
  PlanParamsSpec params{};
  UtilityModel utility{};
  std::uint64_t sweep_seed = 0;
  bool monitors_enabled = true;
  MonitorOptions monitors{};
  double timeout_seconds = 0.0;  // 0 = no budget
  unsigned jobs = 1;
  bool shuffle_execution = false;  // permute execution order (results are canonicalised)

  void validate() const;
};

enum class TrialStatus { Ok, Timeout, Error };

std::string_view to_string(TrialStatus s);

struct TrialReport {
  Index n = 0;
  std::uint64_t seed = 0;
  std::size_t trial_index = 0;
  Algorithm algorithm = Algorithm::Adaptive;
  TierScenario scenario = TierScenario::StrictlyDecreasing;
  TrialStatus status = TrialStatus::Ok;
  std::string error;

  std::size_t max_interviews_applicant = 0;
  std::size_t max_interviews_position = 0;
  double mean_interviews = 0.0;  // interviews per agent, both sides
  std::size_t total_interviews = 0;

  bool stable = false;
  std::size_t blocking_pair_count = 0;
  std::size_t uninterviewed_match_count = 0;
  std::size_t unmatched_count = 0;
  std::string witness;  // first blocking pair / uninterviewed match, "a:p"

  // Adaptive monitors.
  std::size_t hard_monitor_violations = 0;
  std::size_t upward_window_violations = 0;
  std::size_t downward_window_violations = 0;

  // Non-adaptive plan diagnostics.
  std::size_t batches = 0;
  Index delta = 0;
  Index theta = 0;
  bool out_of_regime = false;
  std::size_t invariant_checks = 0;
  bool contiguity_holds = true;
  std::size_t max_plan_degree = 0;
  double positivity_fraction = 1.0;
  std::size_t positivity_participants = 0;

  double wall_time_seconds = 0.0;  // excluded from CSV

  std::size_t max_interviews() const { return std::max(max_interviews_applicant, max_interviews_position); }
};

// Market configuration for one trial of the sweep.
MarketConfig make_market_config(const SweepConfig& config, Index n, std::uint64_t seed);

// Seed of the trial_index-th trial at size n; independent of the other sizes.
std::uint64_t trial_seed(std::uint64_t sweep_seed, Index n, std::size_t trial_index);

// Sample, run, verify and monitor. Failures inside the trial are reported
// in the status, not thrown.
TrialReport run_trial(const SweepConfig& config, Index n, std::uint64_t seed);

// Intermediate objects of one trial, for callers that export them.
struct TrialArtifacts {
  bool full_trace = false;  // set by the caller: keep Reject events in the trace
  std::optional<Market> market;
  InterviewLedger ledger;
  Matching matching;
  std::vector<TraceEvent> trace;
  std::optional<MonitorReport> monitors;
  std::optional<InterviewPlan> plan;
  std::optional<StabilityVerdict> verdict;
};

// run_trial on an explicit market configuration. The algorithm, plan
// parameters, monitors and timeout still come from config.
TrialReport run_trial_on(const SweepConfig& config, const MarketConfig& market_config, std::uint64_t seed,
                         TrialArtifacts* artifacts = nullptr);

struct SizeAggregate {
  Index n = 0;
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t failures = 0;  // completed but not stable
  std::size_t timeouts = 0;
  std::size_t errors = 0;
  double failure_rate = 0.0;
  double median_max_interviews = 0.0;
  double p95_max_interviews = 0.0;
  std::size_t max_max_interviews = 0;
  double mean_total_interviews = 0.0;
  std::size_t hard_violations = 0;
  double upward_violation_run_fraction = 0.0;
  double mean_positivity = 1.0;
};

struct ScalingDiagnostics {
  bool valid = false;
  double slope_vs_loglog = 0.0;  // d log(median max) / d log(log n)
  double slope_vs_log = 0.0;     // d log(median max) / d log n
  double median_ratio_last_first = 0.0;
};

struct SweepSummary {
  SweepConfig config;
  std::vector<TrialReport> trials;  // canonical (n, trial_index) order
  std::vector<SizeAggregate> sizes;
  ScalingDiagnostics scaling;
  double wall_time_seconds = 0.0;
};

SweepSummary run_sweep(const SweepConfig& config);

// Aggregation only; exposed so callers can rebuild summaries from reports.
std::vector<SizeAggregate> aggregate_by_size(std::span<const TrialReport> trials);
ScalingDiagnostics scaling_diagnostics(std::span<const SizeAggregate> sizes);

// One row per trial, fixed column order, no timing data.
std::string trials_to_csv(std::span<const TrialReport> trials);
std::string_view csv_header();

}  // namespace imatch
