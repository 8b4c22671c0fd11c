#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imatch/adaptive.hpp"
#include "imatch/experiments.hpp"
#include "imatch/interview.hpp"
#include "imatch/market.hpp"
#include "imatch/matching.hpp"
#include "imatch/nonadaptive.hpp"
#include "imatch/stability.hpp"

// Text formats. Every parser throws ConfigError on malformed input.
namespace imatch::io {

// {n, m, applicant_tiers, position_tiers, epsilon:{family, half_width},
//  eta:{enabled, family, half_width}, tier_gap, value_generator, storage}
MarketConfig market_config_from_json(std::string_view text);
std::string market_config_to_json(const MarketConfig& config);

// Full latent instance; matrices as arrays of rows.
std::string market_to_json(const Market& market);
Market market_from_json(std::string_view text);

// {"interviews": [[a, p], ...]} in occurrence order.
std::string ledger_to_json(const InterviewLedger& ledger);
InterviewLedger ledger_from_json(std::string_view text, Index n, Index m);

// {"n", "m", "pairs": [[a, p], ...]}
std::string matching_to_json(const Matching& matching);
Matching matching_from_json(std::string_view text, Index n, Index m);

std::string verdict_to_json(const StabilityVerdict& verdict);

struct PlanDocument {
  InterviewPlan plan;
  std::optional<MarketConfig> market;  // shape the plan was built for
};

std::string plan_to_json(const InterviewPlan& plan, const MarketConfig* market = nullptr);
PlanDocument plan_from_json(std::string_view text);

// One JSON object per line: kind, i, j, iteration, applicant_observed,
// position_observed.
std::string trace_to_jsonl(std::span<const TraceEvent> trace);
std::vector<TraceEvent> trace_from_jsonl(std::string_view text);

std::string monitor_report_to_json(const MonitorReport& report);

// Data payload first; wall time only inside "metadata" when requested.
std::string trial_report_to_json(const TrialReport& report, bool include_metadata = true);
std::string sweep_summary_to_json(const SweepSummary& summary, bool include_metadata = true);

SweepConfig sweep_config_from_json(std::string_view text);
std::string sweep_config_to_json(const SweepConfig& config);

}  // namespace imatch::io
