#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "imatch/common.hpp"
#include "imatch/interview.hpp"
#include "imatch/market.hpp"
#include "imatch/matching.hpp"
#include "imatch/stability.hpp"

namespace imatch {

class PlanInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Direction { ApplicantProposing, PositionProposing };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view name);

// Which branch of the tier-pairing step produced a batch.
enum class PlanCase : int {
  Complete = 1,        // both effective sizes small: all pairs
  LowIndexWindow = 2,  // short tier small: all pairs with the lowest-index window
  RandomSubgraph = 3,  // both large: random subsets of the lowest-index block
};

struct NonAdaptiveParams {
  Index delta = 1;
  Index theta = 1;
  LogBase log_base = LogBase::Natural;
  // delta had to be clamped to n: the polylog regime does not apply.
  bool out_of_regime = false;

  // delta = ceil(36 log^2 n), theta = ceil(72 log^3 n).
  static NonAdaptiveParams defaults(Index n, LogBase base = LogBase::Natural);
  // delta = ceil(cd log^2 n), theta = ceil(ct log^3 n), same clamping.
  static NonAdaptiveParams scaled(Index n, double delta_coefficient, double theta_coefficient,
                                  LogBase base = LogBase::Natural);
  void validate() const;

  bool operator==(const NonAdaptiveParams&) const = default;
};

struct PlanBatch {
  std::vector<Edge> edges;  // sorted by (applicant, position)
  Direction direction = Direction::ApplicantProposing;
  PlanCase kind = PlanCase::Complete;
  Index applicant_tier = 0;
  Index position_tier = 0;

  bool operator==(const PlanBatch&) const = default;
};

struct InterviewPlan {
  Index n = 0;
  Index m = 0;
  NonAdaptiveParams params{};
  std::uint64_t seed = 0;
  std::vector<PlanBatch> batches;

  // Number of invariant evaluations performed while building (not serialized).
  std::size_t invariant_checks = 0;

  std::size_t batch_count() const { return batches.size(); }
  std::size_t edge_count() const;

  bool operator==(const InterviewPlan& other) const {
    return n == other.n && m == other.m && params == other.params && seed == other.seed &&
           batches == other.batches;
  }
};

// Builds the interview plan from the market shape alone, so it cannot depend
// on any latent draw. Requires n == m and a tier-dominant shape.
InterviewPlan build_plan(const MarketShape& shape, const NonAdaptiveParams& params, std::uint64_t seed,
                         Deadline deadline = {});

struct DegreeStats {
  std::vector<std::size_t> applicant_degree;
  std::vector<std::size_t> position_degree;
  std::size_t max_applicant = 0;
  std::size_t max_position = 0;
  std::map<std::size_t, std::size_t> histogram;  // degree -> vertex count, both sides

  std::size_t max_degree() const { return std::max(max_applicant, max_position); }
};

DegreeStats plan_degree_stats(const InterviewPlan& plan);

struct ContiguityReport {
  std::vector<Index> applicants;  // vertices whose batch indices are not an interval
  std::vector<Index> positions;
  bool holds() const { return applicants.empty() && positions.empty(); }
};

ContiguityReport check_batch_contiguity(const InterviewPlan& plan);

struct FailureReport {
  std::vector<Index> unmatched_applicants;
  std::vector<Index> unmatched_positions;
  std::vector<BlockingPair> blocking_pairs;
  std::vector<Edge> uninterviewed_matches;

  bool failed() const {
    return !unmatched_applicants.empty() || !unmatched_positions.empty() || !blocking_pairs.empty() ||
           !uninterviewed_matches.empty();
  }
};

struct BatchStats {
  std::size_t proposers = 0;
  std::size_t receivers = 0;
  std::size_t matched = 0;
  std::size_t proposals = 0;
  std::size_t max_rank = 0;  // worst 1-based rank a matched proposer obtained
};

// Short-side vertices of window/random batches that ended matched with a
// positive draw (eta + eps above sup|eta| under the perturbation model).
struct PositivityStats {
  std::size_t participants = 0;
  std::size_t positive = 0;
  double fraction() const { return participants == 0 ? 1.0 : static_cast<double>(positive) / participants; }
};

struct ResolveResult {
  Matching matching;
  InterviewLedger ledger;
  FailureReport failure;
  std::vector<BatchStats> batches;
  PositivityStats positivity;
};

// Interviews every plan edge, then resolves batches in order with deferred
// acceptance restricted to each batch's still-unmatched endpoints.
ResolveResult resolve_plan(const Market& market, const InterviewPlan& plan, Deadline deadline = {});

}  // namespace imatch
