#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "imatch/interview.hpp"
#include "imatch/market.hpp"
#include "imatch/matching.hpp"

namespace imatch {

// A pair that strictly prefers each other to their partners under observed
// utilities. Current values are empty for an unmatched side.
struct BlockingPair {
  Index applicant = kNone;
  Index position = kNone;
  double applicant_value_for_position = 0.0;
  std::optional<double> applicant_value_for_partner;
  double position_value_for_applicant = 0.0;
  std::optional<double> position_value_for_partner;

  bool operator==(const BlockingPair&) const = default;
};

struct StabilityVerdict {
  bool is_interim_stable = true;
  std::vector<BlockingPair> blocking_pairs;   // sorted by (applicant, position)
  std::vector<Edge> uninterviewed_matches;    // sorted by applicant
  std::vector<Index> unmatched_applicants;
  std::vector<Index> unmatched_positions;

  bool operator==(const StabilityVerdict&) const = default;
};

// Exact O(n*m) interim-stability check. Being unmatched is worse than any
// partner; ties never block.
StabilityVerdict verify(const Market& market, const InterviewLedger& ledger, const Matching& matching);

inline constexpr Index kEnumerationLimit = 7;

// Brute force over every matching of size min(n, m) supported by the ledger,
// keeping the interim-stable ones. Throws std::invalid_argument above the
// size limit.
std::vector<Matching> enumerate_interim_stable(const Market& market, const InterviewLedger& ledger);

}  // namespace imatch
