#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imatch/common.hpp"
#include "imatch/interview.hpp"
#include "imatch/market.hpp"
#include "imatch/matching.hpp"

namespace imatch {

enum class TraceKind { Interview, Reject, TentativeMatch, Displace };

std::string_view to_string(TraceKind kind);
TraceKind parse_trace_kind(std::string_view name);

// One step of the adaptive run. Observed values are taken right after the
// event: applicant_observed = v^o(applicant, position), position_observed =
// u^o(position, applicant).
struct TraceEvent {
  TraceKind kind = TraceKind::Interview;
  Index applicant = kNone;
  Index position = kNone;
  std::size_t iteration = 0;
  double applicant_observed = 0.0;
  double position_observed = 0.0;

  bool operator==(const TraceEvent&) const = default;
};

// Fixed-size bit matrix of (applicant, position) rejections.
class RejectionSets {
 public:
  RejectionSets() = default;
  RejectionSets(Index n, Index m);

  bool contains(Index a, Index p) const {
    const auto bit = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(p);
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  void add(Index a, Index p) {
    const auto bit = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(p);
    words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
  }

 private:
  Index m_ = 0;
  std::vector<std::uint64_t> words_;
};

// Run state of the interview-augmented deferred acceptance.
struct AdaptiveState {
  Matching matching;
  InterviewLedger ledger;
  RejectionSets rejected;
  std::vector<TraceEvent> trace;

  explicit AdaptiveState(const Market& market)
      : matching(market.n(), market.m()),
        ledger(market.n(), market.m()),
        rejected(market.n(), market.m()) {}
};

// Positions ranked by observed utility; equal values go to the lower index.
inline bool applicant_prefers(double value_x, Index x, double value_y, Index y) {
  return value_x > value_y || (value_x == value_y && x < y);
}
// Applicants ranked by observed utility; equal values go to the lower index.
inline bool position_prefers(double value_x, Index x, double value_y, Index y) {
  return value_x > value_y || (value_x == value_y && x < y);
}

// beta(a): the applicant's best position that has not rejected it, by
// observed utility. Throws std::logic_error if every position rejected a.
Index next_proposal_target(const AdaptiveState& state, const Market& market, Index a);

struct AdaptiveOptions {
  bool record_trace = true;
  // Reject events dominate the trace (about n^2/2 of them) and the monitors
  // do not read them.
  bool trace_rejections = true;
  Deadline deadline{};
};

struct AdaptiveResult {
  Matching matching;
  InterviewLedger ledger;
  std::vector<TraceEvent> trace;
  std::size_t iterations = 0;
  std::size_t rejections = 0;
};

// Interview-augmented applicant-proposing deferred acceptance. Requires
// n == m and the eta extension disabled. Deterministic given the market.
AdaptiveResult adaptive_match(const Market& market, AdaptiveOptions options = {});

// ---------------------------------------------------------------------------
// Trace monitors

enum class HardRule {
  // An unmatched position interviewing its favourite proposer with both draws
  // non-negative must tentatively match it on the next step.
  PositiveInterviewMatches,
  // After such a match, the position only interviews indices below
  // max(i, j + 1).
  PositiveInterviewWindow,
  // A position interviewing a lower-indexed applicant a_i (i < j) implies a_i
  // was already interviewed by every position i..j-1.
  ConsecutiveInterviews,
};

std::string_view to_string(HardRule rule);

struct HardViolation {
  HardRule rule;
  std::size_t event_index = 0;
  Index applicant = kNone;
  Index position = kNone;
};

struct MonitorOptions {
  LogBase log_base = LogBase::Natural;
  double upward_coefficient = 8.0;      // interviews with i > j + c * log n
  double downward_coefficient = 2000.0;  // interviews with j > i + c * log^2 n
};

struct MonitorReport {
  std::vector<HardViolation> violations;
  std::size_t interviews = 0;
  std::size_t upward_window_violations = 0;
  std::size_t downward_window_violations = 0;
  Index max_upward_gap = 0;    // max over interviews of i - j
  Index max_downward_gap = 0;  // max over interviews of j - i
  double upward_window = 0.0;
  double downward_window = 0.0;

  std::size_t hard_violation_count() const { return violations.size(); }
  std::size_t count(HardRule rule) const;
};

// Replays the trace against the market. Throws std::invalid_argument when the
// trace does not belong to the market.
MonitorReport check_trace_monitors(std::span<const TraceEvent> trace, const Market& market,
                                   MonitorOptions options = {});

}  // namespace imatch
