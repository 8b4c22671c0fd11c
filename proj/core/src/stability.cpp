#include "imatch/stability.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace imatch {

StabilityVerdict verify(const Market& market, const InterviewLedger& ledger, const Matching& matching) {
  const Index n = market.n();
  const Index m = market.m();
  if (matching.n() != n || matching.m() != m || ledger.n() != n || ledger.m() != m) {
    throw std::invalid_argument("verify: market, ledger and matching sizes differ");
  }
  for (Index a = 0; a < n; ++a) {
    const Index p = matching.position_of(a);
    if (p != kNone && matching.applicant_of(p) != a) {
      throw std::invalid_argument("verify: matching is not a mutual assignment");
    }
  }

  StabilityVerdict verdict;
  // Position side thresholds: u^o of the current partner, -inf when unmatched.
  std::vector<double> position_threshold(static_cast<std::size_t>(m), -std::numeric_limits<double>::infinity());
  for (Index p = 0; p < m; ++p) {
    const Index a = matching.applicant_of(p);
    if (a == kNone) {
      verdict.unmatched_positions.push_back(p);
    } else {
      position_threshold[p] = observed_utility_position(market, ledger, p, a);
    }
  }

  std::vector<char> row(static_cast<std::size_t>(m), 0);
  for (Index a = 0; a < n; ++a) {
    for (Index p : ledger.positions_of(a)) row[p] = 1;
    const Index partner = matching.position_of(a);
    std::optional<double> current;
    if (partner == kNone) {
      verdict.unmatched_applicants.push_back(a);
    } else {
      current = observed_applicant(market, a, partner, row[partner] != 0);
      if (!row[partner]) verdict.uninterviewed_matches.push_back(Edge{a, partner});
    }
    for (Index p = 0; p < m; ++p) {
      if (p == partner) continue;
      const bool met = row[p] != 0;
      const double va = observed_applicant(market, a, p, met);
      if (current && !(va > *current)) continue;
      const double up = observed_position(market, p, a, met);
      if (!(up > position_threshold[p])) continue;
      const Index holder = matching.applicant_of(p);
      std::optional<double> held;
      if (holder != kNone) held = position_threshold[p];
      verdict.blocking_pairs.push_back(BlockingPair{a, p, va, current, up, held});
    }
    for (Index p : ledger.positions_of(a)) row[p] = 0;
  }
  verdict.is_interim_stable = verdict.blocking_pairs.empty() && verdict.uninterviewed_matches.empty();
  return verdict;
}

namespace {

void enumerate(const Market& market, const InterviewLedger& ledger, bool applicants_first, Index depth,
               Matching& current, std::vector<Matching>& out) {
  const Index rows = applicants_first ? market.n() : market.m();
  const Index cols = applicants_first ? market.m() : market.n();
  if (depth == rows) {
    if (verify(market, ledger, current).is_interim_stable) out.push_back(current);
    return;
  }
  for (Index c = 0; c < cols; ++c) {
    const Index a = applicants_first ? depth : c;
    const Index p = applicants_first ? c : depth;
    if (!ledger.contains(a, p)) continue;
    if (applicants_first ? current.position_matched(p) : current.applicant_matched(a)) continue;
    current.match(a, p);
    enumerate(market, ledger, applicants_first, depth + 1, current, out);
    if (applicants_first) {
      current.unmatch_applicant(a);
    } else {
      current.unmatch_position(p);
    }
  }
}

}  // namespace

std::vector<Matching> enumerate_interim_stable(const Market& market, const InterviewLedger& ledger) {
  if (market.n() > kEnumerationLimit || market.m() > kEnumerationLimit) {
    throw std::invalid_argument("enumerate_interim_stable supports at most " +
                                std::to_string(kEnumerationLimit) + " agents per side");
  }
  std::vector<Matching> out;
  Matching current(market.n(), market.m());
  enumerate(market, ledger, market.n() <= market.m(), 0, current, out);
  return out;
}

}  // namespace imatch
