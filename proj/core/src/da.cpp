#include "imatch/da.hpp"

#include <deque>
#include <stdexcept>
#include <string>

namespace imatch {

void PreferenceTable::validate() const {
  if (proposer_count < 0 || receiver_count < 0) throw std::invalid_argument("negative side size");
  if (proposer_lists.size() != static_cast<std::size_t>(proposer_count)) {
    throw std::invalid_argument("proposer_lists must have proposer_count entries");
  }
  if (!receiver_prefers) throw std::invalid_argument("receiver comparator missing");
  std::vector<Index> seen(static_cast<std::size_t>(receiver_count), kNone);
  for (Index x = 0; x < proposer_count; ++x) {
    for (Index r : proposer_lists[x]) {
      if (r < 0 || r >= receiver_count) {
        throw std::invalid_argument("proposer " + std::to_string(x) + " lists invalid receiver " +
                                    std::to_string(r));
      }
      if (seen[r] == x) {
        throw std::invalid_argument("proposer " + std::to_string(x) + " lists receiver " +
                                    std::to_string(r) + " twice");
      }
      seen[r] = x;
    }
  }
}

DAOutcome deferred_acceptance(const PreferenceTable& prefs, DAOptions options) {
  prefs.validate();
  const auto np = static_cast<std::size_t>(prefs.proposer_count);
  const auto nr = static_cast<std::size_t>(prefs.receiver_count);

  DAOutcome out;
  out.proposer_match.assign(np, kNone);
  out.receiver_match.assign(nr, kNone);
  out.proposer_rank.assign(np, 0);
  out.proposals_per_receiver.assign(nr, 0);

  std::vector<std::size_t> next(np, 0);
  std::deque<Index> free;
  for (Index x = 0; x < prefs.proposer_count; ++x) free.push_back(x);

  auto pop = [&] {
    Index x;
    if (options.scheduler == ProposalScheduler::Fifo) {
      x = free.front();
      free.pop_front();
    } else {
      x = free.back();
      free.pop_back();
    }
    return x;
  };

  while (!free.empty()) {
    const Index x = pop();
    const auto& list = prefs.proposer_lists[x];
    bool settled = false;
    while (!settled && next[x] < list.size()) {
      const Index r = list[next[x]++];
      ++out.proposal_count_total;
      ++out.proposals_per_receiver[r];
      const Index holder = out.receiver_match[r];
      const bool accept = holder == kNone || prefs.receiver_prefers(r, x, holder);
      if (options.record_log) out.proposal_log.push_back(Proposal{x, r, accept});
      if (!accept) continue;
      if (holder != kNone) {
        out.proposer_match[holder] = kNone;
        out.proposer_rank[holder] = 0;
        free.push_back(holder);
      }
      out.receiver_match[r] = x;
      out.proposer_match[x] = r;
      out.proposer_rank[x] = next[x];
      settled = true;
    }
  }
  return out;
}

std::optional<std::size_t> rank_of_match(const DAOutcome& outcome, Index proposer) {
  const auto rank = outcome.proposer_rank.at(proposer);
  if (rank == 0) return std::nullopt;
  return rank;
}

}  // namespace imatch
