#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "imatch/market.hpp"

namespace imatch {

// Restricted preferences for one deferred-acceptance run. Proposers list the
// receivers they accept, best first; any pair not listed is mutually
// unacceptable. Receivers rank proposers through a strict comparator.
struct PreferenceTable {
  Index proposer_count = 0;
  Index receiver_count = 0;
  std::vector<std::vector<Index>> proposer_lists;
  // receiver_prefers(r, x, y): receiver r strictly prefers proposer x to y.
  std::function<bool(Index, Index, Index)> receiver_prefers;

  // Throws std::invalid_argument on bad indices, duplicates or size mismatch.
  void validate() const;
};

enum class ProposalScheduler { Fifo, Stack };

struct DAOptions {
  ProposalScheduler scheduler = ProposalScheduler::Fifo;
  bool record_log = false;
};

struct Proposal {
  Index proposer = kNone;
  Index receiver = kNone;
  bool accepted = false;

  bool operator==(const Proposal&) const = default;
};

struct DAOutcome {
  std::vector<Index> proposer_match;  // receiver or kNone
  std::vector<Index> receiver_match;  // proposer or kNone
  std::vector<std::size_t> proposer_rank;  // 1-based rank of the match, 0 when unmatched
  std::size_t proposal_count_total = 0;
  std::vector<std::size_t> proposals_per_receiver;
  std::vector<Proposal> proposal_log;  // only with DAOptions::record_log
};

// Proposer-optimal stable matching with respect to the restricted table.
DAOutcome deferred_acceptance(const PreferenceTable& prefs, DAOptions options = {});

// 1-based position of the proposer's partner in its own list.
std::optional<std::size_t> rank_of_match(const DAOutcome& outcome, Index proposer);

}  // namespace imatch
