#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "imatch/market.hpp"

namespace imatch {

struct Edge {
  Index applicant = kNone;
  Index position = kNone;

  auto operator<=>(const Edge&) const = default;
};

// Append-only record of conducted interviews. Gates which latent draws are
// visible through the observed-utility functions.
class InterviewLedger {
 public:
  InterviewLedger() = default;
  InterviewLedger(Index n, Index m);

  Index n() const { return n_; }
  Index m() const { return m_; }

  bool contains(Index a, Index p) const {
    if (!bits_.empty()) {
      const auto bit = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(p);
      return (bits_[bit >> 6] >> (bit & 63)) & 1u;
    }
    return keys_.contains(key(a, p));
  }
  // Returns false (and changes nothing) when the pair was already recorded.
  bool record(Index a, Index p);

  std::span<const Edge> order() const { return order_; }
  std::size_t size() const { return order_.size(); }

  std::span<const Index> positions_of(Index a) const { return by_applicant_[a]; }
  std::span<const Index> applicants_of(Index p) const { return by_position_[p]; }

 private:
  static std::uint64_t key(Index a, Index p) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(p);
  }

  Index n_ = 0;
  Index m_ = 0;
  // Bitset for markets up to kBitsetLimit pairs, hash set beyond.
  static constexpr std::uint64_t kBitsetLimit = std::uint64_t{1} << 28;
  std::vector<std::uint64_t> bits_;
  std::unordered_set<std::uint64_t> keys_;
  std::vector<Edge> order_;
  std::vector<std::vector<Index>> by_applicant_;
  std::vector<std::vector<Index>> by_position_;
};

struct InterviewOutcome {
  double eps_applicant = 0.0;
  double eps_position = 0.0;

  bool operator==(const InterviewOutcome&) const = default;
};

// Records (a, p) and reveals both latent draws. Idempotent.
InterviewOutcome conduct_interview(InterviewLedger& ledger, const Market& market, Index a, Index p);

// v_p (+ eta^A_ap) before the interview, plus eps^A_ap after it.
double observed_utility_applicant(const Market& market, const InterviewLedger& ledger, Index a, Index p);
// u_a (+ eta^P_pa) before the interview, plus eps^P_pa after it.
double observed_utility_position(const Market& market, const InterviewLedger& ledger, Index p, Index a);

// Same as above with the interview status supplied by the caller.
inline double observed_applicant(const Market& market, Index a, Index p, bool interviewed) {
  double v = market.position_value(p) + market.eta_applicant(a, p);
  if (interviewed) v += market.eps_applicant(a, p);
  return v;
}

inline double observed_position(const Market& market, Index p, Index a, bool interviewed) {
  double u = market.applicant_value(a) + market.eta_position(p, a);
  if (interviewed) u += market.eps_position(p, a);
  return u;
}

}  // namespace imatch
