#include <algorithm>
#include <stdexcept>
#include <string>

#include "imatch/interview.hpp"
#include "imatch/matching.hpp"

namespace imatch {

namespace {

void check_pair(Index a, Index p, Index n, Index m) {
  if (a < 0 || a >= n || p < 0 || p >= m) {
    throw std::out_of_range("pair (" + std::to_string(a) + ", " + std::to_string(p) +
                            ") out of range for a " + std::to_string(n) + "x" + std::to_string(m) +
                            " market");
  }
}

}  // namespace

InterviewLedger::InterviewLedger(Index n, Index m)
    : n_(n), m_(m), by_applicant_(static_cast<std::size_t>(n)), by_position_(static_cast<std::size_t>(m)) {
  const auto pairs = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m);
  if (pairs <= kBitsetLimit) bits_.assign(static_cast<std::size_t>((pairs + 63) / 64), 0);
}

bool InterviewLedger::record(Index a, Index p) {
  check_pair(a, p, n_, m_);
  if (!bits_.empty()) {
    const auto bit = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(p);
    auto& word = bits_[bit >> 6];
    const auto mask = std::uint64_t{1} << (bit & 63);
    if (word & mask) return false;
    word |= mask;
  } else if (!keys_.insert(key(a, p)).second) {
    return false;
  }
  order_.push_back(Edge{a, p});
  by_applicant_[a].push_back(p);
  by_position_[p].push_back(a);
  return true;
}

InterviewOutcome conduct_interview(InterviewLedger& ledger, const Market& market, Index a, Index p) {
  check_pair(a, p, market.n(), market.m());
  if (ledger.n() != market.n() || ledger.m() != market.m()) {
    throw std::invalid_argument("ledger and market sizes differ");
  }
  ledger.record(a, p);
  return InterviewOutcome{market.eps_applicant(a, p), market.eps_position(p, a)};
}

double observed_utility_applicant(const Market& market, const InterviewLedger& ledger, Index a, Index p) {
  check_pair(a, p, market.n(), market.m());
  return observed_applicant(market, a, p, ledger.contains(a, p));
}

double observed_utility_position(const Market& market, const InterviewLedger& ledger, Index p, Index a) {
  check_pair(a, p, market.n(), market.m());
  return observed_position(market, p, a, ledger.contains(a, p));
}

// ---------------------------------------------------------------------------
// Matching

void Matching::match(Index a, Index p) {
  check_pair(a, p, n(), m());
  unmatch_applicant(a);
  unmatch_position(p);
  applicant_to_position_[a] = p;
  position_to_applicant_[p] = a;
}

void Matching::unmatch_applicant(Index a) {
  const Index p = applicant_to_position_.at(a);
  if (p == kNone) return;
  applicant_to_position_[a] = kNone;
  position_to_applicant_[p] = kNone;
}

void Matching::unmatch_position(Index p) {
  const Index a = position_to_applicant_.at(p);
  if (a == kNone) return;
  position_to_applicant_[p] = kNone;
  applicant_to_position_[a] = kNone;
}

std::size_t Matching::size() const {
  std::size_t count = 0;
  for (Index p : applicant_to_position_) count += p != kNone;
  return count;
}

bool Matching::perfect() const {
  return size() == static_cast<std::size_t>(std::min(n(), m()));
}

std::vector<Edge> Matching::pairs() const {
  std::vector<Edge> out;
  for (Index a = 0; a < n(); ++a) {
    if (applicant_to_position_[a] != kNone) out.push_back(Edge{a, applicant_to_position_[a]});
  }
  return out;
}

Matching Matching::from_pairs(Index n, Index m, const std::vector<Edge>& pairs) {
  Matching mu(n, m);
  for (const auto& e : pairs) {
    check_pair(e.applicant, e.position, n, m);
    if (mu.applicant_matched(e.applicant) || mu.position_matched(e.position)) {
      throw std::invalid_argument("matching lists agent " +
                                  std::string(mu.applicant_matched(e.applicant) ? "applicant " : "position ") +
                                  std::to_string(mu.applicant_matched(e.applicant) ? e.applicant : e.position) +
                                  " twice");
    }
    mu.match(e.applicant, e.position);
  }
  return mu;
}

}  // namespace imatch
