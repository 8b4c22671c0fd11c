#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "imatch/interview.hpp"
#include "imatch/market.hpp"

namespace imatch {

// Partial one-to-one assignment. Both directions are kept in sync by every
// mutator, so they are always mutual inverses.
class Matching {
 public:
  Matching() = default;
  Matching(Index n, Index m)
      : applicant_to_position_(static_cast<std::size_t>(n), kNone),
        position_to_applicant_(static_cast<std::size_t>(m), kNone) {}

  Index n() const { return static_cast<Index>(applicant_to_position_.size()); }
  Index m() const { return static_cast<Index>(position_to_applicant_.size()); }

  Index position_of(Index a) const { return applicant_to_position_.at(a); }
  Index applicant_of(Index p) const { return position_to_applicant_.at(p); }
  bool applicant_matched(Index a) const { return position_of(a) != kNone; }
  bool position_matched(Index p) const { return applicant_of(p) != kNone; }

  // Matches a and p, releasing any previous partners of either.
  void match(Index a, Index p);
  void unmatch_applicant(Index a);
  void unmatch_position(Index p);

  std::size_t size() const;
  bool perfect() const;
  // Matched pairs sorted by applicant.
  std::vector<Edge> pairs() const;

  static Matching from_pairs(Index n, Index m, const std::vector<Edge>& pairs);

  bool operator==(const Matching&) const = default;

 private:
  std::vector<Index> applicant_to_position_;
  std::vector<Index> position_to_applicant_;
};

}  // namespace imatch
