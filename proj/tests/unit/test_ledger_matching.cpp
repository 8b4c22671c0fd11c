#include "doctest.h"
#include "imatch/interview.hpp"
#include "imatch/matching.hpp"

using namespace imatch;

TEST_CASE("ledger keeps the first occurrence only") {
  InterviewLedger l(3, 4);
  CHECK(l.record(0, 3));
  CHECK(l.record(2, 1));
  CHECK_FALSE(l.record(0, 3));
  CHECK(l.size() == 2);
  CHECK(l.contains(0, 3));
  CHECK_FALSE(l.contains(3 - 3, 1));
  CHECK(l.order()[1] == Edge{2, 1});
  CHECK(l.positions_of(0).size() == 1);
  CHECK(l.applicants_of(1)[0] == 2);
  CHECK_THROWS(l.record(3, 0));
  CHECK_THROWS(l.record(0, -1));
}

TEST_CASE("ledger beyond the bitset limit") {
  InterviewLedger l(20000, 20000);
  CHECK(l.record(19999, 19998));
  CHECK(l.contains(19999, 19998));
  CHECK_FALSE(l.contains(19998, 19999));
  CHECK_FALSE(l.record(19999, 19998));
}

TEST_CASE("matching stays mutually consistent") {
  Matching mu(3, 3);
  mu.match(0, 1);
  mu.match(1, 2);
  CHECK(mu.applicant_of(1) == 0);
  mu.match(0, 2);  // releases a1 and p1
  CHECK(mu.position_of(0) == 2);
  CHECK(mu.applicant_of(2) == 0);
  CHECK(mu.position_of(1) == kNone);
  CHECK(mu.applicant_of(1) == kNone);
  CHECK(mu.size() == 1);
  mu.unmatch_position(2);
  CHECK(mu.size() == 0);
  CHECK_FALSE(mu.perfect());
}

TEST_CASE("matching from pairs") {
  const auto mu = Matching::from_pairs(2, 3, {{1, 0}, {0, 2}});
  CHECK(mu.pairs() == std::vector<Edge>{{0, 2}, {1, 0}});
  CHECK_THROWS(Matching::from_pairs(2, 2, {{0, 0}, {1, 0}}));
  CHECK_THROWS(Matching::from_pairs(2, 2, {{0, 0}, {0, 1}}));
  CHECK_THROWS(Matching::from_pairs(2, 2, {{2, 0}}));
}
