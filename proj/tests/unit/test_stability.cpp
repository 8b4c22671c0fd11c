#include <algorithm>
#include <set>

#include "doctest.h"
#include "imatch/adaptive.hpp"
#include "imatch/da.hpp"
#include "imatch/stability.hpp"
#include "imatch/rng.hpp"
#include "support.hpp"

using namespace imatch;

namespace {

InterviewLedger complete_ledger(Index n, Index m) {
  InterviewLedger l(n, m);
  for (Index a = 0; a < n; ++a)
    for (Index p = 0; p < m; ++p) l.record(a, p);
  return l;
}

// Applicant-proposing DA on true utilities, as a matching.
Matching full_information_da(const Market& mk) {
  PreferenceTable t;
  t.proposer_count = mk.n();
  t.receiver_count = mk.m();
  t.proposer_lists.resize(mk.n());
  for (Index a = 0; a < mk.n(); ++a) {
    auto& l = t.proposer_lists[a];
    for (Index p = 0; p < mk.m(); ++p) l.push_back(p);
    std::sort(l.begin(), l.end(), [&](Index x, Index y) {
      return applicant_prefers(mk.position_value(x) + mk.eps_applicant(a, x), x,
                               mk.position_value(y) + mk.eps_applicant(a, y), y);
    });
  }
  t.receiver_prefers = [&](Index p, Index x, Index y) {
    return position_prefers(mk.applicant_value(x) + mk.eps_position(p, x), x, mk.applicant_value(y) + mk.eps_position(p, y),
                            y);
  };
  const auto out = deferred_acceptance(t);
  std::vector<Edge> pairs;
  for (Index a = 0; a < mk.n(); ++a)
    if (out.proposer_match[a] != kNone) pairs.push_back({a, out.proposer_match[a]});
  return Matching::from_pairs(mk.n(), mk.m(), pairs);
}

// Blocking pairs straight from the definition.
std::set<std::pair<Index, Index>> naive_blocking(const Market& mk, const InterviewLedger& l, const Matching& mu) {
  std::set<std::pair<Index, Index>> out;
  for (Index a = 0; a < mk.n(); ++a) {
    for (Index p = 0; p < mk.m(); ++p) {
      if (mu.position_of(a) == p) continue;
      const bool a_wants = !mu.applicant_matched(a) || observed_utility_applicant(mk, l, a, p) >
                                                           observed_utility_applicant(mk, l, a, mu.position_of(a));
      const bool p_wants = !mu.position_matched(p) || observed_utility_position(mk, l, p, a) >
                                                          observed_utility_position(mk, l, p, mu.applicant_of(p));
      if (a_wants && p_wants) out.insert({a, p});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("full-information deferred acceptance is interim stable") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 16);
    const auto kind = test::kAdaptiveScenarios[seed % 5];
    const auto mk = test::scenario_market(kind, n, seed);
    const auto l = complete_ledger(n, n);
    const auto v = verify(mk, l, full_information_da(mk));
    REQUIRE(v.is_interim_stable);
    REQUIRE(v.unmatched_applicants.empty());
  }
}

TEST_CASE("swap-preferring pairs block") {
  // Public values tie, so only the draws matter. a0 and p1 like each other
  // more than their partners; a1 and p0 do not.
  const auto mk = test::explicit_market({0, 0}, {0, 0}, {0.1, 0.5, 0.6, 0.2}, {0.3, 0.2, 0.7, 0.1},
                                        TierStructure({0, 2}), TierStructure({0, 2}));
  const auto l = complete_ledger(2, 2);
  const auto mu = Matching::from_pairs(2, 2, {{0, 0}, {1, 1}});
  const auto v = verify(mk, l, mu);
  REQUIRE(v.blocking_pairs.size() == 1);
  CHECK(v.blocking_pairs[0].applicant == 0);
  CHECK(v.blocking_pairs[0].position == 1);
  CHECK(v.blocking_pairs[0].applicant_value_for_position == doctest::Approx(0.5));
  CHECK(*v.blocking_pairs[0].applicant_value_for_partner == doctest::Approx(0.1));
  CHECK(v.blocking_pairs[0].position_value_for_applicant == doctest::Approx(0.7));
  CHECK(*v.blocking_pairs[0].position_value_for_partner == doctest::Approx(0.1));
  CHECK_FALSE(v.is_interim_stable);
}

TEST_CASE("uninterviewed matches are flagged") {
  const auto mk = test::explicit_market({1}, {1}, {}, {});
  const InterviewLedger empty(1, 1);
  const auto v = verify(mk, empty, Matching::from_pairs(1, 1, {{0, 0}}));
  CHECK(v.uninterviewed_matches == std::vector<Edge>{{0, 0}});
  CHECK(v.blocking_pairs.empty());
  CHECK_FALSE(v.is_interim_stable);
}

TEST_CASE("ties never block and unmatched is worst") {
  const auto mk = test::explicit_market({0, 0}, {0, 0}, {}, {}, TierStructure({0, 2}), TierStructure({0, 2}));
  const auto l = complete_ledger(2, 2);
  CHECK(verify(mk, l, Matching::from_pairs(2, 2, {{0, 0}, {1, 1}})).is_interim_stable);
  const auto partial = verify(mk, l, Matching::from_pairs(2, 2, {{0, 0}}));
  CHECK(partial.blocking_pairs.size() == 1);
  CHECK(partial.unmatched_applicants == std::vector<Index>{1});
  CHECK(partial.unmatched_positions == std::vector<Index>{1});
}

TEST_CASE("verify agrees with the definition") {
  rng::Stream s(5);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 6);
    const auto mk = test::scenario_market(test::kAdaptiveScenarios[seed % 5], n, seed);
    InterviewLedger l(n, n);
    for (Index a = 0; a < n; ++a)
      for (Index p = 0; p < n; ++p)
        if (s.below(2) == 0) l.record(a, p);
    Matching mu(n, n);
    const auto perm = s.sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n));
    for (Index a = 0; a < n; ++a)
      if (s.below(4) != 0) mu.match(a, static_cast<Index>(perm[a]));
    const auto v = verify(mk, l, mu);
    std::set<std::pair<Index, Index>> got;
    for (const auto& b : v.blocking_pairs) got.insert({b.applicant, b.position});
    REQUIRE(got == naive_blocking(mk, l, mu));
    REQUIRE(v == verify(mk, l, mu));
  }
}

TEST_CASE("enumeration of the 2x2 instance") {
  // Applicants both prefer p0; positions both prefer a1. Unique stable matching {a1-p0, a0-p1}.
  const auto mk = test::explicit_market({0, 0}, {0, 0}, {0.9, 0.1, 0.8, 0.2}, {0.1, 0.9, 0.2, 0.8},
                                        TierStructure({0, 2}), TierStructure({0, 2}));
  const auto all = enumerate_interim_stable(mk, complete_ledger(2, 2));
  REQUIRE(all.size() == 1);
  CHECK(all[0].position_of(1) == 0);
  // Opposed preferences give two stable matchings.
  const auto opposed = test::explicit_market({0, 0}, {0, 0}, {0.9, 0.1, 0.1, 0.9}, {0.1, 0.9, 0.9, 0.1},
                                             TierStructure({0, 2}), TierStructure({0, 2}));
  CHECK(enumerate_interim_stable(opposed, complete_ledger(2, 2)).size() == 2);
}

TEST_CASE("enumeration needs interviews and small markets") {
  const auto mk = test::scenario_market(TierScenario::SingleTier, 3, 1);
  CHECK(enumerate_interim_stable(mk, InterviewLedger(3, 3)).empty());
  const auto big = test::scenario_market(TierScenario::SingleTier, 8, 1);
  CHECK_THROWS_AS(enumerate_interim_stable(big, InterviewLedger(8, 8)), std::invalid_argument);
}

TEST_CASE("adaptive output belongs to the enumerated set") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 5);
    const auto mk = test::scenario_market(test::kAdaptiveScenarios[seed % 5], n, seed);
    const auto r = adaptive_match(mk);
    const auto all = enumerate_interim_stable(mk, r.ledger);
    REQUIRE(std::find(all.begin(), all.end(), r.matching) != all.end());
  }
}
