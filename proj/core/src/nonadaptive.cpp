#include "imatch/nonadaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imatch/da.hpp"
#include "imatch/rng.hpp"

namespace imatch {

std::string_view to_string(Direction d) {
  return d == Direction::ApplicantProposing ? "applicant-proposing" : "position-proposing";
}

Direction parse_direction(std::string_view name) {
  if (name == "applicant-proposing") return Direction::ApplicantProposing;
  if (name == "position-proposing") return Direction::PositionProposing;
  throw std::invalid_argument("unknown proposing direction '" + std::string(name) + "'");
}

NonAdaptiveParams NonAdaptiveParams::scaled(Index n, double delta_coefficient, double theta_coefficient,
                                            LogBase base) {
  if (n < 1) throw ConfigError("non-adaptive parameters need n >= 1");
  if (!(delta_coefficient > 0.0) || !(theta_coefficient > 0.0)) {
    throw ConfigError("delta/theta coefficients must be positive");
  }
  const double l = log_in(base, static_cast<double>(n));
  NonAdaptiveParams p;
  p.log_base = base;
  const double delta = std::ceil(delta_coefficient * l * l);
  const double theta = std::ceil(theta_coefficient * l * l * l);
  p.delta = static_cast<Index>(std::clamp(delta, 1.0, 1e9));
  p.theta = static_cast<Index>(std::clamp(theta, 1.0, 1e9));
  if (p.delta > n) {
    p.delta = n;
    p.out_of_regime = true;
  }
  p.theta = std::max(p.theta, p.delta);
  return p;
}

NonAdaptiveParams NonAdaptiveParams::defaults(Index n, LogBase base) { return scaled(n, 36.0, 72.0, base); }

void NonAdaptiveParams::validate() const {
  if (delta < 1) throw ConfigError("delta must be at least 1");
  if (theta < delta) throw ConfigError("theta must be at least delta");
}

std::size_t InterviewPlan::edge_count() const {
  std::size_t total = 0;
  for (const auto& b : batches) total += b.edges.size();
  return total;
}

namespace {

// Remaining vertices of a tier are always the suffix [begin, end): every
// removal takes the lowest indices.
struct TierState {
  Index begin = 0;
  Index end = 0;
  Index effective = 0;
  Index remaining() const { return end - begin; }
};

std::vector<TierState> initial_states(const TierStructure& tiers) {
  std::vector<TierState> out;
  for (Index l = 0; l < tiers.tier_count(); ++l) {
    out.push_back(TierState{tiers.tier_begin(l), tiers.tier_end(l), tiers.tier_size(l)});
  }
  return out;
}

void check_invariant(const TierState& t, Index theta, std::size_t batch, std::string_view side) {
  if (t.effective < 0 || t.effective > t.remaining() || t.remaining() >= t.effective + theta) {
    throw PlanInvariantError("effective-cardinality invariant broken on " + std::string(side) +
                             " tier after batch " + std::to_string(batch) + ": e=" +
                             std::to_string(t.effective) + " |X|=" + std::to_string(t.remaining()) +
                             " theta=" + std::to_string(theta));
  }
}

}  // namespace

InterviewPlan build_plan(const MarketShape& shape, const NonAdaptiveParams& params, std::uint64_t seed,
                         Deadline deadline) {
  params.validate();
  if (shape.n != shape.m) throw ConfigError("build_plan requires n == m");
  if (!shape.tier_dominant) {
    throw ConfigError("build_plan requires a tiered market (values equal within tiers, dominant across)");
  }
  if (shape.applicant_tiers.size() != shape.n || shape.position_tiers.size() != shape.m) {
    throw ConfigError("tier structures do not match the market size");
  }

  InterviewPlan plan;
  plan.n = shape.n;
  plan.m = shape.m;
  plan.params = params;
  plan.seed = seed;

  const Index delta = params.delta;
  const Index theta = params.theta;
  rng::Stream stream(rng::combine(seed, 0x9a11));

  auto app = initial_states(shape.applicant_tiers);
  auto pos = initial_states(shape.position_tiers);
  std::size_t ta = 0;
  std::size_t tp = 0;

  for (;;) {
    deadline.check();
    while (ta < app.size() && app[ta].remaining() == 0) ++ta;
    while (tp < pos.size() && pos[tp].remaining() == 0) ++tp;
    if (ta == app.size() || tp == pos.size()) break;

    const bool x_is_applicant = app[ta].effective <= pos[tp].effective;
    TierState& x = x_is_applicant ? app[ta] : pos[tp];
    TierState& y = x_is_applicant ? pos[tp] : app[ta];
    const Index ex = x.effective;
    const Index ey = y.effective;
    const Index size_y = y.remaining();

    PlanBatch batch;
    batch.direction = x_is_applicant ? Direction::ApplicantProposing : Direction::PositionProposing;
    batch.applicant_tier = static_cast<Index>(ta);
    batch.position_tier = static_cast<Index>(tp);
    auto add = [&](Index xv, Index yv) {
      batch.edges.push_back(x_is_applicant ? Edge{xv, yv} : Edge{yv, xv});
    };

    if (ey <= delta) {
      batch.kind = PlanCase::Complete;
      for (Index xv = x.begin; xv < x.end; ++xv) {
        for (Index yv = y.begin; yv < y.end; ++yv) add(xv, yv);
      }
      y.effective -= ex;
    } else if (ex <= delta) {
      batch.kind = PlanCase::LowIndexWindow;
      const Index window = delta + size_y - ey;
      for (Index xv = x.begin; xv < x.end; ++xv) {
        for (Index yv = y.begin; yv < y.begin + window; ++yv) add(xv, yv);
      }
      y.effective -= ex;
    } else {
      batch.kind = PlanCase::RandomSubgraph;
      const Index block = ex + size_y - ey;
      const Index picks = delta + size_y - ey;
      for (Index xv = x.begin; xv < x.end; ++xv) {
        auto chosen = stream.sample_without_replacement(static_cast<std::uint32_t>(block),
                                                        static_cast<std::uint32_t>(picks));
        std::sort(chosen.begin(), chosen.end());
        for (auto offset : chosen) add(xv, y.begin + static_cast<Index>(offset));
      }
      y.begin += block;
      y.effective -= ex;
      if (y.effective != y.remaining()) {
        throw PlanInvariantError("random-subgraph step left |Y| != e(Y)");
      }
    }

    x.begin = x.end;
    x.effective = 0;
    if (y.effective == 0) y.begin = y.end;
    if (y.remaining() - y.effective >= theta) {
      // Leave strictly fewer than theta surplus vertices.
      y.begin += y.remaining() - y.effective - theta + 1;
    }

    std::sort(batch.edges.begin(), batch.edges.end());
    plan.batches.push_back(std::move(batch));
    check_invariant(x, theta, plan.batches.size(), x_is_applicant ? "applicant" : "position");
    check_invariant(y, theta, plan.batches.size(), x_is_applicant ? "position" : "applicant");
    plan.invariant_checks += 2;
  }

  for (const auto& t : app) {
    if (t.remaining() != 0) throw PlanInvariantError("plan finished with applicants left over");
  }
  for (const auto& t : pos) {
    if (t.remaining() != 0) throw PlanInvariantError("plan finished with positions left over");
  }

  const auto degrees = plan_degree_stats(plan);
  const auto cap = static_cast<std::size_t>(4) * static_cast<std::size_t>(theta);
  if (degrees.max_degree() > cap) {
    throw PlanInvariantError("plan degree " + std::to_string(degrees.max_degree()) + " exceeds 4*theta = " +
                             std::to_string(cap));
  }
  return plan;
}

DegreeStats plan_degree_stats(const InterviewPlan& plan) {
  DegreeStats stats;
  stats.applicant_degree.assign(static_cast<std::size_t>(plan.n), 0);
  stats.position_degree.assign(static_cast<std::size_t>(plan.m), 0);
  for (const auto& b : plan.batches) {
    for (const auto& e : b.edges) {
      ++stats.applicant_degree.at(e.applicant);
      ++stats.position_degree.at(e.position);
    }
  }
  for (auto d : stats.applicant_degree) {
    stats.max_applicant = std::max(stats.max_applicant, d);
    ++stats.histogram[d];
  }
  for (auto d : stats.position_degree) {
    stats.max_position = std::max(stats.max_position, d);
    ++stats.histogram[d];
  }
  return stats;
}

ContiguityReport check_batch_contiguity(const InterviewPlan& plan) {
  // Per vertex: first batch, last batch and number of distinct batches.
  struct Span {
    long first = -1;
    long last = -1;
    long count = 0;
  };
  std::vector<Span> apps(static_cast<std::size_t>(plan.n));
  std::vector<Span> poss(static_cast<std::size_t>(plan.m));
  auto touch = [](Span& s, long batch) {
    if (s.last == batch) return;
    if (s.first < 0) s.first = batch;
    s.last = batch;
    ++s.count;
  };
  for (std::size_t k = 0; k < plan.batches.size(); ++k) {
    for (const auto& e : plan.batches[k].edges) {
      touch(apps.at(e.applicant), static_cast<long>(k));
      touch(poss.at(e.position), static_cast<long>(k));
    }
  }
  ContiguityReport report;
  for (Index a = 0; a < plan.n; ++a) {
    const auto& s = apps[a];
    if (s.count > 0 && s.last - s.first + 1 != s.count) report.applicants.push_back(a);
  }
  for (Index p = 0; p < plan.m; ++p) {
    const auto& s = poss[p];
    if (s.count > 0 && s.last - s.first + 1 != s.count) report.positions.push_back(p);
  }
  return report;
}

ResolveResult resolve_plan(const Market& market, const InterviewPlan& plan, Deadline deadline) {
  if (plan.n != market.n() || plan.m != market.m()) {
    throw std::invalid_argument("plan is for a " + std::to_string(plan.n) + "x" + std::to_string(plan.m) +
                                " market, got " + std::to_string(market.n()) + "x" +
                                std::to_string(market.m()));
  }
  const Index n = market.n();
  const Index m = market.m();
  ResolveResult result{Matching(n, m), InterviewLedger(n, m), {}, {}, {}};
  auto& mu = result.matching;
  auto& ledger = result.ledger;

  for (const auto& b : plan.batches) {
    for (const auto& e : b.edges) conduct_interview(ledger, market, e.applicant, e.position);
  }

  const bool eta = market.eta_enabled();
  const double eta_bar = market.config().utility.eta.bound();
  auto positive_for_applicant = [&](Index a, Index p) {
    return eta ? market.eta_applicant(a, p) + market.eps_applicant(a, p) > eta_bar
               : market.eps_applicant(a, p) > 0.0;
  };
  auto positive_for_position = [&](Index p, Index a) {
    return eta ? market.eta_position(p, a) + market.eps_position(p, a) > eta_bar
               : market.eps_position(p, a) > 0.0;
  };

  std::vector<Index> local_app(static_cast<std::size_t>(n), kNone);
  std::vector<Index> local_pos(static_cast<std::size_t>(m), kNone);

  for (const auto& b : plan.batches) {
    deadline.check();
    std::vector<Index> apps;
    std::vector<Index> poss;
    for (const auto& e : b.edges) {
      if (mu.applicant_matched(e.applicant) || mu.position_matched(e.position)) continue;
      if (local_app[e.applicant] == kNone) {
        local_app[e.applicant] = static_cast<Index>(apps.size());
        apps.push_back(e.applicant);
      }
      if (local_pos[e.position] == kNone) {
        local_pos[e.position] = static_cast<Index>(poss.size());
        poss.push_back(e.position);
      }
    }

    const bool applicants_propose = b.direction == Direction::ApplicantProposing;
    const auto& proposers = applicants_propose ? apps : poss;
    const auto& receivers = applicants_propose ? poss : apps;
    PreferenceTable table;
    table.proposer_count = static_cast<Index>(proposers.size());
    table.receiver_count = static_cast<Index>(receivers.size());
    table.proposer_lists.resize(proposers.size());
    for (const auto& e : b.edges) {
      const Index la = local_app[e.applicant];
      const Index lp = local_pos[e.position];
      if (la == kNone || lp == kNone) continue;
      if (applicants_propose) {
        table.proposer_lists[la].push_back(lp);
      } else {
        table.proposer_lists[lp].push_back(la);
      }
    }
    // Proposers rank by observed utility, lower global index first on ties.
    for (std::size_t x = 0; x < proposers.size(); ++x) {
      auto& list = table.proposer_lists[x];
      const Index gx = proposers[x];
      std::vector<std::pair<double, Index>> keyed;
      keyed.reserve(list.size());
      for (Index r : list) {
        const Index gr = receivers[r];
        const double v = applicants_propose ? observed_utility_applicant(market, ledger, gx, gr)
                                            : observed_utility_position(market, ledger, gx, gr);
        keyed.emplace_back(v, r);
      }
      std::sort(keyed.begin(), keyed.end(), [&](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return receivers[l.second] < receivers[r.second];
      });
      for (std::size_t k = 0; k < keyed.size(); ++k) list[k] = keyed[k].second;
    }
    table.receiver_prefers = [&](Index r, Index x, Index y) {
      const Index gr = receivers[r];
      const Index gx = proposers[x];
      const Index gy = proposers[y];
      const double vx = applicants_propose ? observed_utility_position(market, ledger, gr, gx)
                                           : observed_utility_applicant(market, ledger, gr, gx);
      const double vy = applicants_propose ? observed_utility_position(market, ledger, gr, gy)
                                           : observed_utility_applicant(market, ledger, gr, gy);
      return vx > vy || (vx == vy && gx < gy);
    };

    const auto outcome = deferred_acceptance(table);
    BatchStats stats;
    stats.proposers = proposers.size();
    stats.receivers = receivers.size();
    stats.proposals = outcome.proposal_count_total;
    for (std::size_t x = 0; x < proposers.size(); ++x) {
      const Index r = outcome.proposer_match[x];
      if (r == kNone) continue;
      ++stats.matched;
      stats.max_rank = std::max(stats.max_rank, outcome.proposer_rank[x]);
      const Index a = applicants_propose ? proposers[x] : receivers[r];
      const Index p = applicants_propose ? receivers[r] : proposers[x];
      mu.match(a, p);
    }
    result.batches.push_back(stats);

    if (b.kind != PlanCase::Complete) {
      // Short side = proposing side.
      for (Index gx : proposers) {
        ++result.positivity.participants;
        if (applicants_propose) {
          const Index p = mu.position_of(gx);
          if (p != kNone && positive_for_applicant(gx, p)) ++result.positivity.positive;
        } else {
          const Index a = mu.applicant_of(gx);
          if (a != kNone && positive_for_position(gx, a)) ++result.positivity.positive;
        }
      }
    }

    for (Index a : apps) local_app[a] = kNone;
    for (Index p : poss) local_pos[p] = kNone;
  }

  auto verdict = verify(market, ledger, mu);
  result.failure.unmatched_applicants = std::move(verdict.unmatched_applicants);
  result.failure.unmatched_positions = std::move(verdict.unmatched_positions);
  result.failure.blocking_pairs = std::move(verdict.blocking_pairs);
  result.failure.uninterviewed_matches = std::move(verdict.uninterviewed_matches);
  return result;
}

}  // namespace imatch
