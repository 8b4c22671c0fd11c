#include "imatch/adaptive.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

namespace imatch {

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Interview: return "interview";
    case TraceKind::Reject: return "reject";
    case TraceKind::TentativeMatch: return "match";
    case TraceKind::Displace: return "displace";
  }
  return "?";
}

TraceKind parse_trace_kind(std::string_view name) {
  if (name == "interview") return TraceKind::Interview;
  if (name == "reject") return TraceKind::Reject;
  if (name == "match") return TraceKind::TentativeMatch;
  if (name == "displace") return TraceKind::Displace;
  throw std::invalid_argument("unknown trace event kind '" + std::string(name) + "'");
}

RejectionSets::RejectionSets(Index n, Index m)
    : m_(m), words_((static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m) + 63) / 64, 0) {}

Index next_proposal_target(const AdaptiveState& state, const Market& market, Index a) {
  Index best = kNone;
  double best_value = 0.0;
  for (Index p = 0; p < market.m(); ++p) {
    if (state.rejected.contains(a, p)) continue;
    const double v = observed_utility_applicant(market, state.ledger, a, p);
    if (best == kNone || applicant_prefers(v, p, best_value, best)) {
      best = p;
      best_value = v;
    }
  }
  if (best == kNone) {
    throw std::logic_error("applicant " + std::to_string(a) + " was rejected by every position");
  }
  return best;
}

namespace {

// Incremental engine. Every step is the same as a from-scratch evaluation of
// beta(a), j* and the favourite proposer, using:
//  * public values are non-increasing, so among positions an applicant has
//    neither interviewed nor been rejected by, the lowest index is best
//    (cursor, monotone because both sets only grow);
//  * among proposers a position has not interviewed, the lowest index is
//    its favourite (fresh buckets ordered by index).
class Engine {
 public:
  Engine(const Market& market, const AdaptiveOptions& options)
      : market_(market),
        options_(options),
        n_(market.n()),
        matching_(n_, n_),
        ledger_(n_, n_),
        rejected_(n_, n_),
        cursor_(static_cast<std::size_t>(n_), 0),
        beta_(static_cast<std::size_t>(n_), kNone),
        live_(static_cast<std::size_t>(n_)),
        fresh_(static_cast<std::size_t>(n_)),
        seen_(static_cast<std::size_t>(n_)),
        in_active_(static_cast<std::size_t>(n_), 0) {}

  AdaptiveResult run() {
    for (Index a = 0; a < n_; ++a) enqueue(a);
    Index unmatched = n_;
    std::size_t iteration = 0;
    while (unmatched > 0) {
      if ((iteration & 0xFFF) == 0) options_.deadline.check();
      while (bucket_empty(active_.top())) {
        in_active_[active_.top()] = 0;
        active_.pop();
      }
      const Index j = active_.top();
      const Index i = favourite(j);
      const Index holder = matching_.applicant_of(j);
      const bool interviewed = ledger_.contains(i, j);
      const bool holder_preferred =
          holder != kNone && position_prefers(pos_value(j, holder), holder, pos_value(j, i), i);
      if (!interviewed && (i <= j || !holder_preferred)) {
        ledger_.record(i, j);
        live_[i].push_back(j);
        dequeue(i, j);
        enqueue(i);
        emit(TraceKind::Interview, i, j, iteration);
      } else if (holder_preferred) {
        reject(i, j);
        if (options_.trace_rejections) emit(TraceKind::Reject, i, j, iteration);
      } else {
        if (holder != kNone) {
          matching_.unmatch_position(j);
          mark_rejected(holder, j);
          enqueue(holder);
          ++unmatched;
          emit(TraceKind::Displace, holder, j, iteration);
        }
        dequeue(i, j);
        beta_[i] = kNone;
        matching_.match(i, j);
        --unmatched;
        emit(TraceKind::TentativeMatch, i, j, iteration);
      }
      ++iteration;
    }
    AdaptiveResult result;
    result.matching = std::move(matching_);
    result.ledger = std::move(ledger_);
    result.trace = std::move(trace_);
    result.iterations = iteration;
    result.rejections = rejections_;
    return result;
  }

 private:
  double app_value(Index a, Index p) const { return observed_applicant(market_, a, p, ledger_.contains(a, p)); }
  double pos_value(Index p, Index a) const { return observed_position(market_, p, a, ledger_.contains(a, p)); }

  Index compute_beta(Index a) {
    auto& c = cursor_[a];
    while (c < n_ && (rejected_.contains(a, c) || ledger_.contains(a, c))) ++c;
    Index best = c < n_ ? c : kNone;
    double best_value = best != kNone ? market_.position_value(best) : 0.0;
    for (Index p : live_[a]) {
      const double v = market_.position_value(p) + market_.eps_applicant(a, p);
      if (best == kNone || applicant_prefers(v, p, best_value, best)) {
        best = p;
        best_value = v;
      }
    }
    if (best == kNone) {
      throw std::logic_error("applicant " + std::to_string(a) + " was rejected by every position");
    }
    return best;
  }

  void enqueue(Index a) {
    const Index p = compute_beta(a);
    beta_[a] = p;
    if (ledger_.contains(a, p)) {
      seen_[p].push_back(a);
    } else {
      fresh_[p].push(a);
    }
    if (!in_active_[p]) {
      in_active_[p] = 1;
      active_.push(p);
    }
  }

  bool bucket_empty(Index p) const { return fresh_[p].empty() && seen_[p].empty(); }

  // Only ever called with favourite(p), which is either the top of the fresh
  // heap or a member of seen.
  void dequeue(Index a, Index p) {
    if (!fresh_[p].empty() && fresh_[p].top() == a) {
      fresh_[p].pop();
      return;
    }
    auto& s = seen_[p];
    auto it = std::find(s.begin(), s.end(), a);
    if (it == s.end()) throw std::logic_error("adaptive engine: bucket out of sync");
    *it = s.back();
    s.pop_back();
  }

  void mark_rejected(Index a, Index p) {
    rejected_.add(a, p);
    auto& l = live_[a];
    auto it = std::find(l.begin(), l.end(), p);
    if (it != l.end()) {
      *it = l.back();
      l.pop_back();
    }
    ++rejections_;
  }

  void reject(Index a, Index p) {
    dequeue(a, p);
    mark_rejected(a, p);
    enqueue(a);
  }

  Index favourite(Index p) const {
    // Public values are non-increasing in the index, so the lowest fresh index
    // is the best fresh proposer.
    Index best = fresh_[p].empty() ? kNone : fresh_[p].top();
    double best_value = best != kNone ? market_.applicant_value(best) : 0.0;
    for (Index a : seen_[p]) {
      const double u = market_.applicant_value(a) + market_.eps_position(p, a);
      if (best == kNone || position_prefers(u, a, best_value, best)) {
        best = a;
        best_value = u;
      }
    }
    return best;
  }

  void emit(TraceKind kind, Index a, Index p, std::size_t iteration) {
    if (!options_.record_trace) return;
    trace_.push_back(TraceEvent{kind, a, p, iteration, app_value(a, p), pos_value(p, a)});
  }

  const Market& market_;
  const AdaptiveOptions& options_;
  Index n_;
  Matching matching_;
  InterviewLedger ledger_;
  RejectionSets rejected_;
  std::vector<Index> cursor_;
  std::vector<Index> beta_;
  std::vector<std::vector<Index>> live_;  // interviewed, not yet rejected
  using MinHeap = std::priority_queue<Index, std::vector<Index>, std::greater<>>;
  std::vector<MinHeap> fresh_;            // proposers not interviewed by the position
  std::vector<std::vector<Index>> seen_;  // proposers already interviewed
  MinHeap active_;                        // positions that may have a proposer; stale entries skipped
  std::vector<char> in_active_;
  std::vector<TraceEvent> trace_;
  std::size_t rejections_ = 0;
};

}  // namespace

AdaptiveResult adaptive_match(const Market& market, AdaptiveOptions options) {
  if (market.n() != market.m()) {
    throw ConfigError("adaptive_match requires n == m (got " + std::to_string(market.n()) + "x" +
                      std::to_string(market.m()) + ")");
  }
  if (market.eta_enabled()) {
    throw ConfigError("adaptive_match does not support the eta pre-interview perturbation");
  }
  Engine engine(market, options);
  auto result = engine.run();
  if (!result.matching.perfect()) {
    throw std::logic_error("adaptive_match terminated without a perfect matching");
  }
  return result;
}

}  // namespace imatch
