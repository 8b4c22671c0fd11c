#include "imatch/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <thread>

#include "imatch/rng.hpp"
#include "imatch/stability.hpp"

namespace imatch {

std::string_view to_string(Algorithm a) { return a == Algorithm::Adaptive ? "adaptive" : "nonadaptive"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "adaptive") return Algorithm::Adaptive;
  if (name == "nonadaptive" || name == "non-adaptive") return Algorithm::NonAdaptive;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(TierScenario s) {
  switch (s) {
    case TierScenario::StrictlyDecreasing: return "strictly-decreasing";
    case TierScenario::SingleTier: return "single-tier";
    case TierScenario::SingletonApplicants: return "singleton-applicants";
    case TierScenario::Mixed: return "mixed";
    case TierScenario::RandomPartition: return "random-partition";
    case TierScenario::Custom: return "custom";
  }
  return "?";
}

TierScenario parse_tier_scenario(std::string_view name) {
  for (auto s : {TierScenario::StrictlyDecreasing, TierScenario::SingleTier, TierScenario::SingletonApplicants,
                 TierScenario::Mixed, TierScenario::RandomPartition, TierScenario::Custom}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown tier scenario '" + std::string(name) + "'");
}

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Timeout: return "timeout";
    case TrialStatus::Error: return "error";
  }
  return "?";
}

NonAdaptiveParams PlanParamsSpec::resolve(Index n) const {
  auto p = NonAdaptiveParams::scaled(n, delta_coefficient, theta_coefficient, log_base);
  if (delta) {
    p.delta = std::min(*delta, n);
    p.out_of_regime = *delta > n;
  }
  if (theta) p.theta = *theta;
  p.theta = std::max(p.theta, p.delta);
  return p;
}

void SweepConfig::validate() const {
  if (sizes.empty()) throw ConfigError("sweep needs at least one size");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < 1) throw ConfigError("sweep sizes must be positive");
    if (k > 0 && sizes[k] <= sizes[k - 1]) throw ConfigError("sweep sizes must be increasing");
  }
  if (seeds_per_size < 1) throw ConfigError("seeds_per_size must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (algorithm == Algorithm::NonAdaptive && scenario.kind == TierScenario::StrictlyDecreasing) {
    throw ConfigError("the non-adaptive algorithm needs a tiered scenario");
  }
}

std::uint64_t trial_seed(std::uint64_t sweep_seed, Index n, std::size_t trial_index) {
  return rng::combine(sweep_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial_index));
}

namespace {

std::vector<Index> mixed_sizes(Index n, Index delta, rng::Stream& stream) {
  std::vector<Index> pool;
  for (Index s : {Index{1}, delta - 1, delta, delta + 1, std::max<Index>(1, n / 2)}) {
    if (s >= 1) pool.push_back(s);
  }
  std::vector<Index> sizes;
  Index total = 0;
  while (total < n) {
    Index s = pool[stream.below(pool.size())];
    s = std::min(s, n - total);
    sizes.push_back(s);
    total += s;
  }
  return sizes;
}

std::vector<Index> random_partition(Index n, rng::Stream& stream) {
  std::vector<Index> sizes{1};
  for (Index i = 1; i < n; ++i) {
    if (stream.below(2) == 0) {
      sizes.push_back(1);
    } else {
      ++sizes.back();
    }
  }
  return sizes;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string edge_label(Index a, Index p) { return std::to_string(a) + ":" + std::to_string(p); }

void fill_interview_counts(TrialReport& r, const InterviewLedger& ledger) {
  for (Index a = 0; a < ledger.n(); ++a) {
    r.max_interviews_applicant = std::max(r.max_interviews_applicant, ledger.positions_of(a).size());
  }
  for (Index p = 0; p < ledger.m(); ++p) {
    r.max_interviews_position = std::max(r.max_interviews_position, ledger.applicants_of(p).size());
  }
  r.total_interviews = ledger.size();
  r.mean_interviews = 2.0 * static_cast<double>(ledger.size()) / static_cast<double>(ledger.n() + ledger.m());
}

void fill_verdict(TrialReport& r, const std::vector<BlockingPair>& blocking, const std::vector<Edge>& uninterviewed,
                  std::size_t unmatched) {
  r.blocking_pair_count = blocking.size();
  r.uninterviewed_match_count = uninterviewed.size();
  r.unmatched_count = unmatched;
  r.stable = blocking.empty() && uninterviewed.empty() && unmatched == 0;
  if (!uninterviewed.empty()) {
    r.witness = "uninterviewed " + edge_label(uninterviewed.front().applicant, uninterviewed.front().position);
  } else if (!blocking.empty()) {
    r.witness = "blocking " + edge_label(blocking.front().applicant, blocking.front().position);
  }
}

}  // namespace

MarketConfig make_market_config(const SweepConfig& config, Index n, std::uint64_t seed) {
  MarketConfig mc;
  mc.n = n;
  mc.m = n;
  mc.utility = config.utility;
  rng::Stream stream(rng::combine(seed, 0x7135));
  const Index delta = config.params.resolve(n).delta;
  switch (config.scenario.kind) {
    case TierScenario::StrictlyDecreasing:
      mc.values = ValueGenerator{ValueGeneratorKind::StrictlyDecreasing, config.scenario.value_spacing};
      return mc;
    case TierScenario::SingleTier:
      mc.applicant_tiers = TierStructure::single(n);
      mc.position_tiers = TierStructure::single(n);
      break;
    case TierScenario::SingletonApplicants:
      mc.applicant_tiers = TierStructure::singletons(n);
      mc.position_tiers = TierStructure::single(n);
      break;
    case TierScenario::Mixed: {
      const auto a = mixed_sizes(n, delta, stream);
      const auto p = mixed_sizes(n, delta, stream);
      mc.applicant_tiers = TierStructure::from_sizes(a);
      mc.position_tiers = TierStructure::from_sizes(p);
      break;
    }
    case TierScenario::RandomPartition: {
      const auto a = random_partition(n, stream);
      const auto p = random_partition(n, stream);
      mc.applicant_tiers = TierStructure::from_sizes(a);
      mc.position_tiers = TierStructure::from_sizes(p);
      break;
    }
    case TierScenario::Custom:
      mc.applicant_tiers = TierStructure(config.scenario.applicant_boundaries);
      mc.position_tiers = TierStructure(config.scenario.position_boundaries);
      break;
  }
  mc.values = ValueGenerator{ValueGeneratorKind::Tiered, 1.0};
  return mc;
}

TrialReport run_trial_on(const SweepConfig& config, const MarketConfig& market_config, std::uint64_t seed,
                         TrialArtifacts* artifacts) {
  const Index n = market_config.n;
  TrialReport r;
  r.n = n;
  r.seed = seed;
  r.algorithm = config.algorithm;
  r.scenario = config.scenario.kind;
  const auto start = std::chrono::steady_clock::now();
  const Deadline deadline = config.timeout_seconds > 0.0
                                ? Deadline::after(std::chrono::duration<double>(config.timeout_seconds))
                                : Deadline{};
  try {
    const auto market = Market::sample(market_config, seed);
    if (artifacts) artifacts->market = market;
    if (config.algorithm == Algorithm::Adaptive) {
      AdaptiveOptions options;
      const bool full_trace = artifacts != nullptr && artifacts->full_trace;
      options.record_trace = config.monitors_enabled || full_trace;
      options.trace_rejections = full_trace;
      options.deadline = deadline;
      const auto result = adaptive_match(market, options);
      deadline.check();
      fill_interview_counts(r, result.ledger);
      const auto verdict = verify(market, result.ledger, result.matching);
      fill_verdict(r, verdict.blocking_pairs, verdict.uninterviewed_matches,
                   verdict.unmatched_applicants.size() + verdict.unmatched_positions.size());
      if (config.monitors_enabled) {
        const auto monitors = check_trace_monitors(result.trace, market, config.monitors);
        r.hard_monitor_violations = monitors.hard_violation_count();
        r.upward_window_violations = monitors.upward_window_violations;
        r.downward_window_violations = monitors.downward_window_violations;
        if (artifacts) artifacts->monitors = monitors;
      }
      if (artifacts) {
        artifacts->ledger = result.ledger;
        artifacts->matching = result.matching;
        artifacts->trace = result.trace;
        artifacts->verdict = verdict;
      }
    } else {
      const auto params = config.params.resolve(n);
      r.delta = params.delta;
      r.theta = params.theta;
      r.out_of_regime = params.out_of_regime;
      const auto plan = build_plan(market.shape(), params, rng::combine(seed, 0x91a2), deadline);
      r.batches = plan.batch_count();
      r.invariant_checks = plan.invariant_checks;
      r.contiguity_holds = check_batch_contiguity(plan).holds();
      r.max_plan_degree = plan_degree_stats(plan).max_degree();
      const auto result = resolve_plan(market, plan, deadline);
      fill_interview_counts(r, result.ledger);
      const auto& f = result.failure;
      fill_verdict(r, f.blocking_pairs, f.uninterviewed_matches,
                   f.unmatched_applicants.size() + f.unmatched_positions.size());
      r.positivity_fraction = result.positivity.fraction();
      r.positivity_participants = result.positivity.participants;
      if (artifacts) {
        artifacts->plan = plan;
        artifacts->ledger = result.ledger;
        artifacts->matching = result.matching;
        artifacts->verdict = verify(market, result.ledger, result.matching);
      }
    }
  } catch (const TrialTimeout& e) {
    r.status = TrialStatus::Timeout;
    r.error = e.what();
    r.stable = false;
  } catch (const std::exception& e) {
    r.status = TrialStatus::Error;
    r.error = e.what();
    r.stable = false;
  }
  r.wall_time_seconds = seconds_since(start);
  return r;
}

TrialReport run_trial(const SweepConfig& config, Index n, std::uint64_t seed) {
  try {
    return run_trial_on(config, make_market_config(config, n, seed), seed);
  } catch (const std::exception& e) {
    TrialReport r;
    r.n = n;
    r.seed = seed;
    r.algorithm = config.algorithm;
    r.scenario = config.scenario.kind;
    r.status = TrialStatus::Error;
    r.error = e.what();
    return r;
  }
}

std::vector<SizeAggregate> aggregate_by_size(std::span<const TrialReport> trials) {
  std::vector<SizeAggregate> out;
  std::size_t k = 0;
  while (k < trials.size()) {
    SizeAggregate agg;
    agg.n = trials[k].n;
    std::vector<double> maxima;
    double total = 0.0;
    double positivity = 0.0;
    std::size_t upward_runs = 0;
    for (; k < trials.size() && trials[k].n == agg.n; ++k) {
      const auto& t = trials[k];
      ++agg.trials;
      if (t.status == TrialStatus::Timeout) {
        ++agg.timeouts;
        continue;
      }
      if (t.status == TrialStatus::Error) {
        ++agg.errors;
        continue;
      }
      ++agg.completed;
      if (!t.stable) ++agg.failures;
      maxima.push_back(static_cast<double>(t.max_interviews()));
      agg.max_max_interviews = std::max(agg.max_max_interviews, t.max_interviews());
      total += static_cast<double>(t.total_interviews);
      positivity += t.positivity_fraction;
      agg.hard_violations += t.hard_monitor_violations;
      upward_runs += t.upward_window_violations > 0;
    }
    if (agg.completed > 0) {
      const double c = static_cast<double>(agg.completed);
      agg.failure_rate = static_cast<double>(agg.failures) / c;
      agg.mean_total_interviews = total / c;
      agg.mean_positivity = positivity / c;
      agg.upward_violation_run_fraction = static_cast<double>(upward_runs) / c;
      std::sort(maxima.begin(), maxima.end());
      const std::size_t mid = maxima.size() / 2;
      agg.median_max_interviews =
          maxima.size() % 2 == 1 ? maxima[mid] : 0.5 * (maxima[mid - 1] + maxima[mid]);
      // Nearest-rank percentile.
      const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(maxima.size())));
      agg.p95_max_interviews = maxima[std::max<std::size_t>(rank, 1) - 1];
    }
    out.push_back(agg);
  }
  return out;
}

ScalingDiagnostics scaling_diagnostics(std::span<const SizeAggregate> sizes) {
  std::vector<double> log_n;
  std::vector<double> loglog_n;
  std::vector<double> log_y;
  for (const auto& s : sizes) {
    if (s.n < 3 || s.median_max_interviews <= 0.0) continue;
    log_n.push_back(std::log(static_cast<double>(s.n)));
    loglog_n.push_back(std::log(std::log(static_cast<double>(s.n))));
    log_y.push_back(std::log(s.median_max_interviews));
  }
  ScalingDiagnostics d;
  if (log_y.size() < 2) return d;
  auto slope = [&](const std::vector<double>& x) {
    const double k = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
    const double my = std::accumulate(log_y.begin(), log_y.end(), 0.0) / k;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (log_y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
  };
  d.valid = true;
  d.slope_vs_loglog = slope(loglog_n);
  d.slope_vs_log = slope(log_n);
  d.median_ratio_last_first = std::exp(log_y.back() - log_y.front());
  return d;
}

SweepSummary run_sweep(const SweepConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  struct Task {
    Index n;
    std::size_t trial_index;
  };
  std::vector<Task> tasks;
  for (Index n : config.sizes) {
    for (std::size_t t = 0; t < config.seeds_per_size; ++t) tasks.push_back(Task{n, t});
  }
  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.shuffle_execution) {
    rng::Stream stream(rng::combine(config.sweep_seed, 0x5b0f));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream.below(i)]);
  }

  std::vector<TrialReport> reports(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      const auto& task = tasks[order[k]];
      auto report = run_trial(config, task.n, trial_seed(config.sweep_seed, task.n, task.trial_index));
      report.trial_index = task.trial_index;
      reports[order[k]] = std::move(report);
    }
  };
  const unsigned jobs = std::min<unsigned>(config.jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepSummary summary;
  summary.config = config;
  summary.trials = std::move(reports);
  summary.sizes = aggregate_by_size(summary.trials);
  summary.scaling = scaling_diagnostics(summary.sizes);
  summary.wall_time_seconds = seconds_since(start);
  return summary;
}

std::string_view csv_header() {
  return "n,seed,trial_index,algorithm,scenario,status,max_interviews_applicant,max_interviews_position,"
         "mean_interviews,total_interviews,stable,blocking_pair_count,uninterviewed_match_count,"
         "unmatched_count,witness,hard_monitor_violations,upward_window_violations,"
         "downward_window_violations,batches,delta,theta,out_of_regime,invariant_checks,contiguity_holds,"
         "max_plan_degree,positivity_fraction,positivity_participants";
}

std::string trials_to_csv(std::span<const TrialReport> trials) {
  std::string out(csv_header());
  out += '\n';
  char buf[64];
  auto fixed = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& t : trials) {
    out += std::to_string(t.n) + ',' + std::to_string(t.seed) + ',' + std::to_string(t.trial_index) + ',' +
           std::string(to_string(t.algorithm)) + ',' + std::string(to_string(t.scenario)) + ',' +
           std::string(to_string(t.status)) + ',' + std::to_string(t.max_interviews_applicant) + ',' +
           std::to_string(t.max_interviews_position) + ',' + fixed(t.mean_interviews) + ',' +
           std::to_string(t.total_interviews) + ',' + (t.stable ? "1" : "0") + ',' +
           std::to_string(t.blocking_pair_count) + ',' + std::to_string(t.uninterviewed_match_count) + ',' +
           std::to_string(t.unmatched_count) + ',' + t.witness + ',' + std::to_string(t.hard_monitor_violations) +
           ',' + std::to_string(t.upward_window_violations) + ',' + std::to_string(t.downward_window_violations) +
           ',' + std::to_string(t.batches) + ',' + std::to_string(t.delta) + ',' + std::to_string(t.theta) + ',' +
           (t.out_of_regime ? "1" : "0") + ',' + std::to_string(t.invariant_checks) + ',' +
           (t.contiguity_holds ? "1" : "0") + ',' + std::to_string(t.max_plan_degree) + ',' +
           fixed(t.positivity_fraction) + ',' + std::to_string(t.positivity_participants) + '\n';
  }
  return out;
}

}  // namespace imatch
