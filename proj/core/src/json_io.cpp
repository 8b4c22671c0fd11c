#include "imatch/json_io.hpp"

#include <sstream>

#include "json.hpp"

namespace imatch::io {

using Json = nlohmann::ordered_json;

namespace {

Json parse(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

Json noise_to_json(const NoiseDistribution& d) {
  return Json{{"family", std::string(to_string(d.family))}, {"half_width", d.half_width}};
}

NoiseDistribution noise_from_json(const Json& j) {
  NoiseDistribution d;
  if (j.contains("family")) d.family = parse_noise_family(j.at("family").get<std::string>());
  if (j.contains("half_width")) d.half_width = j.at("half_width").get<double>();
  return d;
}

Json utility_to_json(const UtilityModel& u) {
  Json eta = noise_to_json(u.eta);
  eta["enabled"] = u.eta_enabled;
  return Json{{"epsilon", noise_to_json(u.epsilon)}, {"eta", eta}, {"tier_gap", u.tier_gap}};
}

void utility_from_json(const Json& j, UtilityModel& u) {
  if (j.contains("epsilon")) u.epsilon = noise_from_json(j.at("epsilon"));
  if (j.contains("eta")) {
    const auto& e = j.at("eta");
    u.eta = noise_from_json(e);
    u.eta_enabled = e.value("enabled", false);
  }
  if (j.contains("tier_gap")) u.tier_gap = j.at("tier_gap").get<double>();
}

Json config_to_json(const MarketConfig& c) {
  Json j;
  j["n"] = c.n;
  j["m"] = c.m;
  if (c.applicant_tiers) j["applicant_tiers"] = c.applicant_tiers->boundaries();
  if (c.position_tiers) j["position_tiers"] = c.position_tiers->boundaries();
  const Json u = utility_to_json(c.utility);
  j["epsilon"] = u["epsilon"];
  j["eta"] = u["eta"];
  j["tier_gap"] = c.utility.tier_gap;
  Json gen{{"kind", std::string(to_string(c.values.kind))}};
  if (c.values.kind == ValueGeneratorKind::StrictlyDecreasing) gen["spacing"] = c.values.spacing;
  j["value_generator"] = gen;
  j["storage"] = std::string(to_string(c.storage));
  return j;
}

MarketConfig config_from_json(const Json& j) {
  MarketConfig c;
  c.n = j.at("n").get<Index>();
  c.m = j.value("m", c.n);
  if (j.contains("applicant_tiers")) c.applicant_tiers = TierStructure(j.at("applicant_tiers").get<std::vector<Index>>());
  if (j.contains("position_tiers")) c.position_tiers = TierStructure(j.at("position_tiers").get<std::vector<Index>>());
  utility_from_json(j, c.utility);
  const bool tiers_given = c.applicant_tiers.has_value() || c.position_tiers.has_value();
  c.values.kind = tiers_given ? ValueGeneratorKind::Tiered : ValueGeneratorKind::StrictlyDecreasing;
  if (j.contains("value_generator")) {
    const auto& g = j.at("value_generator");
    if (g.is_string()) {
      c.values.kind = parse_value_generator(g.get<std::string>());
    } else {
      c.values.kind = parse_value_generator(g.at("kind").get<std::string>());
      c.values.spacing = g.value("spacing", 1.0);
    }
  }
  if (j.contains("storage")) c.storage = parse_latent_storage(j.at("storage").get<std::string>());
  return c;
}

Json edges_to_json(std::span<const Edge> edges) {
  Json arr = Json::array();
  for (const auto& e : edges) arr.push_back(Json::array({e.applicant, e.position}));
  return arr;
}

std::vector<Edge> edges_from_json(const Json& arr) {
  std::vector<Edge> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("edge must be a [applicant, position] pair");
    out.push_back(Edge{e[0].get<Index>(), e[1].get<Index>()});
  }
  return out;
}

Json matrix_to_json(Index rows, Index cols, auto&& at) {
  Json out = Json::array();
  for (Index r = 0; r < rows; ++r) {
    Json row = Json::array();
    for (Index c = 0; c < cols; ++c) row.push_back(at(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> matrix_from_json(const Json& j, Index rows, Index cols, std::string_view name) {
  std::vector<double> out;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows)) {
    throw ConfigError(std::string(name) + " must have " + std::to_string(rows) + " rows");
  }
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      throw ConfigError(std::string(name) + " rows must have " + std::to_string(cols) + " entries");
    }
    for (const auto& v : row) out.push_back(v.get<double>());
  }
  return out;
}

Json blocking_to_json(const BlockingPair& b) {
  Json j{{"applicant", b.applicant},
         {"position", b.position},
         {"applicant_value_for_position", b.applicant_value_for_position},
         {"applicant_value_for_partner", nullptr},
         {"position_value_for_applicant", b.position_value_for_applicant},
         {"position_value_for_partner", nullptr}};
  if (b.applicant_value_for_partner) j["applicant_value_for_partner"] = *b.applicant_value_for_partner;
  if (b.position_value_for_partner) j["position_value_for_partner"] = *b.position_value_for_partner;
  return j;
}

Json params_to_json(const NonAdaptiveParams& p) {
  return Json{{"delta", p.delta},
              {"theta", p.theta},
              {"log_base", std::string(to_string(p.log_base))},
              {"out_of_regime", p.out_of_regime}};
}

Json trial_payload(const TrialReport& t) {
  Json j;
  j["n"] = t.n;
  j["seed"] = t.seed;
  j["trial_index"] = t.trial_index;
  j["algorithm"] = std::string(to_string(t.algorithm));
  j["scenario"] = std::string(to_string(t.scenario));
  j["status"] = std::string(to_string(t.status));
  if (!t.error.empty()) j["error"] = t.error;
  j["max_interviews_applicant"] = t.max_interviews_applicant;
  j["max_interviews_position"] = t.max_interviews_position;
  j["mean_interviews"] = t.mean_interviews;
  j["total_interviews"] = t.total_interviews;
  j["stable"] = t.stable;
  j["blocking_pair_count"] = t.blocking_pair_count;
  j["uninterviewed_match_count"] = t.uninterviewed_match_count;
  j["unmatched_count"] = t.unmatched_count;
  if (!t.witness.empty()) j["witness"] = t.witness;
  if (t.algorithm == Algorithm::Adaptive) {
    j["monitors"] = Json{{"hard_violations", t.hard_monitor_violations},
                         {"upward_window_violations", t.upward_window_violations},
                         {"downward_window_violations", t.downward_window_violations}};
  } else {
    j["plan"] = Json{{"batches", t.batches},
                     {"delta", t.delta},
                     {"theta", t.theta},
                     {"out_of_regime", t.out_of_regime},
                     {"invariant_checks", t.invariant_checks},
                     {"contiguity_holds", t.contiguity_holds},
                     {"max_degree", t.max_plan_degree}};
    j["positivity"] = Json{{"fraction", t.positivity_fraction}, {"participants", t.positivity_participants}};
  }
  return j;
}

Json sweep_config_json(const SweepConfig& c) {
  Json scenario{{"kind", std::string(to_string(c.scenario.kind))}};
  if (c.scenario.kind == TierScenario::StrictlyDecreasing) scenario["value_spacing"] = c.scenario.value_spacing;
  if (c.scenario.kind == TierScenario::Custom) {
    scenario["applicant_tiers"] = c.scenario.applicant_boundaries;
    scenario["position_tiers"] = c.scenario.position_boundaries;
  }
  Json params{{"delta_coefficient", c.params.delta_coefficient},
              {"theta_coefficient", c.params.theta_coefficient},
              {"log_base", std::string(to_string(c.params.log_base))}};
  if (c.params.delta) params["delta"] = *c.params.delta;
  if (c.params.theta) params["theta"] = *c.params.theta;
  return Json{{"sizes", c.sizes},
              {"seeds_per_size", c.seeds_per_size},
              {"algorithm", std::string(to_string(c.algorithm))},
              {"scenario", scenario},
              {"params", params},
              {"utility", utility_to_json(c.utility)},
              {"sweep_seed", c.sweep_seed},
              {"monitors", Json{{"enabled", c.monitors_enabled},
                                {"log_base", std::string(to_string(c.monitors.log_base))},
                                {"upward_coefficient", c.monitors.upward_coefficient},
                                {"downward_coefficient", c.monitors.downward_coefficient}}},
              {"timeout_seconds", c.timeout_seconds}};
}

}  // namespace

MarketConfig market_config_from_json(std::string_view text) {
  const auto j = parse(text, "market config");
  return guarded("market config", [&] {
    auto c = config_from_json(j.contains("config") ? j.at("config") : j);
    c.validate();
    return c;
  });
}

std::string market_config_to_json(const MarketConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string market_to_json(const Market& market) {
  Json j;
  j["config"] = config_to_json(market.config());
  j["seed"] = market.seed();
  j["applicant_values"] = std::vector<double>(market.applicant_values().begin(), market.applicant_values().end());
  j["position_values"] = std::vector<double>(market.position_values().begin(), market.position_values().end());
  j["eps_applicant"] = matrix_to_json(market.n(), market.m(), [&](Index a, Index p) { return market.eps_applicant(a, p); });
  j["eps_position"] = matrix_to_json(market.m(), market.n(), [&](Index p, Index a) { return market.eps_position(p, a); });
  if (market.eta_enabled()) {
    j["eta_applicant"] =
        matrix_to_json(market.n(), market.m(), [&](Index a, Index p) { return market.eta_applicant(a, p); });
    j["eta_position"] =
        matrix_to_json(market.m(), market.n(), [&](Index p, Index a) { return market.eta_position(p, a); });
  }
  return j.dump(2) + "\n";
}

Market market_from_json(std::string_view text) {
  const auto j = parse(text, "market");
  return guarded("market", [&] {
    Market::Explicit data;
    data.config = config_from_json(j.at("config"));
    const Index n = data.config.n;
    const Index m = data.config.m;
    data.seed = j.value("seed", std::uint64_t{0});
    data.applicant_values = j.at("applicant_values").get<std::vector<double>>();
    data.position_values = j.at("position_values").get<std::vector<double>>();
    data.eps_applicant = matrix_from_json(j.at("eps_applicant"), n, m, "eps_applicant");
    data.eps_position = matrix_from_json(j.at("eps_position"), m, n, "eps_position");
    if (j.contains("eta_applicant")) {
      data.eta_applicant = matrix_from_json(j.at("eta_applicant"), n, m, "eta_applicant");
      data.eta_position = matrix_from_json(j.at("eta_position"), m, n, "eta_position");
    }
    return Market::from_explicit(std::move(data));
  });
}

std::string ledger_to_json(const InterviewLedger& ledger) {
  Json j{{"n", ledger.n()}, {"m", ledger.m()}, {"interviews", edges_to_json(ledger.order())}};
  return j.dump() + "\n";
}

InterviewLedger ledger_from_json(std::string_view text, Index n, Index m) {
  const auto j = parse(text, "ledger");
  return guarded("ledger", [&] {
    InterviewLedger ledger(n, m);
    try {
      for (const auto& e : edges_from_json(j.at("interviews"))) ledger.record(e.applicant, e.position);
    } catch (const std::out_of_range& e) {
      throw ConfigError(std::string("ledger: ") + e.what());
    }
    return ledger;
  });
}

std::string matching_to_json(const Matching& matching) {
  Json j{{"n", matching.n()}, {"m", matching.m()}, {"pairs", edges_to_json(matching.pairs())}};
  return j.dump() + "\n";
}

Matching matching_from_json(std::string_view text, Index n, Index m) {
  const auto j = parse(text, "matching");
  return guarded("matching", [&] {
    try {
      return Matching::from_pairs(n, m, edges_from_json(j.at("pairs")));
    } catch (const std::logic_error& e) {
      throw ConfigError(std::string("matching: ") + e.what());
    }
  });
}

std::string verdict_to_json(const StabilityVerdict& v) {
  Json blocking = Json::array();
  for (const auto& b : v.blocking_pairs) blocking.push_back(blocking_to_json(b));
  Json j{{"is_interim_stable", v.is_interim_stable},
         {"blocking_pairs", blocking},
         {"uninterviewed_matches", edges_to_json(v.uninterviewed_matches)},
         {"unmatched_applicants", v.unmatched_applicants},
         {"unmatched_positions", v.unmatched_positions}};
  return j.dump(2) + "\n";
}

std::string plan_to_json(const InterviewPlan& plan, const MarketConfig* market) {
  Json j;
  j["format"] = "imatch-plan/1";
  j["n"] = plan.n;
  j["m"] = plan.m;
  j["seed"] = plan.seed;
  j["params"] = params_to_json(plan.params);
  if (market) j["market"] = config_to_json(*market);
  Json batches = Json::array();
  for (const auto& b : plan.batches) {
    batches.push_back(Json{{"direction", std::string(to_string(b.direction))},
                           {"case", static_cast<int>(b.kind)},
                           {"applicant_tier", b.applicant_tier},
                           {"position_tier", b.position_tier},
                           {"edges", edges_to_json(b.edges)}});
  }
  j["batches"] = batches;
  return j.dump() + "\n";
}

PlanDocument plan_from_json(std::string_view text) {
  const auto j = parse(text, "plan");
  return guarded("plan", [&] {
    PlanDocument doc;
    auto& plan = doc.plan;
    plan.n = j.at("n").get<Index>();
    plan.m = j.at("m").get<Index>();
    plan.seed = j.value("seed", std::uint64_t{0});
    const auto& p = j.at("params");
    plan.params.delta = p.at("delta").get<Index>();
    plan.params.theta = p.at("theta").get<Index>();
    plan.params.log_base = parse_log_base(p.value("log_base", std::string("natural")));
    plan.params.out_of_regime = p.value("out_of_regime", false);
    for (const auto& b : j.at("batches")) {
      PlanBatch batch;
      batch.direction = [&] {
        try {
          return parse_direction(b.at("direction").get<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }();
      const int kind = b.value("case", 1);
      if (kind < 1 || kind > 3) throw ConfigError("plan batch case must be 1, 2 or 3");
      batch.kind = static_cast<PlanCase>(kind);
      batch.applicant_tier = b.value("applicant_tier", Index{0});
      batch.position_tier = b.value("position_tier", Index{0});
      batch.edges = edges_from_json(b.at("edges"));
      for (const auto& e : batch.edges) {
        if (e.applicant < 0 || e.applicant >= plan.n || e.position < 0 || e.position >= plan.m) {
          throw ConfigError("plan edge out of range");
        }
      }
      plan.batches.push_back(std::move(batch));
    }
    if (j.contains("market")) {
      doc.market = config_from_json(j.at("market"));
      doc.market->validate();
    }
    return doc;
  });
}

std::string trace_to_jsonl(std::span<const TraceEvent> trace) {
  std::string out;
  for (const auto& e : trace) {
    Json j{{"kind", std::string(to_string(e.kind))},
           {"i", e.applicant},
           {"j", e.position},
           {"iteration", e.iteration},
           {"applicant_observed", e.applicant_observed},
           {"position_observed", e.position_observed}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> trace_from_jsonl(std::string_view text) {
  std::vector<TraceEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = parse(line, "trace");
    out.push_back(guarded("trace", [&] {
      TraceEvent e;
      try {
        e.kind = parse_trace_kind(j.at("kind").get<std::string>());
      } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
      }
      e.applicant = j.at("i").get<Index>();
      e.position = j.at("j").get<Index>();
      e.iteration = j.value("iteration", std::size_t{0});
      e.applicant_observed = j.value("applicant_observed", 0.0);
      e.position_observed = j.value("position_observed", 0.0);
      return e;
    }));
  }
  return out;
}

std::string monitor_report_to_json(const MonitorReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back(Json{{"rule", std::string(to_string(v.rule))},
                              {"event_index", v.event_index},
                              {"i", v.applicant},
                              {"j", v.position}});
  }
  Json j{{"interviews", r.interviews},
         {"hard_violations", violations},
         {"upward_window", r.upward_window},
         {"upward_window_violations", r.upward_window_violations},
         {"downward_window", r.downward_window},
         {"downward_window_violations", r.downward_window_violations},
         {"max_upward_gap", r.max_upward_gap},
         {"max_downward_gap", r.max_downward_gap}};
  return j.dump(2) + "\n";
}

std::string trial_report_to_json(const TrialReport& report, bool include_metadata) {
  Json j = trial_payload(report);
  if (include_metadata) j["metadata"] = Json{{"wall_time_seconds", report.wall_time_seconds}};
  return j.dump(2) + "\n";
}

std::string sweep_summary_to_json(const SweepSummary& s, bool include_metadata) {
  Json sizes = Json::array();
  for (const auto& a : s.sizes) {
    sizes.push_back(Json{{"n", a.n},
                         {"trials", a.trials},
                         {"completed", a.completed},
                         {"failures", a.failures},
                         {"timeouts", a.timeouts},
                         {"errors", a.errors},
                         {"failure_rate", a.failure_rate},
                         {"median_max_interviews", a.median_max_interviews},
                         {"p95_max_interviews", a.p95_max_interviews},
                         {"max_max_interviews", a.max_max_interviews},
                         {"mean_total_interviews", a.mean_total_interviews},
                         {"hard_violations", a.hard_violations},
                         {"upward_violation_run_fraction", a.upward_violation_run_fraction},
                         {"mean_positivity", a.mean_positivity}});
  }
  Json trials = Json::array();
  for (const auto& t : s.trials) trials.push_back(trial_payload(t));
  Json j{{"config", sweep_config_json(s.config)},
         {"sizes", sizes},
         {"scaling", Json{{"valid", s.scaling.valid},
                          {"slope_vs_loglog", s.scaling.slope_vs_loglog},
                          {"slope_vs_log", s.scaling.slope_vs_log},
                          {"median_ratio_last_first", s.scaling.median_ratio_last_first}}},
         {"trials", trials}};
  if (include_metadata) {
    Json per_trial = Json::array();
    for (const auto& t : s.trials) per_trial.push_back(t.wall_time_seconds);
    j["metadata"] = Json{{"wall_time_seconds", s.wall_time_seconds}, {"trial_wall_time_seconds", per_trial}};
  }
  return j.dump(2) + "\n";
}

SweepConfig sweep_config_from_json(std::string_view text) {
  const auto j = parse(text, "sweep config");
  return guarded("sweep config", [&] {
    SweepConfig c;
    c.sizes = j.at("sizes").get<std::vector<Index>>();
    c.seeds_per_size = j.value("seeds_per_size", std::size_t{1});
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      if (s.is_string()) {
        c.scenario.kind = parse_tier_scenario(s.get<std::string>());
      } else {
        c.scenario.kind = parse_tier_scenario(s.at("kind").get<std::string>());
        if (s.contains("applicant_tiers")) c.scenario.applicant_boundaries = s.at("applicant_tiers").get<std::vector<Index>>();
        if (s.contains("position_tiers")) c.scenario.position_boundaries = s.at("position_tiers").get<std::vector<Index>>();
        c.scenario.value_spacing = s.value("value_spacing", 1.0);
      }
    }
    if (j.contains("params")) {
      const auto& p = j.at("params");
      c.params.delta_coefficient = p.value("delta_coefficient", c.params.delta_coefficient);
      c.params.theta_coefficient = p.value("theta_coefficient", c.params.theta_coefficient);
      if (p.contains("delta")) c.params.delta = p.at("delta").get<Index>();
      if (p.contains("theta")) c.params.theta = p.at("theta").get<Index>();
      if (p.contains("log_base")) c.params.log_base = parse_log_base(p.at("log_base").get<std::string>());
    }
    if (j.contains("utility")) utility_from_json(j.at("utility"), c.utility);
    c.sweep_seed = j.value("sweep_seed", std::uint64_t{0});
    if (j.contains("monitors")) {
      const auto& mo = j.at("monitors");
      if (mo.is_boolean()) {
        c.monitors_enabled = mo.get<bool>();
      } else {
        c.monitors_enabled = mo.value("enabled", true);
        if (mo.contains("log_base")) c.monitors.log_base = parse_log_base(mo.at("log_base").get<std::string>());
        c.monitors.upward_coefficient = mo.value("upward_coefficient", c.monitors.upward_coefficient);
        c.monitors.downward_coefficient = mo.value("downward_coefficient", c.monitors.downward_coefficient);
      }
    }
    c.timeout_seconds = j.value("timeout_seconds", 0.0);
    c.jobs = j.value("jobs", 1u);
    c.validate();
    return c;
  });
}

std::string sweep_config_to_json(const SweepConfig& config) { return sweep_config_json(config).dump(2) + "\n"; }

}  // namespace imatch::io
