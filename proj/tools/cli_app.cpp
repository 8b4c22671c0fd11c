#include "cli_app.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "imatch/experiments.hpp"
#include "imatch/json_io.hpp"
#include "imatch/nonadaptive.hpp"
#include "imatch/stability.hpp"

namespace imatch::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Temp file in the destination directory, then rename over the target.
void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot rename onto " + path);
  }
}

struct Options {
  std::string config_path;
  std::optional<Index> n;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  std::string scenario;
  std::optional<double> spacing;
  std::string trace_path;
  std::string market_out;
  std::string ledger_out;
  std::string matching_out;
  std::string plan_out;
  std::string plan_path;
  std::string market_path;
  std::string ledger_path;
  std::string matching_path;
  std::optional<Index> delta;
  std::optional<Index> theta;
  std::optional<double> delta_coefficient;
  std::optional<double> theta_coefficient;
  std::vector<Index> sizes;
  std::optional<std::size_t> seeds_per_size;
  std::string algorithm;
  unsigned jobs = 1;
  bool no_metadata = false;
  bool no_monitors = false;
  double timeout_seconds = 0.0;
};

class Driver {
 public:
  Driver(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  void emit(const std::string& text) {
    if (o_.out_path.empty()) {
      out_ << text;
    } else {
      write_atomic(o_.out_path, text);
    }
  }

  // Rendering is deferred so unrequested outputs cost nothing.
  template <typename Render>
  void emit_side(const std::string& path, Render&& render) {
    if (!path.empty()) write_atomic(path, render());
  }

  SweepConfig base_config(Algorithm algorithm, TierScenario default_scenario) const {
    SweepConfig c;
    c.algorithm = algorithm;
    c.scenario.kind = o_.scenario.empty() ? default_scenario : parse_tier_scenario(o_.scenario);
    if (o_.spacing) c.scenario.value_spacing = *o_.spacing;
    if (o_.delta) c.params.delta = o_.delta;
    if (o_.theta) c.params.theta = o_.theta;
    if (o_.delta_coefficient) c.params.delta_coefficient = *o_.delta_coefficient;
    if (o_.theta_coefficient) c.params.theta_coefficient = *o_.theta_coefficient;
    c.monitors_enabled = !o_.no_monitors;
    c.timeout_seconds = o_.timeout_seconds;
    return c;
  }

  MarketConfig market_config(const SweepConfig& c) const {
    if (!o_.config_path.empty()) {
      auto mc = io::market_config_from_json(read_file(o_.config_path));
      if (o_.n) throw ConfigError("--n and --config are mutually exclusive");
      return mc;
    }
    if (!o_.n) throw ConfigError("either --config or --n is required");
    if (*o_.n < 1) throw ConfigError("--n must be positive");
    auto mc = make_market_config(c, *o_.n, o_.seed);
    mc.validate();
    return mc;
  }

  std::string render(const TrialReport& r) const {
    if (o_.format == "csv") return trials_to_csv(std::span<const TrialReport>(&r, 1));
    return io::trial_report_to_json(r, !o_.no_metadata);
  }

  int finish(const TrialReport& r, const TrialArtifacts& art) {
    if (art.market) emit_side(o_.market_out, [&] { return io::market_to_json(*art.market); });
    if (r.status == TrialStatus::Ok) {
      emit_side(o_.ledger_out, [&] { return io::ledger_to_json(art.ledger); });
      emit_side(o_.matching_out, [&] { return io::matching_to_json(art.matching); });
    }
    emit(render(r));
    if (r.status == TrialStatus::Error) {
      err_ << "error: " << r.error << '\n';
      return kExitUsage;
    }
    if (r.status == TrialStatus::Timeout) {
      err_ << "timeout: " << r.error << '\n';
      return kExitUnstable;
    }
    return r.stable ? kExitOk : kExitUnstable;
  }

  int simulate_adaptive() {
    auto c = base_config(Algorithm::Adaptive, TierScenario::StrictlyDecreasing);
    const auto mc = market_config(c);
    TrialArtifacts art;
    art.full_trace = !o_.trace_path.empty();
    const auto r = run_trial_on(c, mc, o_.seed, &art);
    if (r.status == TrialStatus::Ok) emit_side(o_.trace_path, [&] { return io::trace_to_jsonl(art.trace); });
    return finish(r, art);
  }

  int simulate_nonadaptive() {
    auto c = base_config(Algorithm::NonAdaptive, TierScenario::SingleTier);
    const auto mc = market_config(c);
    TrialArtifacts art;
    const auto r = run_trial_on(c, mc, o_.seed, &art);
    if (art.plan) emit_side(o_.plan_out, [&] { return io::plan_to_json(*art.plan, &mc); });
    return finish(r, art);
  }

  int plan() {
    auto c = base_config(Algorithm::NonAdaptive, TierScenario::SingleTier);
    const auto mc = market_config(c);
    mc.validate();
    const auto shape = Market::sample(mc, 0).shape();
    const auto p = build_plan(shape, c.params.resolve(mc.n), o_.seed);
    emit(io::plan_to_json(p, &mc));
    return kExitOk;
  }

  int resolve() {
    if (o_.plan_path.empty()) throw ConfigError("resolve needs --plan");
    const auto doc = io::plan_from_json(read_file(o_.plan_path));
    MarketConfig mc;
    if (!o_.config_path.empty()) {
      mc = io::market_config_from_json(read_file(o_.config_path));
    } else if (doc.market) {
      mc = *doc.market;
    } else {
      throw ConfigError("plan carries no market configuration; pass --config");
    }
    if (mc.n != doc.plan.n || mc.m != doc.plan.m) throw ConfigError("plan and market sizes differ");
    const auto market = Market::sample(mc, o_.seed);
    const auto result = resolve_plan(market, doc.plan);
    const auto verdict = verify(market, result.ledger, result.matching);
    emit_side(o_.market_out, [&] { return io::market_to_json(market); });
    emit_side(o_.ledger_out, [&] { return io::ledger_to_json(result.ledger); });
    emit_side(o_.matching_out, [&] { return io::matching_to_json(result.matching); });
    emit(io::verdict_to_json(verdict));
    return verdict.is_interim_stable ? kExitOk : kExitUnstable;
  }

  int verify_cmd() {
    if (o_.market_path.empty() || o_.ledger_path.empty() || o_.matching_path.empty()) {
      throw ConfigError("verify needs --market, --ledger and --matching");
    }
    const auto market = io::market_from_json(read_file(o_.market_path));
    const auto ledger = io::ledger_from_json(read_file(o_.ledger_path), market.n(), market.m());
    const auto matching = io::matching_from_json(read_file(o_.matching_path), market.n(), market.m());
    const auto verdict = verify(market, ledger, matching);
    emit(io::verdict_to_json(verdict));
    return verdict.is_interim_stable ? kExitOk : kExitUnstable;
  }

  int sweep() {
    SweepConfig c;
    if (!o_.config_path.empty()) {
      c = io::sweep_config_from_json(read_file(o_.config_path));
    } else {
      c.algorithm = o_.algorithm.empty() ? Algorithm::Adaptive : parse_algorithm(o_.algorithm);
      c = [&] {
        auto b = base_config(c.algorithm, c.algorithm == Algorithm::Adaptive ? TierScenario::StrictlyDecreasing
                                                                             : TierScenario::SingleTier);
        b.sweep_seed = o_.seed;
        return b;
      }();
    }
    if (!o_.sizes.empty()) c.sizes = o_.sizes;
    if (o_.seeds_per_size) c.seeds_per_size = *o_.seeds_per_size;
    c.jobs = o_.jobs;
    c.validate();
    const auto summary = run_sweep(c);
    if (o_.format == "csv") {
      emit(trials_to_csv(summary.trials));
    } else {
      emit(io::sweep_summary_to_json(summary, !o_.no_metadata));
    }
    for (const auto& t : summary.trials) {
      if (t.status != TrialStatus::Ok || !t.stable) return kExitUnstable;
    }
    return kExitOk;
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Interview-augmented matching market simulator", "imatch"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every random draw")->capture_default_str();
    sub->add_option("--out", o.out_path, "Write the result here instead of stdout");
  };
  auto add_market = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Market configuration JSON");
    sub->add_option("--n", o.n, "Market size (n = m) for a generated scenario");
    sub->add_option("--scenario", o.scenario,
                    "strictly-decreasing | single-tier | singleton-applicants | mixed | random-partition");
    sub->add_option("--spacing", o.spacing, "Value spacing of the strictly-decreasing scenario")
        ->check(CLI::PositiveNumber);
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--delta", o.delta, "Explicit delta");
    sub->add_option("--theta", o.theta, "Explicit theta");
    sub->add_option("--delta-coefficient", o.delta_coefficient, "delta = ceil(c log^2 n)");
    sub->add_option("--theta-coefficient", o.theta_coefficient, "theta = ceil(c log^3 n)");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--no-metadata", o.no_metadata, "Omit the timing metadata block from JSON");
  };
  auto add_artifacts = [&](CLI::App* sub) {
    sub->add_option("--market-out", o.market_out, "Write the sampled market JSON");
    sub->add_option("--ledger-out", o.ledger_out, "Write the interview ledger JSON");
    sub->add_option("--matching-out", o.matching_out, "Write the matching JSON");
  };

  auto* sa = app.add_subcommand("simulate-adaptive", "Run the adaptive algorithm on one market");
  add_common(sa);
  add_market(sa);
  add_format(sa);
  add_artifacts(sa);
  sa->add_option("--trace", o.trace_path, "Write the event trace as JSON lines");
  sa->add_flag("--no-monitors", o.no_monitors, "Skip trace monitors");
  sa->add_option("--timeout", o.timeout_seconds, "Wall-clock budget in seconds (0 = none)");

  auto* sn = app.add_subcommand("simulate-nonadaptive", "Build a plan and resolve it on one market");
  add_common(sn);
  add_market(sn);
  add_params(sn);
  add_format(sn);
  add_artifacts(sn);
  sn->add_option("--plan-out", o.plan_out, "Write the interview plan JSON");
  sn->add_option("--timeout", o.timeout_seconds, "Wall-clock budget in seconds (0 = none)");

  auto* pl = app.add_subcommand("plan", "Build an interview plan from a market shape");
  add_common(pl);
  add_market(pl);
  add_params(pl);

  auto* rs = app.add_subcommand("resolve", "Resolve a saved plan on a fresh market realisation");
  add_common(rs);
  add_artifacts(rs);
  rs->add_option("--plan", o.plan_path, "Plan JSON")->required();
  rs->add_option("--config", o.config_path, "Market configuration overriding the one in the plan");

  auto* vf = app.add_subcommand("verify", "Check interim stability of a matching");
  vf->add_option("--out", o.out_path, "Write the verdict here instead of stdout");
  vf->add_option("--market", o.market_path, "Market JSON")->required();
  vf->add_option("--ledger", o.ledger_path, "Ledger JSON")->required();
  vf->add_option("--matching", o.matching_path, "Matching JSON")->required();

  auto* sw = app.add_subcommand("sweep", "Run a seeded sweep of trials");
  add_common(sw);
  add_params(sw);
  add_format(sw);
  sw->add_option("--config", o.config_path, "Sweep configuration JSON");
  sw->add_option("--sizes", o.sizes, "Market sizes, increasing");
  sw->add_option("--seeds", o.seeds_per_size, "Trials per size");
  sw->add_option("--algorithm", o.algorithm, "adaptive | nonadaptive");
  sw->add_option("--scenario", o.scenario, "Tier scenario");
  sw->add_option("--spacing", o.spacing, "Value spacing of the strictly-decreasing scenario")
      ->check(CLI::PositiveNumber);
  sw->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_flag("--no-monitors", o.no_monitors, "Skip trace monitors");
  sw->add_option("--timeout", o.timeout_seconds, "Per-trial wall-clock budget in seconds (0 = none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  Driver d(o, out, err);
  try {
    if (*sa) return d.simulate_adaptive();
    if (*sn) return d.simulate_nonadaptive();
    if (*pl) return d.plan();
    if (*rs) return d.resolve();
    if (*vf) return d.verify_cmd();
    if (*sw) return d.sweep();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace imatch::cli
