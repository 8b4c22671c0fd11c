#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "doctest.h"
#include "imatch/json_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "imatch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = imatch::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const char* env = std::getenv("IMATCH_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "imatch_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("simulate-adaptive smoke") {
  const auto r = run({"simulate-adaptive", "--n", "100", "--seed", "7", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"stable\": true") != std::string::npos);
  CHECK(r.out.find("\"total_interviews\"") != std::string::npos);
}

TEST_CASE("output is reproducible") {
  const auto a = run({"simulate-adaptive", "--n", "60", "--seed", "3", "--spacing", "0.1", "--no-metadata"});
  const auto b = run({"simulate-adaptive", "--n", "60", "--seed", "3", "--spacing", "0.1", "--no-metadata"});
  CHECK(a.out == b.out);
  const auto csv = run({"simulate-adaptive", "--n", "60", "--seed", "3", "--format", "csv"});
  CHECK(csv.out.find("wall") == std::string::npos);
}

TEST_CASE("plan then resolve") {
  const auto dir = scratch();
  spit(dir / "tiered.json", R"({"n": 40, "applicant_tiers": [0, 5, 40], "position_tiers": [0, 20, 40]})");
  const auto plan_path = (dir / "plan.json").string();
  auto r = run({"plan", "--config", (dir / "tiered.json").string(), "--out", plan_path, "--delta", "4", "--theta",
                "8"});
  REQUIRE(r.code == 0);
  const auto plan_text = slurp(plan_path);
  const auto parsed = imatch::io::plan_from_json(plan_text);
  REQUIRE(parsed.market.has_value());
  CHECK(imatch::io::plan_to_json(parsed.plan, &*parsed.market) == plan_text);
  const auto ledger = (dir / "l.json").string();
  r = run({"resolve", "--plan", plan_path, "--seed", "3", "--ledger-out", ledger});
  CHECK((r.code == 0 || r.code == 2));
  CHECK(r.out.find("is_interim_stable") != std::string::npos);
  // Every resolution interviews exactly the plan's edges.
  const auto doc = imatch::io::plan_from_json(plan_text);
  CHECK(imatch::io::ledger_from_json(slurp(ledger), 40, 40).size() == doc.plan.edge_count());
  const auto again = run({"resolve", "--plan", plan_path, "--seed", "3"});
  CHECK(again.out == r.out);
  const auto other = run({"resolve", "--plan", plan_path, "--seed", "4"});
  CHECK(other.code != 1);
}

TEST_CASE("verify flags a corrupted matching") {
  const auto dir = scratch();
  const auto m = (dir / "m.json").string();
  const auto l = (dir / "l.json").string();
  const auto mu = (dir / "mu.json").string();
  auto r = run({"simulate-adaptive", "--n", "12", "--scenario", "single-tier", "--seed", "5", "--market-out", m,
                "--ledger-out", l, "--matching-out", mu});
  REQUIRE(r.code == 0);
  r = run({"verify", "--market", m, "--ledger", l, "--matching", mu});
  CHECK(r.code == 0);
  // Rotate the partners: the new pairs were mostly never interviewed.
  auto matching = imatch::io::matching_from_json(slurp(mu), 12, 12);
  std::vector<imatch::Edge> rotated;
  for (const auto& e : matching.pairs()) rotated.push_back({e.applicant, (e.position + 1) % 12});
  spit(mu, imatch::io::matching_to_json(imatch::Matching::from_pairs(12, 12, rotated)));
  r = run({"verify", "--market", m, "--ledger", l, "--matching", mu});
  CHECK(r.code == 2);
  CHECK(r.out.find("\"is_interim_stable\": false") != std::string::npos);
  // Drop one pair: the leftover agents block.
  rotated = matching.pairs();
  rotated.pop_back();
  spit(mu, imatch::io::matching_to_json(imatch::Matching::from_pairs(12, 12, rotated)));
  r = run({"verify", "--market", m, "--ledger", l, "--matching", mu});
  CHECK(r.code == 2);
  CHECK(r.out.find("\"applicant\"") != std::string::npos);
}

TEST_CASE("usage and config errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"simulate-adaptive", "--n", "5", "--bogus"}).code == 1);
  CHECK(run({"simulate-adaptive"}).code == 1);
  CHECK(run({"simulate-adaptive", "--n", "5", "--format", "xml"}).code == 1);
  CHECK(run({"simulate-adaptive", "--config", "/nonexistent/config.json"}).code == 1);
  const auto dir = scratch();
  spit(dir / "bad.json", "{ not json");
  const auto r = run({"simulate-adaptive", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
  CHECK(run({"verify", "--market", (dir / "bad.json").string(), "--ledger", "x", "--matching", "y"}).code == 1);
  CHECK(run({"simulate-nonadaptive", "--n", "10", "--scenario", "strictly-decreasing"}).code == 1);
}

TEST_CASE("simulate-nonadaptive writes its plan") {
  const auto dir = scratch();
  const auto plan = (dir / "sn_plan.json").string();
  const auto r = run({"simulate-nonadaptive", "--n", "50", "--scenario", "mixed", "--delta", "5", "--theta", "10",
                      "--plan-out", plan, "--format", "csv"});
  CHECK((r.code == 0 || r.code == 2));
  CHECK(imatch::io::plan_from_json(slurp(plan)).plan.n == 50);
  CHECK(r.out.rfind("n,seed", 0) == 0);
}

TEST_CASE("sweep subcommand") {
  const auto a = run({"sweep", "--sizes", "10", "20", "--seeds", "3", "--format", "csv", "--jobs", "2"});
  CHECK(a.code == 0);
  const auto b = run({"sweep", "--sizes", "10", "20", "--seeds", "3", "--format", "csv"});
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 7);
  const auto dir = scratch();
  spit(dir / "sweep.json", R"({"sizes": [30], "seeds_per_size": 2, "algorithm": "nonadaptive",
                               "scenario": "single-tier", "params": {"delta": 6, "theta": 12}})");
  const auto c = run({"sweep", "--config", (dir / "sweep.json").string(), "--no-metadata"});
  CHECK(c.code != 1);
  CHECK(c.out.find("\"sizes\"") != std::string::npos);
  CHECK(c.out.find("metadata") == std::string::npos);
}

TEST_CASE("outputs are written atomically") {
  const auto dir = scratch() / "atomic";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto out = dir / "report.json";
  spit(out, "old");
  REQUIRE(run({"simulate-adaptive", "--n", "5", "--out", out.string(), "--trace", (dir / "t.jsonl").string()}).code ==
          0);
  CHECK(slurp(out).find("\"n\": 5") != std::string::npos);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 2);
  CHECK(run({"simulate-adaptive", "--n", "5", "--out", (dir / "missing" / "x.json").string()}).code == 1);
}
