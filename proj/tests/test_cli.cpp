// Copyright 2026 the netgov authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end checks against the installed binary. Every case builds its
// inputs in a scratch directory, invokes the real executable and inspects
// exit code, artifacts and diagnostics.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CliResult run_cli(const std::string& arguments, const fs::path& scratch) {
  const fs::path out_file = scratch / "cli_stdout.txt";
  const fs::path err_file = scratch / "cli_stderr.txt";
  const std::string command = std::string(NETGOV_CLI_PATH) + " " + arguments +
                              " >" + out_file.string() + " 2>" +
                              err_file.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& content) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

fs::path write_json(const fs::path& dir, const std::string& name,
                    const nlohmann::json& doc) {
  return write_file(dir, name, doc.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  return nlohmann::json::parse(slurp(path));
}

nlohmann::json ring_scenario(int nodes, double lambda, int64_t horizon) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["topology"] = {{"kind", "ring"}, {"nodes", nodes}};
  doc["traffic"] = {{"lambda", lambda}};
  doc["seeds"] = {42};
  doc["horizon"] = horizon;
  return doc;
}

nlohmann::json pool_controllers() {
  const nlohmann::json space = {
      {"param", "n"},
      {"range", {{"from", 0}, {"to", 50}, {"step", 1}}}};
  return nlohmann::json::array(
      {{{"id", "throughput"},
        {"kind", "throughput"},
        {"config_group", "pool"},
        {"space", space},
        {"model",
         {{"kind", "analytic"}, {"form", "saturating-throughput"}}}},
       {{"id", "cost"},
        {"kind", "cost"},
        {"config_group", "pool"},
        {"space", space},
        {"model", {{"kind", "analytic"}, {"form", "linear-cost"}}}}});
}

nlohmann::json pool_scenario() {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["seeds"] = {5};
  doc["horizon"] = 12;
  doc["controllers"] = pool_controllers();
  doc["global_utility"] = {
      {"aggregator", "weighted-sum"},
      {"weights", {{"throughput", 1.0}, {"cost", 1.0}}}};
  doc["trigger"] = {{"period", 6}};
  doc["search"] = {{"strategy", "exhaustive"}};
  return doc;
}

nlohmann::json oracle_problem() {
  nlohmann::json doc;
  doc["routes"] = {{0, 1}, {0}, {1}};
  doc["capacities"] = {1.0, 1.0};
  doc["utilities"] = nlohmann::json::array({{{"family", "log"}},
                                            {{"family", "log"}},
                                            {{"family", "log"}}});
  return doc;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes conserved artifacts for zero load") {
  testutil::TempDir dir("cli_sim0");
  const fs::path input =
      write_json(dir.path(), "scenario.json", ring_scenario(8, 0.0, 200));
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("simulate " + input.string() + " --out " + out.string(),
              dir.path());
  CHECK(r.exit_code == 0);

  const nlohmann::json summary = read_json(out / "summary.json");
  CHECK(summary.at("created_total") == 0);
  CHECK(summary.at("delivered_total") == 0);
  CHECK(summary.at("conservation_ok") == true);
  CHECK(summary.at("meta").at("tool_version") == "0.1.0");
  CHECK(summary.at("meta").at("seeds") == nlohmann::json({42}));

  const std::string trace = slurp(out / "trace.csv");
  CHECK(trace.rfind("# scenario_hash=", 0) == 0);
  CHECK(trace.find("seeds=42") != std::string::npos);
  CHECK(trace.find("tool_version=0.1.0") != std::string::npos);
}

TEST_CASE("simulate is byte-identical across reruns") {
  testutil::TempDir dir("cli_repeat");
  const fs::path input =
      write_json(dir.path(), "scenario.json", ring_scenario(8, 0.3, 400));
  const fs::path out_a = dir.path() / "a";
  const fs::path out_b = dir.path() / "b";
  CHECK(run_cli("simulate " + input.string() + " --out " + out_a.string(),
                dir.path())
            .exit_code == 0);
  CHECK(run_cli("simulate " + input.string() + " --out " + out_b.string(),
                dir.path())
            .exit_code == 0);
  CHECK(slurp(out_a / "trace.csv") == slurp(out_b / "trace.csv"));
  CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));
}

TEST_CASE("seed override rewrites the effective scenario") {
  testutil::TempDir dir("cli_seeds");
  const fs::path input =
      write_json(dir.path(), "scenario.json", ring_scenario(8, 0.3, 200));
  const fs::path out_a = dir.path() / "a";
  const fs::path out_b = dir.path() / "b";
  CHECK(run_cli("simulate " + input.string() + " --out " + out_a.string(),
                dir.path())
            .exit_code == 0);
  CHECK(run_cli("simulate " + input.string() + " --out " + out_b.string() +
                    " --seeds-override 7,9",
                dir.path())
            .exit_code == 0);
  const nlohmann::json base = read_json(out_a / "summary.json");
  const nlohmann::json rewritten = read_json(out_b / "summary.json");
  CHECK(rewritten.at("meta").at("seeds") == nlohmann::json({7, 9}));
  // The hash covers effective inputs, so overriding seeds must change it.
  CHECK(base.at("meta").at("scenario_hash") !=
        rewritten.at("meta").at("scenario_hash"));

  const CliResult bad =
      run_cli("simulate " + input.string() + " --out " +
                  (dir.path() / "c").string() + " --seeds-override 7,x",
              dir.path());
  CHECK(bad.exit_code == 2);
}

TEST_CASE("malformed json exits 2 with a line diagnostic and no artifacts") {
  testutil::TempDir dir("cli_badjson");
  const fs::path input = write_file(dir.path(), "broken.json",
                                    "{\n  \"version\": 1,\n  \"seeds\": [\n");
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("simulate " + input.string() + " --out " + out.string(),
              dir.path());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("broken.json:") != std::string::npos);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown scenario fields are named in the diagnostic") {
  testutil::TempDir dir("cli_unknown");
  nlohmann::json doc = ring_scenario(8, 0.3, 200);
  doc["traffic"]["lambada"] = 0.5;
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("simulate " + input.string() + " --out " + out.string(),
              dir.path());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("lambada") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("sweep rejects a single seed") {
  testutil::TempDir dir("cli_sweep1");
  nlohmann::json doc = ring_scenario(16, 0.1, 400);
  doc["experiment"] = {{"kind", "phase_sweep"},
                       {"lambdas", {0.05, 0.1}},
                       {"ticks", 400}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "sweep " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("short sweep below capacity reports no transition") {
  testutil::TempDir dir("cli_sweep2");
  nlohmann::json doc = ring_scenario(16, 0.1, 400);
  doc["seeds"] = {1, 2};
  doc["experiment"] = {{"kind", "phase_sweep"},
                       {"lambdas", {0.05, 0.1}},
                       {"ticks", 400}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "sweep " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const nlohmann::json report = read_json(out / "lambda_c.json");
  CHECK(report.at("transition_detected") == false);
  CHECK(report.at("lambda_c").is_null());
  const std::string csv = slurp(out / "sweep.csv");
  CHECK(csv.find("lambda,rho_mean,rho_std,seeds") != std::string::npos);
}

TEST_CASE("num solves the two-link three-flow problem") {
  testutil::TempDir dir("cli_num");
  const fs::path input =
      write_json(dir.path(), "problem.json", oracle_problem());
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("num " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const nlohmann::json solution = read_json(out / "solution.json");
  REQUIRE(solution.at("rates").size() == 3);
  CHECK(std::abs(solution.at("rates")[0].get<double>() - 1.0 / 3.0) < 1e-3);
  CHECK(std::abs(solution.at("rates")[1].get<double>() - 2.0 / 3.0) < 1e-3);
  CHECK(std::abs(solution.at("rates")[2].get<double>() - 2.0 / 3.0) < 1e-3);
  CHECK(solution.at("kkt").at("pass") == true);
}

TEST_CASE("num rejects a zero capacity") {
  testutil::TempDir dir("cli_numbad");
  nlohmann::json doc = oracle_problem();
  doc["capacities"] = {1.0, 0.0};
  const fs::path input = write_json(dir.path(), "problem.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("num " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("num reports non-convergence with exit 4") {
  // A weight ratio of 1e8 drives the automatic step size so low that the
  // price cannot climb to its fixed point within the iteration budget.
  testutil::TempDir dir("cli_numslow");
  nlohmann::json doc;
  doc["routes"] = {{0}, {0}};
  doc["capacities"] = {1.0};
  doc["utilities"] = nlohmann::json::array(
      {{{"family", "log"}, {"weight", 1e8}}, {{"family", "log"}}});
  const fs::path input = write_json(dir.path(), "problem.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r =
      run_cli("num " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("govern settles the pool scenario on thirteen instances") {
  testutil::TempDir dir("cli_govern");
  const fs::path input =
      write_json(dir.path(), "scenario.json", pool_scenario());
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "govern " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const nlohmann::json summary = read_json(out / "summary.json");
  CHECK(summary.at("final_config").at("throughput").at("n") == 13);
  CHECK(summary.at("final_config").at("cost").at("n") == 13);
  const std::string trace = slurp(out / "governance_trace.csv");
  CHECK(trace.find("tick,reason,examined,U_g,config_json") !=
        std::string::npos);
  CHECK(trace.find("periodic") != std::string::npos);
  const std::string series = slurp(out / "u_g_series.csv");
  CHECK(series.find("tick,U_g") != std::string::npos);
  CHECK(series.find("59.7726") != std::string::npos);
}

TEST_CASE("govern runs the coupled scaler comparison") {
  testutil::TempDir dir("cli_coupled");
  nlohmann::json doc;
  doc["version"] = 1;
  doc["seeds"] = {1};
  doc["experiment"] = {{"kind", "coupled"}, {"governed", true}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "govern " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const nlohmann::json report = read_json(out / "coupled.json");
  CHECK(report.at("ungoverned").at("amplitude") == 6.0);
  CHECK(report.at("ungoverned").at("period") == 2);
  CHECK(report.at("governed").at("amplitude") == 0.0);
  CHECK(report.at("governed").at("final_n") == 13);
  CHECK(report.at("set_point") == 13);
  // A motionless governed run has no finite amplitude ratio to report.
  CHECK(report.at("amplitude_ratio").is_null());
  CHECK(fs::exists(out / "coupled_ungoverned.csv"));
  CHECK(fs::exists(out / "coupled_governed.csv"));
  CHECK(fs::exists(out / "governance_trace.csv"));
  const std::string series = slurp(out / "coupled_governed.csv");
  CHECK(series.find("tick,n,u") != std::string::npos);
}

TEST_CASE("govern exits 5 when the search budget is too small") {
  testutil::TempDir dir("cli_budget");
  nlohmann::json doc = pool_scenario();
  doc["search"]["budget"] = 10;  // joint space has 51 points
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "govern " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 5);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("pareto on the pool scenario keeps the whole grid") {
  testutil::TempDir dir("cli_pareto");
  nlohmann::json doc = pool_scenario();
  doc["experiment"] = {{"kind", "pareto"},
                       {"objectives", {"throughput", "cost"}}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "pareto " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const std::string front = slurp(out / "front.csv");
  const std::string evals = slurp(out / "evaluations.csv");
  CHECK(front.find("config_json,throughput,cost,U_g") != std::string::npos);
  // Throughput rises and cost falls with n, so no point dominates another:
  // 51 rows plus the meta and header lines.
  CHECK(std::count(front.begin(), front.end(), '\n') == 53);
  CHECK(std::count(evals.begin(), evals.end(), '\n') == 53);
}

TEST_CASE("calibrate tabulates a controller metric per configuration") {
  testutil::TempDir dir("cli_calibrate");
  nlohmann::json doc = ring_scenario(8, 0.4, 200);
  doc["seeds"] = {3, 4};
  doc["controllers"] = nlohmann::json::array(
      {{{"id", "gate"},
        {"kind", "admission"},
        {"space", {{"param", "limit"}, {"values", {0, 50}}}}}});
  doc["experiment"] = {{"kind", "calibrate"},
                       {"controller", "gate"},
                       {"metric", "delivered_rate"},
                       {"ticks", 200}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "sweep " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 0);
  const nlohmann::json report = read_json(out / "calibration.json");
  CHECK(report.at("controller") == "gate");
  CHECK(report.at("metric") == "delivered_rate");
  const auto& table = report.at("table");
  REQUIRE(table.size() == 2);
  const double closed = table.at("{\"limit\":0}").get<double>();
  const double open = table.at("{\"limit\":50}").get<double>();
  CHECK(closed == 0.0);
  CHECK(open > 0.0);
}

TEST_CASE("subcommand is required") {
  testutil::TempDir dir("cli_nosub");
  const CliResult r = run_cli("", dir.path());
  CHECK(r.exit_code == 2);
}

TEST_CASE("wrong experiment kind for the subcommand exits 2") {
  testutil::TempDir dir("cli_wrongkind");
  nlohmann::json doc = pool_scenario();
  doc["experiment"] = {{"kind", "pareto"}};
  const fs::path input = write_json(dir.path(), "scenario.json", doc);
  const fs::path out = dir.path() / "out";
  const CliResult r = run_cli(
      "sweep " + input.string() + " --out " + out.string(), dir.path());
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(out));
}

}  // TEST_SUITE
