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
//
// netgov: scenario files in, CSV/JSON artifacts out. Every artifact is
// computed fully in memory before anything is written, so a failing run
// leaves no partial files behind.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "netgov/common.hpp"
#include "netgov/controllers.hpp"
#include "netgov/governance.hpp"
#include "netgov/num_solver.hpp"
#include "netgov/scenario.hpp"
#include "netgov/simulation.hpp"
#include "netgov/stability.hpp"
#include "netgov/topology.hpp"

namespace fs = std::filesystem;
using namespace netgov;

namespace {

struct Args {
  std::string input;
  std::string out_dir = ".";
  std::string seeds_override;
  int jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_common_flags(CLI::App* cmd, Args& args, const char* input_help) {
  cmd->add_option("input", args.input, input_help)->required();
  cmd->add_option("--out", args.out_dir, "Output directory (default: .)");
  cmd->add_option("--seeds-override", args.seeds_override,
                  "Comma-separated seed list replacing the scenario's");
  cmd->add_option("--jobs", args.jobs, "Worker threads for parallel parts")
      ->check(CLI::PositiveNumber);
}

std::optional<std::vector<uint64_t>> seed_override_of(const Args& args) {
  if (args.seeds_override.empty()) return std::nullopt;
  std::vector<uint64_t> seeds;
  std::stringstream stream(args.seeds_override);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      size_t used = 0;
      const uint64_t value = std::stoull(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      seeds.push_back(value);
    } catch (const std::exception&) {
      throw ValidationError("--seeds-override: bad seed \"" + token + "\"");
    }
  }
  if (seeds.empty()) {
    throw ValidationError("--seeds-override: empty seed list");
  }
  return seeds;
}

scn::Scenario load(const Args& args) {
  return scn::load_scenario(args.input, seed_override_of(args));
}

// Name -> content; written in one pass after the run has fully succeeded.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

void write_artifacts(const Args& args, const Artifacts& artifacts) {
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory " + args.out_dir +
                          ": " + ec.message());
  }
  for (const auto& [name, content] : artifacts) {
    const fs::path path = fs::path(args.out_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
      throw ValidationError("cannot write " + path.string());
    }
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

double metric_value(const ctl::Metrics& metrics, const std::string& name) {
  if (name == "delivered_rate") return metrics.delivered_rate;
  if (name == "mean_delay") return metrics.mean_delay;
  if (name == "mean_queue_total") return metrics.mean_queue_total;
  if (name == "offered_load") return metrics.offered_load;
  if (name == "utilization") return metrics.utilization;
  throw ValidationError("unknown metric \"" + name + "\"");
}

// Governable system for scenarios without a packet model: configurations
// are scored straight from the analytic models, time is just a counter.
class StaticSystem : public gov::GovernableSystem {
 public:
  explicit StaticSystem(std::vector<ctl::ControllerSpec> controllers)
      : controllers_(std::move(controllers)) {
    std::sort(controllers_.begin(), controllers_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
  }

  void apply(const gov::ConfigurationVector&) override {}
  void advance(int64_t ticks) override { tick_ += ticks; }
  int64_t now() const override { return tick_; }

  std::vector<ctl::UtilityValue> measure(
      const gov::ConfigurationVector& config, int64_t) const override {
    return evaluate(config);
  }

  std::vector<ctl::UtilityValue> evaluate_candidate(
      const gov::ConfigurationVector& config, int64_t) const override {
    return evaluate(config);
  }

 private:
  std::vector<ctl::UtilityValue> evaluate(
      const gov::ConfigurationVector& config) const {
    std::vector<ctl::UtilityValue> values;
    values.reserve(controllers_.size());
    for (const auto& spec : controllers_) {
      values.push_back(ctl::evaluate_utility(spec, ctl::Metrics{},
                                             config.components.at(spec.id)));
    }
    return values;
  }

  std::vector<ctl::ControllerSpec> controllers_;
  int64_t tick_ = 0;
};

int cmd_simulate(const Args& args) {
  const scn::Scenario scenario = load(args);
  const net::Topology topology = net::build_topology(scenario.require_topology());
  const net::TrafficSpec& traffic = scenario.require_traffic();
  const net::Router router(topology, scenario.routing);

  net::NetworkState state =
      net::NetworkState::make(topology, scenario.service_rate,
                              scenario.seeds.front());
  const net::SimulationTrace trace =
      net::run(state, traffic, router, scenario.horizon);

  std::ostringstream csv;
  trace.write_csv(csv, scn::meta_line(scenario));

  int64_t delivered_now = 0;
  double delay_sum = 0.0;
  for (const auto& record : trace.records) {
    delivered_now += record.delivered_now;
    delay_sum += record.delay_sum_now;
  }
  const bool conserved =
      state.created_total ==
      state.delivered_total + state.dropped_total + state.queue_total();

  nlohmann::json summary;
  summary["meta"] = scn::meta_json(scenario);
  summary["ticks"] = scenario.horizon;
  summary["created_total"] = state.created_total;
  summary["delivered_total"] = state.delivered_total;
  summary["dropped_total"] = state.dropped_total;
  summary["rejected_total"] = state.rejected_total;
  summary["in_flight"] = state.in_flight();
  summary["queue_total"] = state.queue_total();
  summary["mean_delay"] =
      delivered_now > 0 ? delay_sum / static_cast<double>(delivered_now) : 0.0;
  summary["conservation_ok"] = conserved;

  write_artifacts(args, {{"trace.csv", csv.str()},
                         {"summary.json", dump_json(summary)}});
  if (!conserved) {
    throw InvariantError("packet conservation failed at end of run");
  }
  return 0;
}

int run_phase_sweep(const Args& args, const scn::Scenario& scenario,
                    const scn::PhaseSweepExperiment& experiment) {
  lab::SweepScenario sweep;
  sweep.topology = net::build_topology(scenario.require_topology());
  sweep.service_rate = scenario.service_rate;
  sweep.traffic = scenario.require_traffic();
  sweep.routing = scenario.routing;
  sweep.ticks = experiment.ticks;

  lab::PhaseSweepConfig config;
  config.lambdas = experiment.lambdas;
  config.seeds = scenario.seeds;
  config.jobs = args.jobs;
  config.hysteresis = experiment.hysteresis;

  const lab::SweepResult result = lab::phase_sweep(sweep, config);
  // Grids too short for the detector count as "no transition found".
  const std::optional<double> lambda_c =
      result.up.size() >= 4
          ? lab::detect_transition(result.up, experiment.transition_threshold)
          : std::nullopt;

  Artifacts artifacts;
  {
    std::ostringstream csv;
    lab::write_sweep_csv(csv, result.up, scn::meta_line(scenario));
    artifacts.emplace_back("sweep.csv", csv.str());
  }
  if (experiment.hysteresis) {
    std::ostringstream csv;
    lab::write_sweep_csv(csv, result.down, scn::meta_line(scenario));
    artifacts.emplace_back("sweep_down.csv", csv.str());
  }
  nlohmann::json report;
  report["meta"] = scn::meta_json(scenario);
  report["threshold"] = experiment.transition_threshold;
  report["transition_detected"] = lambda_c.has_value();
  report["lambda_c"] =
      lambda_c ? nlohmann::json(*lambda_c) : nlohmann::json(nullptr);
  artifacts.emplace_back("lambda_c.json", dump_json(report));

  write_artifacts(args, artifacts);
  return 0;
}

int run_calibrate(const Args& args, const scn::Scenario& scenario,
                  const scn::CalibrateExperiment& experiment) {
  const net::Topology topology = net::build_topology(scenario.require_topology());
  const ctl::ControllerSpec* controller = nullptr;
  for (const auto& spec : scenario.controllers) {
    if (spec.id == experiment.controller) controller = &spec;
  }
  if (!controller) {
    throw ValidationError("experiment.controller: no controller named \"" +
                          experiment.controller + "\"");
  }
  if (experiment.ticks < 2) {
    throw ValidationError("experiment.ticks: must be >= 2");
  }

  // One run per (configuration, seed); the measured metric over the second
  // half becomes a table entry keyed by the configuration's canonical form.
  std::map<std::string, double> table;
  const TickRange window{experiment.ticks / 2, experiment.ticks};
  for (const auto& config : controller->space) {
    net::TrafficSpec traffic = scenario.require_traffic();
    net::RoutingPolicy routing = scenario.routing;
    gov::ConfigurationVector vector;
    vector.components[controller->id] = config;
    gov::NetSimSystem::apply_actuation({*controller}, vector, traffic,
                                       routing);
    const net::Router router(topology, routing);
    double sum = 0.0;
    for (const uint64_t seed : scenario.seeds) {
      net::NetworkState state =
          net::NetworkState::make(topology, scenario.service_rate, seed);
      const net::SimulationTrace trace =
          net::run(state, traffic, router, experiment.ticks);
      sum += metric_value(ctl::monitor(trace, window), experiment.metric);
    }
    table[config.canonical()] =
        sum / static_cast<double>(scenario.seeds.size());
  }

  nlohmann::json report;
  report["meta"] = scn::meta_json(scenario);
  report["controller"] = controller->id;
  report["metric"] = experiment.metric;
  report["ticks"] = experiment.ticks;
  report["table"] = table;

  write_artifacts(args, {{"calibration.json", dump_json(report)}});
  return 0;
}

int cmd_sweep(const Args& args) {
  const scn::Scenario scenario = load(args);
  if (const auto* sweep =
          std::get_if<scn::PhaseSweepExperiment>(&scenario.experiment)) {
    return run_phase_sweep(args, scenario, *sweep);
  }
  if (const auto* calibrate =
          std::get_if<scn::CalibrateExperiment>(&scenario.experiment)) {
    return run_calibrate(args, scenario, *calibrate);
  }
  throw ValidationError(
      "scenario.experiment: sweep needs a phase_sweep or calibrate block");
}

int cmd_num(const Args& args) {
  const nlohmann::json doc = scn::load_json(args.input);
  const num::RateProblem problem = num::problem_from_json(doc);
  const std::string hash = stable_digest(doc.dump());

  const num::RateSolution solution = num::solve_num(problem);
  const num::KktReport kkt = num::verify_kkt(problem, solution, 1e-6);

  nlohmann::json report = num::solution_to_json(problem, solution, &kkt);
  report["meta"] = scn::meta_json(hash, {});

  write_artifacts(args, {{"solution.json", dump_json(report)}});
  if (!kkt.pass()) {
    std::cerr << "error: solver result failed KKT verification\n";
    return static_cast<int>(ErrorCode::kInvariant);
  }
  return 0;
}

nlohmann::json coupled_run_json(const lab::CoupledRun& run) {
  nlohmann::json j;
  j["final_n"] = run.final_n;
  j["mean"] = run.metrics.mean;
  j["amplitude"] = run.metrics.amplitude;
  j["stddev"] = run.metrics.stddev;
  j["period"] = run.metrics.period ? nlohmann::json(*run.metrics.period)
                                   : nlohmann::json(nullptr);
  return j;
}

std::string coupled_series_csv(const lab::CoupledRun& run,
                               const std::string& meta) {
  std::ostringstream csv;
  csv << "# " << meta << "\n";
  csv << "tick,n,u\n";
  for (size_t i = 0; i < run.n_series.size(); ++i) {
    csv << i << ',' << run.n_series[i] << ','
        << format_g6(run.u_series[i]) << "\n";
  }
  return csv.str();
}

int run_coupled_experiment(const Args& args, const scn::Scenario& scenario,
                           const scn::CoupledExperiment& experiment) {
  const lab::CoupledResult result =
      lab::run_coupled(experiment.scenario, experiment.governed);
  const std::string meta = scn::meta_line(scenario);

  nlohmann::json report;
  report["meta"] = scn::meta_json(scenario);
  report["ungoverned"] = coupled_run_json(result.ungoverned);
  report["governed"] = result.governed ? coupled_run_json(*result.governed)
                                       : nlohmann::json(nullptr);
  report["set_point"] = result.set_point ? nlohmann::json(*result.set_point)
                                         : nlohmann::json(nullptr);
  report["set_point_utility"] =
      result.set_point_utility ? nlohmann::json(*result.set_point_utility)
                               : nlohmann::json(nullptr);
  report["amplitude_ratio"] =
      result.amplitude_ratio ? nlohmann::json(*result.amplitude_ratio)
                             : nlohmann::json(nullptr);

  Artifacts artifacts;
  artifacts.emplace_back("coupled.json", dump_json(report));
  artifacts.emplace_back("coupled_ungoverned.csv",
                         coupled_series_csv(result.ungoverned, meta));
  if (result.governed) {
    artifacts.emplace_back("coupled_governed.csv",
                           coupled_series_csv(*result.governed, meta));
  }
  if (result.governance) {
    std::ostringstream csv;
    result.governance->write_csv(csv, meta);
    artifacts.emplace_back("governance_trace.csv", csv.str());
    nlohmann::json trace;
    trace["meta"] = scn::meta_json(scenario);
    trace["entries"] = result.governance->to_json();
    artifacts.emplace_back("governance_trace.json", dump_json(trace));
  }
  write_artifacts(args, artifacts);
  return 0;
}

int cmd_govern(const Args& args) {
  const scn::Scenario scenario = load(args);
  if (const auto* coupled =
          std::get_if<scn::CoupledExperiment>(&scenario.experiment)) {
    return run_coupled_experiment(args, scenario, *coupled);
  }
  if (!std::holds_alternative<std::monostate>(scenario.experiment) &&
      !std::holds_alternative<scn::GovernExperiment>(scenario.experiment)) {
    throw ValidationError(
        "scenario.experiment: govern needs a govern or coupled block");
  }
  if (scenario.controllers.empty()) {
    throw ValidationError("scenario.controllers: govern needs controllers");
  }

  gov::SearchOptions options = scenario.search;
  options.jobs = args.jobs;
  const gov::ConfigurationVector* initial =
      scenario.initial_config ? &*scenario.initial_config : nullptr;

  gov::GovernOutcome outcome;
  if (scenario.topology && scenario.traffic) {
    gov::NetSimSystem::Setup setup;
    setup.topology = net::build_topology(*scenario.topology);
    setup.service_rate = scenario.service_rate;
    setup.traffic = *scenario.traffic;
    setup.routing = scenario.routing;
    setup.seed = scenario.seeds.front();
    setup.reset_on_reconfigure = scenario.reset_on_reconfigure;
    gov::NetSimSystem system(setup, scenario.controllers);
    outcome = gov::govern_loop(system, scenario.controllers,
                               scenario.global_utility, scenario.trigger,
                               scenario.horizon, options, initial);
  } else {
    StaticSystem system(scenario.controllers);
    outcome = gov::govern_loop(system, scenario.controllers,
                               scenario.global_utility, scenario.trigger,
                               scenario.horizon, options, initial);
  }
  if (!outcome.any_actuating) {
    std::cerr << "warning: no actuating controllers; adopted configurations "
                 "only steer the evaluation\n";
  }

  const std::string meta = scn::meta_line(scenario);
  Artifacts artifacts;
  {
    std::ostringstream csv;
    outcome.trace.write_csv(csv, meta);
    artifacts.emplace_back("governance_trace.csv", csv.str());
  }
  {
    nlohmann::json trace;
    trace["meta"] = scn::meta_json(scenario);
    trace["entries"] = outcome.trace.to_json();
    artifacts.emplace_back("governance_trace.json", dump_json(trace));
  }
  {
    std::ostringstream csv;
    csv << "# " << meta << "\n";
    csv << "tick,U_g\n";
    for (size_t i = 0; i < outcome.u_g_series.size(); ++i) {
      csv << i << ',' << format_g6(outcome.u_g_series[i]) << "\n";
    }
    artifacts.emplace_back("u_g_series.csv", csv.str());
  }
  {
    const double threshold = scenario.trigger.threshold;
    int64_t above = 0;
    for (const double value : outcome.u_g_series) {
      if (value >= threshold) ++above;
    }
    nlohmann::json summary;
    summary["meta"] = scn::meta_json(scenario);
    summary["horizon"] = scenario.horizon;
    summary["triggers"] = outcome.trace.entries.size();
    summary["final_config"] = outcome.final_config.to_json();
    summary["threshold"] = std::isfinite(threshold)
                               ? nlohmann::json(threshold)
                               : nlohmann::json(nullptr);
    summary["fraction_above_threshold"] =
        outcome.u_g_series.empty()
            ? 1.0
            : static_cast<double>(above) /
                  static_cast<double>(outcome.u_g_series.size());
    summary["any_actuating"] = outcome.any_actuating;
    artifacts.emplace_back("summary.json", dump_json(summary));
  }
  write_artifacts(args, artifacts);
  return 0;
}

int cmd_pareto(const Args& args) {
  const scn::Scenario scenario = load(args);
  if (!std::holds_alternative<std::monostate>(scenario.experiment) &&
      !std::holds_alternative<scn::ParetoExperiment>(scenario.experiment)) {
    throw ValidationError(
        "scenario.experiment: pareto needs a pareto block or none");
  }
  if (scenario.controllers.empty()) {
    throw ValidationError("scenario.controllers: pareto needs controllers");
  }
  const gov::JointSpace space = gov::make_joint_space(scenario.controllers);

  std::vector<std::string> objectives;
  if (const auto* pareto =
          std::get_if<scn::ParetoExperiment>(&scenario.experiment)) {
    objectives = pareto->objectives;
  }
  if (objectives.empty()) {
    for (const auto& spec : scenario.controllers) {
      objectives.push_back(spec.id);
    }
    std::sort(objectives.begin(), objectives.end());
  }

  std::vector<gov::GovernanceEvaluation> evaluations;
  if (scenario.topology && scenario.traffic) {
    gov::NetSimSystem::Setup setup;
    setup.topology = net::build_topology(*scenario.topology);
    setup.service_rate = scenario.service_rate;
    setup.traffic = *scenario.traffic;
    setup.routing = scenario.routing;
    setup.seed = scenario.seeds.front();
    setup.reset_on_reconfigure = scenario.reset_on_reconfigure;
    const gov::NetSimSystem system(setup, scenario.controllers);
    const int64_t window = scenario.trigger.lookahead;
    const auto evaluator = [&](const gov::ConfigurationVector& config) {
      return system.evaluate_candidate(config, window);
    };
    evaluations = gov::evaluate_all(space, evaluator, scenario.global_utility,
                                    scenario.search.budget, args.jobs);
  } else {
    const StaticSystem system(scenario.controllers);
    const auto evaluator = [&](const gov::ConfigurationVector& config) {
      return system.evaluate_candidate(config, 0);
    };
    evaluations = gov::evaluate_all(space, evaluator, scenario.global_utility,
                                    scenario.search.budget, args.jobs);
  }
  const std::vector<gov::GovernanceEvaluation> front =
      gov::pareto_front(evaluations, objectives);

  const auto rows_csv = [&](const std::vector<gov::GovernanceEvaluation>& rows) {
    std::ostringstream csv;
    csv << "# " << scn::meta_line(scenario) << "\n";
    csv << "config_json";
    for (const auto& id : objectives) csv << ',' << id;
    csv << ",U_g\n";
    for (const auto& evaluation : rows) {
      csv << csv_quote(evaluation.config.canonical());
      for (const auto& id : objectives) {
        const auto it = std::find_if(
            evaluation.utilities.begin(), evaluation.utilities.end(),
            [&](const ctl::UtilityValue& u) { return u.controller_id == id; });
        if (it == evaluation.utilities.end()) {
          throw ValidationError("objective \"" + id +
                                "\" names no controller");
        }
        csv << ',' << format_g6(it->value);
      }
      csv << ',' << format_g6(evaluation.u_g) << "\n";
    }
    return csv.str();
  };

  write_artifacts(args, {{"evaluations.csv", rows_csv(evaluations)},
                         {"front.csv", rows_csv(front)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network self-governance toolkit"};
  app.require_subcommand(1);

  Args args;
  std::function<int(const Args&)> action;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the packet model once and write the tick trace");
  add_common_flags(simulate, args, "Scenario JSON file");
  simulate->callback([&] { action = cmd_simulate; });

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Phase sweep over loads, or calibrate an empirical model");
  add_common_flags(sweep, args, "Scenario JSON file");
  sweep->callback([&] { action = cmd_sweep; });

  CLI::App* num_cmd = app.add_subcommand(
      "num", "Solve a rate allocation problem and verify its KKT conditions");
  add_common_flags(num_cmd, args, "Rate problem JSON file");
  num_cmd->callback([&] { action = cmd_num; });

  CLI::App* govern = app.add_subcommand(
      "govern", "Run the governance loop or the coupled-scaler study");
  add_common_flags(govern, args, "Scenario JSON file");
  govern->callback([&] { action = cmd_govern; });

  CLI::App* pareto = app.add_subcommand(
      "pareto", "Enumerate a joint space and report the non-dominated front");
  add_common_flags(pareto, args, "Scenario JSON file");
  pareto->callback([&] { action = cmd_pareto; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::kValidation);
  }

  try {
    return action(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::kInvariant);
  }
}
