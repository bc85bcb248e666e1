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

#include "netgov/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "netgov/common.hpp"
#include "netgov/num_solver.hpp"

namespace netgov::scn {

namespace {

// Tracks which keys a block consumed so leftovers can be rejected by name.
// A JSON null is treated as an absent field.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ValidationError(path_ + ": expected an object");
    }
  }

  const nlohmann::json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const nlohmann::json& require(const std::string& key) {
    const nlohmann::json* value = find(key);
    if (!value) {
      throw ValidationError(path_ + ": missing field \"" + key + "\"");
    }
    return *value;
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  void done() const {
    for (const auto& item : j_.items()) {
      if (used_.count(item.key()) == 0) {
        throw ValidationError(path_ + ": unknown field \"" + item.key() +
                              "\"");
      }
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

int64_t as_int(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ValidationError(path + ": expected an integer");
  }
  return j.get<int64_t>();
}

uint64_t as_seed(const nlohmann::json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<uint64_t>();
  if (j.is_number_integer() && j.get<int64_t>() >= 0) {
    return static_cast<uint64_t>(j.get<int64_t>());
  }
  throw ValidationError(path + ": expected a non-negative integer");
}

double as_double(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path + ": expected a number");
  return j.get<double>();
}

bool as_bool(const nlohmann::json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path + ": expected a boolean");
  return j.get<bool>();
}

std::string as_string(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path + ": expected a string");
  return j.get<std::string>();
}

int64_t opt_int(Fields& f, const std::string& key, int64_t fallback) {
  const nlohmann::json* j = f.find(key);
  return j ? as_int(*j, f.sub(key)) : fallback;
}

double opt_double(Fields& f, const std::string& key, double fallback) {
  const nlohmann::json* j = f.find(key);
  return j ? as_double(*j, f.sub(key)) : fallback;
}

bool opt_bool(Fields& f, const std::string& key, bool fallback) {
  const nlohmann::json* j = f.find(key);
  return j ? as_bool(*j, f.sub(key)) : fallback;
}

std::string opt_string(Fields& f, const std::string& key,
                       const std::string& fallback) {
  const nlohmann::json* j = f.find(key);
  return j ? as_string(*j, f.sub(key)) : fallback;
}

net::TopologySpec parse_topology(const nlohmann::json& j,
                                 const std::string& path) {
  Fields f(j, path);
  net::TopologySpec spec;
  const std::string kind = as_string(f.require("kind"), f.sub("kind"));
  if (kind == "ring") {
    spec.kind = net::TopologyKind::kRing;
    spec.nodes = static_cast<int>(as_int(f.require("nodes"), f.sub("nodes")));
  } else if (kind == "lattice") {
    spec.kind = net::TopologyKind::kLattice;
    spec.side = static_cast<int>(as_int(f.require("side"), f.sub("side")));
  } else if (kind == "random") {
    spec.kind = net::TopologyKind::kRandom;
    spec.nodes = static_cast<int>(as_int(f.require("nodes"), f.sub("nodes")));
    spec.edge_prob =
        as_double(f.require("edge_prob"), f.sub("edge_prob"));
    spec.seed = as_seed(f.require("seed"), f.sub("seed"));
  } else {
    throw ValidationError(f.sub("kind") + ": unknown topology kind \"" +
                          kind + "\"");
  }
  spec.capacity = static_cast<int>(opt_int(f, "capacity", 1));
  f.done();
  return spec;
}

net::TrafficSpec parse_traffic(const nlohmann::json& j,
                               const std::string& path) {
  Fields f(j, path);
  net::TrafficSpec traffic;
  traffic.lambda = as_double(f.require("lambda"), f.sub("lambda"));
  if (const nlohmann::json* policy = f.find("destination_policy")) {
    const std::string name = as_string(*policy, f.sub("destination_policy"));
    if (name == "uniform-random") {
      traffic.destination_policy = net::DestinationPolicy::kUniformRandom;
    } else if (name == "fixed-pairs") {
      traffic.destination_policy = net::DestinationPolicy::kFixedPairs;
    } else {
      throw ValidationError(f.sub("destination_policy") +
                            ": unknown policy \"" + name + "\"");
    }
  }
  if (const nlohmann::json* pairs = f.find("pairs")) {
    const std::string pairs_path = f.sub("pairs");
    if (!pairs->is_array()) {
      throw ValidationError(pairs_path + ": expected an array");
    }
    for (size_t i = 0; i < pairs->size(); ++i) {
      const nlohmann::json& pair = (*pairs)[i];
      const std::string pair_path =
          pairs_path + "[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2) {
        throw ValidationError(pair_path + ": expected [source, destination]");
      }
      traffic.pairs.emplace_back(
          static_cast<int>(as_int(pair[0], pair_path)),
          static_cast<int>(as_int(pair[1], pair_path)));
    }
  }
  if (const nlohmann::json* ttl = f.find("ttl")) {
    traffic.ttl = static_cast<int>(as_int(*ttl, f.sub("ttl")));
  }
  if (const nlohmann::json* limit = f.find("admission_queue_limit")) {
    traffic.admission_queue_limit =
        static_cast<int>(as_int(*limit, f.sub("admission_queue_limit")));
  }
  if (const nlohmann::json* step = f.find("load_step")) {
    Fields sf(*step, f.sub("load_step"));
    net::LoadStep load_step;
    load_step.at_tick = as_int(sf.require("at_tick"), sf.sub("at_tick"));
    load_step.factor = as_double(sf.require("factor"), sf.sub("factor"));
    sf.done();
    traffic.load_step = load_step;
  }
  f.done();
  return traffic;
}

net::RoutingKind routing_kind_from_string(const std::string& name,
                                          const std::string& path) {
  if (name == "static-shortest-path") {
    return net::RoutingKind::kStaticShortestPath;
  }
  if (name == "queue-aware-shortest-path") {
    return net::RoutingKind::kQueueAwareShortestPath;
  }
  if (name == "local-greedy") return net::RoutingKind::kLocalGreedy;
  throw ValidationError(path + ": unknown routing kind \"" + name + "\"");
}

net::RoutingPolicy parse_routing(const nlohmann::json& j,
                                 const std::string& path) {
  Fields f(j, path);
  net::RoutingPolicy policy;
  if (const nlohmann::json* kind = f.find("kind")) {
    policy.kind =
        routing_kind_from_string(as_string(*kind, f.sub("kind")), f.sub("kind"));
  }
  policy.queue_weight = opt_double(f, "queue_weight", policy.queue_weight);
  f.done();
  return policy;
}

ctl::ConfigValue parse_config_value(const nlohmann::json& j,
                                    const std::string& path) {
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ValidationError(path + ": expected a number or string");
}

ctl::Configuration parse_configuration(const nlohmann::json& j,
                                       const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  if (j.empty()) throw ValidationError(path + ": empty configuration");
  ctl::Configuration config;
  for (const auto& item : j.items()) {
    config.set(item.key(),
               parse_config_value(item.value(), path + "." + item.key()));
  }
  return config;
}

std::vector<ctl::Configuration> parse_space(const nlohmann::json& j,
                                            const std::string& path) {
  std::vector<ctl::Configuration> space;
  if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) {
      space.push_back(
          parse_configuration(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return space;
  }
  // Convenience form: one named parameter over a range or a value list.
  Fields f(j, path);
  const std::string param = as_string(f.require("param"), f.sub("param"));
  if (const nlohmann::json* range = f.find("range")) {
    Fields rf(*range, f.sub("range"));
    const int64_t from = as_int(rf.require("from"), rf.sub("from"));
    const int64_t to = as_int(rf.require("to"), rf.sub("to"));
    const int64_t step = opt_int(rf, "step", 1);
    rf.done();
    if (step < 1) throw ValidationError(rf.sub("step") + ": must be >= 1");
    if (to < from) throw ValidationError(f.sub("range") + ": to < from");
    for (int64_t value = from; value <= to; value += step) {
      ctl::Configuration config;
      config.set(param, value);
      space.push_back(std::move(config));
    }
  } else if (const nlohmann::json* values = f.find("values")) {
    const std::string values_path = f.sub("values");
    if (!values->is_array() || values->empty()) {
      throw ValidationError(values_path + ": expected a non-empty array");
    }
    for (size_t i = 0; i < values->size(); ++i) {
      ctl::Configuration config;
      config.set(param, parse_config_value(
                            (*values)[i],
                            values_path + "[" + std::to_string(i) + "]"));
      space.push_back(std::move(config));
    }
  } else {
    throw ValidationError(path + ": needs \"range\" or \"values\"");
  }
  f.done();
  return space;
}

ctl::PerformanceModel parse_model(const nlohmann::json& j,
                                  const std::string& path) {
  Fields f(j, path);
  ctl::PerformanceModel model;
  const std::string kind = as_string(f.require("kind"), f.sub("kind"));
  if (kind == "analytic") {
    model.kind = ctl::ModelKind::kAnalytic;
    const std::string form = as_string(f.require("form"), f.sub("form"));
    if (form == "saturating-throughput") {
      model.form = ctl::AnalyticForm::kSaturatingThroughput;
      model.throughput.t_max =
          opt_double(f, "t_max", model.throughput.t_max);
      model.throughput.beta = opt_double(f, "beta", model.throughput.beta);
    } else if (form == "linear-cost") {
      model.form = ctl::AnalyticForm::kLinearCost;
      model.cost.c_fixed = opt_double(f, "c_fixed", model.cost.c_fixed);
      model.cost.c_unit = opt_double(f, "c_unit", model.cost.c_unit);
    } else {
      throw ValidationError(f.sub("form") + ": unknown analytic form \"" +
                            form + "\"");
    }
  } else if (kind == "empirical") {
    model.kind = ctl::ModelKind::kEmpirical;
    model.metric = as_string(f.require("metric"), f.sub("metric"));
    const nlohmann::json& table = f.require("table");
    const std::string table_path = f.sub("table");
    if (!table.is_object()) {
      throw ValidationError(table_path + ": expected an object");
    }
    for (const auto& item : table.items()) {
      model.table[item.key()] =
          as_double(item.value(), table_path + "." + item.key());
    }
  } else {
    throw ValidationError(f.sub("kind") + ": unknown model kind \"" + kind +
                          "\"");
  }
  f.done();
  return model;
}

num::SolveOptions parse_solver(const nlohmann::json& j,
                               const std::string& path) {
  Fields f(j, path);
  num::SolveOptions options;
  options.gamma = opt_double(f, "gamma", options.gamma);
  options.tolerance = opt_double(f, "tolerance", options.tolerance);
  options.max_iterations =
      opt_int(f, "max_iterations", options.max_iterations);
  options.initial_price =
      opt_double(f, "initial_price", options.initial_price);
  f.done();
  return options;
}

ctl::ControllerSpec parse_controller(const nlohmann::json& j,
                                     const std::string& path) {
  Fields f(j, path);
  ctl::ControllerSpec spec;
  spec.id = as_string(f.require("id"), f.sub("id"));
  const std::string kind = as_string(f.require("kind"), f.sub("kind"));
  try {
    spec.kind = ctl::controller_kind_from_string(kind);
  } catch (const ValidationError& e) {
    throw ValidationError(f.sub("kind") + ": " + e.what());
  }
  spec.config_group = opt_string(f, "config_group", "");
  spec.space = parse_space(f.require("space"), f.sub("space"));
  if (const nlohmann::json* model = f.find("model")) {
    spec.model = parse_model(*model, f.sub("model"));
  }
  spec.admission_penalty =
      opt_double(f, "admission_penalty", spec.admission_penalty);
  if (const nlohmann::json* problem = f.find("problem")) {
    try {
      spec.problem = num::problem_from_json(*problem);
    } catch (const ValidationError& e) {
      throw ValidationError(f.sub("problem") + ": " + e.what());
    }
  }
  if (const nlohmann::json* solver = f.find("solver")) {
    spec.solver = parse_solver(*solver, f.sub("solver"));
  }
  f.done();
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return spec;
}

gov::GlobalUtilitySpec parse_global_utility(const nlohmann::json& j,
                                            const std::string& path) {
  Fields f(j, path);
  gov::GlobalUtilitySpec spec;
  const std::string aggregator =
      as_string(f.require("aggregator"), f.sub("aggregator"));
  if (aggregator == "weighted-sum") {
    spec.aggregator = gov::Aggregator::kWeightedSum;
  } else if (aggregator == "min") {
    spec.aggregator = gov::Aggregator::kMin;
  } else if (aggregator == "product-of-shifted") {
    spec.aggregator = gov::Aggregator::kProductOfShifted;
  } else {
    throw ValidationError(f.sub("aggregator") + ": unknown aggregator \"" +
                          aggregator + "\"");
  }
  if (const nlohmann::json* weights = f.find("weights")) {
    const std::string weights_path = f.sub("weights");
    if (!weights->is_object()) {
      throw ValidationError(weights_path + ": expected an object");
    }
    for (const auto& item : weights->items()) {
      spec.weights[item.key()] =
          as_double(item.value(), weights_path + "." + item.key());
    }
  }
  if (const nlohmann::json* shifts = f.find("shifts")) {
    const std::string shifts_path = f.sub("shifts");
    if (!shifts->is_object()) {
      throw ValidationError(shifts_path + ": expected an object");
    }
    for (const auto& item : shifts->items()) {
      spec.shifts[item.key()] =
          as_double(item.value(), shifts_path + "." + item.key());
    }
  }
  spec.threshold = opt_double(f, "threshold", spec.threshold);
  f.done();
  return spec;
}

gov::TriggerPolicy parse_trigger(const nlohmann::json& j,
                                 const std::string& path,
                                 double default_threshold) {
  Fields f(j, path);
  gov::TriggerPolicy trigger;
  trigger.period = opt_int(f, "period", trigger.period);
  trigger.threshold = opt_double(f, "threshold", default_threshold);
  trigger.lookahead = opt_int(f, "lookahead", trigger.lookahead);
  if (const nlohmann::json* manual = f.find("manual_ticks")) {
    const std::string manual_path = f.sub("manual_ticks");
    if (!manual->is_array()) {
      throw ValidationError(manual_path + ": expected an array");
    }
    for (size_t i = 0; i < manual->size(); ++i) {
      trigger.manual_ticks.push_back(
          as_int((*manual)[i], manual_path + "[" + std::to_string(i) + "]"));
    }
  }
  f.done();
  return trigger;
}

gov::SearchOptions parse_search(const nlohmann::json& j,
                                const std::string& path) {
  Fields f(j, path);
  gov::SearchOptions options;
  if (const nlohmann::json* strategy = f.find("strategy")) {
    const std::string name = as_string(*strategy, f.sub("strategy"));
    if (name == "auto") {
      options.strategy = gov::SearchStrategy::kAuto;
    } else if (name == "exhaustive") {
      options.strategy = gov::SearchStrategy::kExhaustive;
    } else if (name == "coordinate-descent") {
      options.strategy = gov::SearchStrategy::kCoordinateDescent;
    } else if (name == "hill-climb") {
      options.strategy = gov::SearchStrategy::kHillClimb;
    } else {
      throw ValidationError(f.sub("strategy") + ": unknown strategy \"" +
                            name + "\"");
    }
  }
  options.budget = static_cast<uint64_t>(
      opt_int(f, "budget", static_cast<int64_t>(options.budget)));
  options.auto_exhaustive_limit = static_cast<uint64_t>(opt_int(
      f, "auto_exhaustive_limit",
      static_cast<int64_t>(options.auto_exhaustive_limit)));
  options.restarts =
      static_cast<int>(opt_int(f, "restarts", options.restarts));
  if (const nlohmann::json* seed = f.find("seed")) {
    options.seed = as_seed(*seed, f.sub("seed"));
  }
  f.done();
  return options;
}

std::vector<double> parse_lambda_grid(const nlohmann::json& j,
                                      const std::string& path) {
  std::vector<double> lambdas;
  if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) {
      lambdas.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return lambdas;
  }
  Fields f(j, path);
  const double from = as_double(f.require("from"), f.sub("from"));
  const double to = as_double(f.require("to"), f.sub("to"));
  const double step = as_double(f.require("step"), f.sub("step"));
  f.done();
  if (!(step > 0.0)) throw ValidationError(f.sub("step") + ": must be > 0");
  if (to < from) throw ValidationError(path + ": to < from");
  // count derived once so accumulated float error cannot drop the endpoint
  const int64_t count =
      static_cast<int64_t>(std::floor((to - from) / step + 1e-9)) + 1;
  for (int64_t i = 0; i < count; ++i) {
    lambdas.push_back(from + static_cast<double>(i) * step);
  }
  return lambdas;
}

CoupledExperiment parse_coupled(Fields& f) {
  CoupledExperiment experiment;
  lab::CoupledScenario& s = experiment.scenario;
  experiment.governed = opt_bool(f, "governed", true);
  s.total_load = opt_double(f, "total_load", s.total_load);
  s.capacity_per_instance =
      opt_double(f, "capacity_per_instance", s.capacity_per_instance);
  s.target_utilization =
      opt_double(f, "target_utilization", s.target_utilization);
  s.cost_cap = opt_double(f, "cost_cap", s.cost_cap);
  s.gain_a = opt_double(f, "gain_a", s.gain_a);
  s.gain_b = opt_double(f, "gain_b", s.gain_b);
  s.n_min = opt_int(f, "n_min", s.n_min);
  s.n_max = opt_int(f, "n_max", s.n_max);
  s.n0 = opt_int(f, "n0", s.n0);
  s.ticks = opt_int(f, "ticks", s.ticks);
  s.discard = opt_int(f, "discard", s.discard);
  s.trigger_period = opt_int(f, "trigger_period", s.trigger_period);
  s.throughput.t_max = opt_double(f, "t_max", s.throughput.t_max);
  s.throughput.beta = opt_double(f, "beta", s.throughput.beta);
  s.cost.c_fixed = opt_double(f, "c_fixed", s.cost.c_fixed);
  s.cost.c_unit = opt_double(f, "c_unit", s.cost.c_unit);
  s.weight_throughput =
      opt_double(f, "weight_throughput", s.weight_throughput);
  s.weight_cost = opt_double(f, "weight_cost", s.weight_cost);
  return experiment;
}

Experiment parse_experiment(const nlohmann::json& j, const std::string& path,
                            int64_t horizon) {
  Fields f(j, path);
  const std::string kind = as_string(f.require("kind"), f.sub("kind"));
  if (kind == "phase_sweep") {
    PhaseSweepExperiment experiment;
    experiment.lambdas =
        parse_lambda_grid(f.require("lambdas"), f.sub("lambdas"));
    experiment.ticks = opt_int(f, "ticks", experiment.ticks);
    experiment.hysteresis = opt_bool(f, "hysteresis", false);
    experiment.transition_threshold = opt_double(
        f, "transition_threshold", experiment.transition_threshold);
    f.done();
    return experiment;
  }
  if (kind == "calibrate") {
    CalibrateExperiment experiment;
    experiment.controller =
        as_string(f.require("controller"), f.sub("controller"));
    experiment.metric = opt_string(f, "metric", experiment.metric);
    experiment.ticks = opt_int(f, "ticks", experiment.ticks);
    f.done();
    return experiment;
  }
  if (kind == "coupled") {
    CoupledExperiment experiment = parse_coupled(f);
    f.done();
    return experiment;
  }
  if (kind == "govern") {
    f.done();
    return GovernExperiment{};
  }
  if (kind == "pareto") {
    ParetoExperiment experiment;
    if (const nlohmann::json* objectives = f.find("objectives")) {
      const std::string objectives_path = f.sub("objectives");
      if (!objectives->is_array()) {
        throw ValidationError(objectives_path + ": expected an array");
      }
      for (size_t i = 0; i < objectives->size(); ++i) {
        experiment.objectives.push_back(
            as_string((*objectives)[i],
                      objectives_path + "[" + std::to_string(i) + "]"));
      }
    }
    f.done();
    return experiment;
  }
  (void)horizon;
  throw ValidationError(f.sub("kind") + ": unknown experiment kind \"" +
                        kind + "\"");
}

}  // namespace

const net::TopologySpec& Scenario::require_topology() const {
  if (!topology) {
    throw ValidationError("scenario.topology: required for this command");
  }
  return *topology;
}

const net::TrafficSpec& Scenario::require_traffic() const {
  if (!traffic) {
    throw ValidationError("scenario.traffic: required for this command");
  }
  return *traffic;
}

Scenario parse_scenario(const nlohmann::json& doc) {
  Scenario scenario;
  Fields f(doc, "scenario");
  scenario.version =
      static_cast<int>(as_int(f.require("version"), f.sub("version")));
  if (scenario.version != 1) {
    throw ValidationError("scenario.version: unsupported schema version " +
                          std::to_string(scenario.version));
  }
  if (const nlohmann::json* topology = f.find("topology")) {
    scenario.topology = parse_topology(*topology, f.sub("topology"));
  }
  scenario.service_rate =
      static_cast<int>(opt_int(f, "service_rate", scenario.service_rate));
  if (const nlohmann::json* traffic = f.find("traffic")) {
    scenario.traffic = parse_traffic(*traffic, f.sub("traffic"));
  }
  if (const nlohmann::json* routing = f.find("routing")) {
    scenario.routing = parse_routing(*routing, f.sub("routing"));
  }
  {
    const nlohmann::json& seeds = f.require("seeds");
    const std::string seeds_path = f.sub("seeds");
    if (!seeds.is_array() || seeds.empty()) {
      throw ValidationError(seeds_path + ": expected a non-empty array");
    }
    for (size_t i = 0; i < seeds.size(); ++i) {
      scenario.seeds.push_back(
          as_seed(seeds[i], seeds_path + "[" + std::to_string(i) + "]"));
    }
  }
  scenario.horizon = opt_int(f, "horizon", scenario.horizon);
  if (scenario.horizon < 1) {
    throw ValidationError("scenario.horizon: must be >= 1");
  }
  if (const nlohmann::json* controllers = f.find("controllers")) {
    const std::string controllers_path = f.sub("controllers");
    if (!controllers->is_array()) {
      throw ValidationError(controllers_path + ": expected an array");
    }
    std::set<std::string> ids;
    for (size_t i = 0; i < controllers->size(); ++i) {
      ctl::ControllerSpec spec = parse_controller(
          (*controllers)[i],
          controllers_path + "[" + std::to_string(i) + "]");
      if (!ids.insert(spec.id).second) {
        throw ValidationError(controllers_path + ": duplicate controller id \"" +
                              spec.id + "\"");
      }
      scenario.controllers.push_back(std::move(spec));
    }
  }
  if (const nlohmann::json* global = f.find("global_utility")) {
    scenario.global_utility =
        parse_global_utility(*global, f.sub("global_utility"));
  }
  if (const nlohmann::json* trigger = f.find("trigger")) {
    scenario.trigger = parse_trigger(*trigger, f.sub("trigger"),
                                     scenario.global_utility.threshold);
  } else {
    scenario.trigger.threshold = scenario.global_utility.threshold;
  }
  if (const nlohmann::json* search = f.find("search")) {
    scenario.search = parse_search(*search, f.sub("search"));
  }
  scenario.reset_on_reconfigure = opt_bool(f, "reset_on_reconfigure", false);
  if (const nlohmann::json* initial = f.find("initial_config")) {
    const std::string initial_path = f.sub("initial_config");
    if (!initial->is_object() || initial->empty()) {
      throw ValidationError(initial_path + ": expected a non-empty object");
    }
    gov::ConfigurationVector vector;
    for (const auto& item : initial->items()) {
      vector.components[item.key()] = parse_configuration(
          item.value(), initial_path + "." + item.key());
    }
    scenario.initial_config = std::move(vector);
  }
  if (const nlohmann::json* experiment = f.find("experiment")) {
    scenario.experiment = parse_experiment(*experiment, f.sub("experiment"),
                                           scenario.horizon);
  }
  f.done();
  scenario.document = doc;
  scenario.hash = stable_digest(doc.dump());
  return scenario;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const size_t stop = e.byte > 0 ? std::min(text.size(), e.byte - 1)
                                   : size_t{0};
    const size_t line =
        1 + static_cast<size_t>(
                std::count(text.begin(), text.begin() + stop, '\n'));
    throw ValidationError(path + ":" + std::to_string(line) + ": " +
                          e.what());
  }
}

Scenario load_scenario(
    const std::string& path,
    const std::optional<std::vector<uint64_t>>& seed_override) {
  nlohmann::json doc = load_json(path);
  if (!doc.is_object()) {
    throw ValidationError(path + ": expected a JSON object");
  }
  if (seed_override) {
    doc["seeds"] = *seed_override;
  }
  return parse_scenario(doc);
}

std::string meta_line(const std::string& hash,
                      const std::vector<uint64_t>& seeds) {
  std::string line = "scenario_hash=" + hash + ", seeds=";
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) line += '|';
    line += std::to_string(seeds[i]);
  }
  line += ", tool_version=";
  line += kToolVersion;
  return line;
}

std::string meta_line(const Scenario& scenario) {
  return meta_line(scenario.hash, scenario.seeds);
}

nlohmann::json meta_json(const std::string& hash,
                         const std::vector<uint64_t>& seeds) {
  nlohmann::json meta;
  meta["scenario_hash"] = hash;
  meta["seeds"] = seeds;
  meta["tool_version"] = kToolVersion;
  return meta;
}

nlohmann::json meta_json(const Scenario& scenario) {
  return meta_json(scenario.hash, scenario.seeds);
}

}  // namespace netgov::scn
