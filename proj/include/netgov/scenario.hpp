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
// Scenario files: one versioned JSON document drives every command.
// Parsing is strict: unknown fields are rejected, and every error names the
// offending field path. The canonicalized document is hashed so outputs can
// state exactly which inputs produced them.

#ifndef NETGOV_SCENARIO_HPP_
#define NETGOV_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "netgov/controllers.hpp"
#include "netgov/governance.hpp"
#include "netgov/simulation.hpp"
#include "netgov/stability.hpp"
#include "netgov/topology.hpp"

namespace netgov::scn {

struct PhaseSweepExperiment {
  std::vector<double> lambdas;
  int64_t ticks = 5000;
  bool hysteresis = false;
  double transition_threshold = 0.05;
};

// Runs the base scenario once per configuration of one controller and
// records the measured metric, producing an empirical model table.
struct CalibrateExperiment {
  std::string controller;
  std::string metric = "delivered_rate";
  int64_t ticks = 1000;
};

struct CoupledExperiment {
  lab::CoupledScenario scenario;
  bool governed = true;
};

struct GovernExperiment {};

struct ParetoExperiment {
  std::vector<std::string> objectives;  // empty = all controllers, by id
};

using Experiment =
    std::variant<std::monostate, PhaseSweepExperiment, CalibrateExperiment,
                 CoupledExperiment, GovernExperiment, ParetoExperiment>;

struct Scenario {
  int version = 1;
  std::optional<net::TopologySpec> topology;
  int service_rate = 1;
  std::optional<net::TrafficSpec> traffic;
  net::RoutingPolicy routing;
  std::vector<uint64_t> seeds;
  int64_t horizon = 1000;
  std::vector<ctl::ControllerSpec> controllers;
  gov::GlobalUtilitySpec global_utility;
  gov::TriggerPolicy trigger;  // threshold defaults to the SLA threshold
  gov::SearchOptions search;
  bool reset_on_reconfigure = false;
  std::optional<gov::ConfigurationVector> initial_config;
  Experiment experiment;

  // Canonicalized document (after any seed override) and its stable digest.
  nlohmann::json document;
  std::string hash;

  // Commands that simulate packets need these blocks.
  const net::TopologySpec& require_topology() const;
  const net::TrafficSpec& require_traffic() const;
};

// Strict parse; `doc` must already contain any seed override so the hash
// matches the effective inputs.
Scenario parse_scenario(const nlohmann::json& doc);

// Reads and parses a scenario file. Parse errors carry 1-based line info.
Scenario load_scenario(const std::string& path,
                       const std::optional<std::vector<uint64_t>>& seed_override);

// Reads any strict JSON document with line diagnostics on failure.
nlohmann::json load_json(const std::string& path);

// "scenario_hash=..., seeds=1|2, tool_version=..." for CSV comment lines.
std::string meta_line(const Scenario& scenario);
std::string meta_line(const std::string& hash,
                      const std::vector<uint64_t>& seeds);
nlohmann::json meta_json(const Scenario& scenario);
nlohmann::json meta_json(const std::string& hash,
                         const std::vector<uint64_t>& seeds);

}  // namespace netgov::scn

#endif  // NETGOV_SCENARIO_HPP_
