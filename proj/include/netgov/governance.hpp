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

#ifndef NETGOV_GOVERNANCE_HPP_
#define NETGOV_GOVERNANCE_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netgov/common.hpp"
#include "netgov/controllers.hpp"
#include "netgov/simulation.hpp"

namespace netgov::gov {

// A global utility folds the per-controller utilities into one scalar that a
// network-level search maximizes over the joint configuration space. The
// govern loop re-runs that search at periodic triggers and whenever the
// measured global utility falls below the threshold.

// One configuration per controller, keyed by controller id (canonical
// order). Controllers sharing a configuration group always hold equal
// components.
struct ConfigurationVector {
  std::map<std::string, ctl::Configuration> components;

  std::string canonical() const;  // compact JSON, ids sorted
  nlohmann::json to_json() const;
  bool operator==(const ConfigurationVector& other) const {
    return components == other.components;
  }
};

enum class Aggregator { kWeightedSum, kMin, kProductOfShifted };

struct GlobalUtilitySpec {
  Aggregator aggregator = Aggregator::kWeightedSum;
  // weighted-sum: empty means weight 1 for every controller; otherwise one
  // entry per controller, all >= 0 with at least one > 0. Zero-weight terms
  // are skipped entirely.
  std::map<std::string, double> weights;
  std::map<std::string, double> shifts;  // product-of-shifted, default 0
  double threshold = -std::numeric_limits<double>::infinity();
};

// Deterministic and order-independent: values are folded in controller-id
// order regardless of input order. The product variant requires every
// shifted utility to be strictly positive.
double aggregate(const std::vector<ctl::UtilityValue>& values,
                 const GlobalUtilitySpec& spec);

struct GovernanceEvaluation {
  ConfigurationVector config;
  std::vector<ctl::UtilityValue> utilities;  // sorted by controller id
  double u_g = 0.0;
  int64_t evaluated_at = 0;
};

// One axis per configuration group, sorted by group id; the joint space is
// the cross product of the axes in that order (first axis slowest), which
// defines the canonical enumeration order used for tie-breaking.
struct JointAxis {
  std::string group;
  std::vector<std::string> controller_ids;  // sorted
  std::vector<ctl::Configuration> configs;
};

struct JointSpace {
  std::vector<JointAxis> axes;

  uint64_t size() const;  // saturating product
  ConfigurationVector vector_at(const std::vector<size_t>& indices) const;
  std::vector<size_t> indices_of(const ConfigurationVector& vector) const;
};

// Groups controllers by config group and validates that grouped controllers
// expose identical spaces.
JointSpace make_joint_space(const std::vector<ctl::ControllerSpec>& specs);

// Maps a configuration vector to the per-controller utilities.
using Evaluator =
    std::function<std::vector<ctl::UtilityValue>(const ConfigurationVector&)>;

enum class SearchStrategy { kAuto, kExhaustive, kCoordinateDescent, kHillClimb };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::kAuto;
  uint64_t budget = 1000000;  // exhaustive refuses larger spaces
  // kAuto enumerates exhaustively up to this size, then falls back to
  // coordinate descent.
  uint64_t auto_exhaustive_limit = 10000;
  int restarts = 8;           // hill climb
  uint64_t seed = 0x6e6774;   // hill-climb restart points
  int jobs = 1;               // exhaustive evaluation parallelism
};

struct SearchOutcome {
  GovernanceEvaluation best;
  std::vector<size_t> best_indices;
  uint64_t examined = 0;  // distinct evaluator invocations
  int passes = 0;         // coordinate-descent passes
};

// Maximizes the aggregated utility. Exhaustive search scans the canonical
// order and keeps the first maximum; the heuristics start from the incumbent
// (default: all-zero indices) and never return less than it. Throws
// BudgetError when exhaustive search would exceed the budget.
SearchOutcome search(const JointSpace& space, const Evaluator& evaluator,
                     const GlobalUtilitySpec& spec,
                     const SearchOptions& options = {},
                     const std::vector<size_t>* incumbent = nullptr);

// Every point of the joint space, in canonical order. Used by Pareto scans.
std::vector<GovernanceEvaluation> evaluate_all(const JointSpace& space,
                                               const Evaluator& evaluator,
                                               const GlobalUtilitySpec& spec,
                                               uint64_t budget, int jobs);

// Non-dominated subset with respect to the selected controllers' utilities
// (maximization). Exact duplicates in objective space keep only the
// canonically first evaluation; order is preserved.
std::vector<GovernanceEvaluation> pareto_front(
    const std::vector<GovernanceEvaluation>& evaluations,
    const std::vector<std::string>& objective_ids);

enum class TriggerReason { kPeriodic, kThresholdBreach, kManual };

std::string to_string(TriggerReason reason);

struct TriggerPolicy {
  int64_t period = 200;
  double threshold = -std::numeric_limits<double>::infinity();
  int64_t lookahead = 200;  // candidate evaluation window, ticks
  std::vector<int64_t> manual_ticks;
};

struct GovernanceTraceEntry {
  int64_t tick = 0;
  TriggerReason reason = TriggerReason::kPeriodic;
  uint64_t examined = 0;
  ConfigurationVector config;
  double u_g = 0.0;          // look-ahead value of the adopted configuration
  bool threshold_met = true;
};

struct GovernanceTrace {
  std::vector<GovernanceTraceEntry> entries;

  // Fixed header: tick,reason,examined,U_g,config_json
  void write_csv(std::ostream& os, const std::string& meta = "") const;
  nlohmann::json to_json() const;
};

// Anything the govern loop can drive: apply a configuration, advance time,
// measure recent per-controller utilities and score candidates by look-ahead.
class GovernableSystem {
 public:
  virtual ~GovernableSystem() = default;
  virtual void apply(const ConfigurationVector& config) = 0;
  virtual void advance(int64_t ticks) = 0;
  virtual int64_t now() const = 0;
  // Utilities of `config` over the last `window` ticks of observed behavior.
  virtual std::vector<ctl::UtilityValue> measure(
      const ConfigurationVector& config, int64_t window) const = 0;
  // Utilities of `config` over a deterministic look-ahead clone.
  virtual std::vector<ctl::UtilityValue> evaluate_candidate(
      const ConfigurationVector& config, int64_t window) const = 0;
};

struct GovernOutcome {
  GovernanceTrace trace;
  std::vector<double> u_g_series;  // measured, one entry per tick
  ConfigurationVector final_config;
  bool any_actuating = false;
};

// Runs the system for `horizon` ticks. A search fires at tick 0, every
// `period` ticks, on manual ticks, and one tick after the measured global
// utility (window = period / 2) drops below the threshold; breach checks
// re-arm only after a full window has passed since the last trigger. The
// incumbent is always among the candidates, so an adopted configuration
// never scores below it. Entries with best utility below the threshold are
// marked threshold_met = false and still adopted.
GovernOutcome govern_loop(GovernableSystem& system,
                          const std::vector<ctl::ControllerSpec>& controllers,
                          const GlobalUtilitySpec& spec,
                          const TriggerPolicy& trigger, int64_t horizon,
                          const SearchOptions& options = {},
                          const ConfigurationVector* initial = nullptr);

// GovernableSystem over the packet simulator. Admission controllers actuate
// the admission queue limit (config "limit"); routing controllers actuate
// the routing policy (config "policy"). Candidate look-aheads clone the live
// state and reseed it from (seed, trigger tick), so candidates at one
// trigger face identical traffic. Congestion controllers carry converged
// prices across reconfigurations as warm starts unless reset_on_reconfigure
// is set.
class NetSimSystem : public GovernableSystem {
 public:
  struct Setup {
    net::Topology topology;
    int service_rate = 1;
    net::TrafficSpec traffic;
    net::RoutingPolicy routing;
    uint64_t seed = 1;
    bool reset_on_reconfigure = false;
  };

  NetSimSystem(Setup setup, std::vector<ctl::ControllerSpec> controllers);

  void apply(const ConfigurationVector& config) override;
  void advance(int64_t ticks) override;
  int64_t now() const override { return state_.tick; }
  std::vector<ctl::UtilityValue> measure(const ConfigurationVector& config,
                                         int64_t window) const override;
  std::vector<ctl::UtilityValue> evaluate_candidate(
      const ConfigurationVector& config, int64_t window) const override;

  const net::SimulationTrace& trace() const { return trace_; }
  const net::NetworkState& state() const { return state_; }
  const net::TrafficSpec& traffic() const { return traffic_; }

  // Admission controllers rewrite the admission queue limit (config
  // "limit"); routing controllers rewrite the routing policy (config
  // "policy"). Evaluative kinds leave both untouched.
  static void apply_actuation(const std::vector<ctl::ControllerSpec>& specs,
                              const ConfigurationVector& config,
                              net::TrafficSpec& traffic,
                              net::RoutingPolicy& routing);

 private:
  std::vector<ctl::UtilityValue> evaluate_with(
      const ctl::Metrics& metrics, const ConfigurationVector& config) const;

  Setup setup_;
  std::vector<ctl::ControllerSpec> controllers_;  // sorted by id
  net::NetworkState state_;
  net::TrafficSpec traffic_;
  net::RoutingPolicy routing_;
  std::unique_ptr<net::Router> router_;
  net::SimulationTrace trace_;
  std::map<std::string, std::vector<double>> carried_prices_;
};

}  // namespace netgov::gov

#endif  // NETGOV_GOVERNANCE_HPP_
