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

#ifndef NETGOV_CONTROLLERS_HPP_
#define NETGOV_CONTROLLERS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netgov/common.hpp"
#include "netgov/num_solver.hpp"
#include "netgov/simulation.hpp"

namespace netgov::ctl {

// A controller couples a monitor (windowed metrics), a performance model and
// a scalar utility over its finite configuration space. Admission and
// routing controllers actuate the simulation; throughput, cost and
// congestion controllers are evaluative.

using ConfigValue = std::variant<int64_t, double, std::string>;

// Named parameter assignment; parameters stay sorted by name so the
// canonical form is unique.
struct Configuration {
  std::vector<std::pair<std::string, ConfigValue>> params;

  void set(const std::string& name, ConfigValue value);
  const ConfigValue* find(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
  int64_t get_int(const std::string& name) const;
  double get_double(const std::string& name) const;  // accepts int values
  std::string get_string(const std::string& name) const;

  // Compact JSON object, e.g. {"n":13}; used as table key and in CSV output.
  std::string canonical() const;

  bool operator==(const Configuration& other) const {
    return params == other.params;
  }
};

struct Metrics {
  TickRange window;
  double delivered_rate = 0.0;    // packets per tick
  double mean_delay = 0.0;        // over packets delivered in the window
  double mean_queue_total = 0.0;  // time average
  double offered_load = 0.0;      // admitted packets per tick
  double utilization = 0.0;       // delivered rate / total service capacity
};

// Windowed averages over a trace slice; window must be inside the trace and
// non-empty.
Metrics monitor(const net::SimulationTrace& trace, TickRange window);

enum class ControllerKind {
  kThroughput,
  kCost,
  kCongestion,
  kAdmission,
  kRouting,
};

struct ThroughputParams {
  double t_max = 100.0;  // saturation level
  double beta = 0.15;    // diminishing-returns rate: T(n) = t_max(1-e^{-beta n})
};

struct CostParams {
  double c_fixed = 0.0;
  double c_unit = 2.0;  // C(n) = c_fixed + c_unit * n
};

enum class ModelKind { kAnalytic, kEmpirical };
enum class AnalyticForm { kSaturatingThroughput, kLinearCost };

struct PerformanceModel {
  ModelKind kind = ModelKind::kAnalytic;
  AnalyticForm form = AnalyticForm::kSaturatingThroughput;
  ThroughputParams throughput;
  CostParams cost;
  std::string metric;  // label for empirical tables
  // Calibration table keyed by Configuration::canonical().
  std::map<std::string, double> table;
};

// Analytic models evaluate their closed form at config parameter "n";
// empirical models look the configuration up and fail on unknown keys.
// `load` is accepted for interface uniformity; the analytic forms ignore it.
double predict(const PerformanceModel& model, const Configuration& config,
               double load);

struct ControllerSpec {
  std::string id;
  ControllerKind kind = ControllerKind::kThroughput;
  // Controllers sharing a group share one configuration axis (identical
  // spaces required); empty means the controller has its own axis.
  std::string config_group;
  std::vector<Configuration> space;  // ordered, non-empty, duplicate-free
  PerformanceModel model;            // throughput and cost kinds
  double admission_penalty = 0.01;   // admission kind
  std::optional<num::RateProblem> problem;  // congestion kind
  num::SolveOptions solver;                 // congestion solver defaults

  const std::string& group() const {
    return config_group.empty() ? id : config_group;
  }
  void validate() const;
};

// Validates and returns the ordered configuration space.
const std::vector<Configuration>& config_space(const ControllerSpec& spec);

struct UtilityValue {
  std::string controller_id;
  double value = 0.0;
  Configuration config;
};

// Pure in (spec, metrics, config):
//   throughput  T(n)
//   cost        -C(n)
//   congestion  optimal rate-allocation objective; config may override
//               "alpha" (all sources) and "gamma" (solver step)
//   admission   delivered_rate - penalty * mean_queue_total
//   routing     -mean_delay
// Throws ValidationError when config is outside the controller's space.
UtilityValue evaluate_utility(const ControllerSpec& spec, const Metrics& metrics,
                              const Configuration& config);

// Congestion variant with warm-started prices; prices_out (optional)
// receives the converged prices for carry-over between reconfigurations.
UtilityValue evaluate_utility(const ControllerSpec& spec, const Metrics& metrics,
                              const Configuration& config,
                              const std::vector<double>* warm_prices,
                              std::vector<double>* prices_out);

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

}  // namespace netgov::ctl

#endif  // NETGOV_CONTROLLERS_HPP_
