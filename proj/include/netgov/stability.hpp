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
// Stability experiments on top of the simulator: order-parameter sweeps
// over the offered load, transition-point detection, oscillation metrics,
// and a two-scaler resource loop that demonstrates how uncoordinated local
// controllers oscillate while a governed set point does not.

#ifndef NETGOV_STABILITY_HPP_
#define NETGOV_STABILITY_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netgov/controllers.hpp"
#include "netgov/governance.hpp"
#include "netgov/simulation.hpp"
#include "netgov/topology.hpp"

namespace netgov::lab {

// Inputs shared by every point of a sweep. traffic.lambda is overridden per
// point. Each run lasts `ticks`; the first half is treated as warm-up and
// the order parameter is measured over the second half, so ticks must be at
// least 200.
struct SweepScenario {
  net::Topology topology;
  int service_rate = 1;
  net::TrafficSpec traffic;
  net::RoutingPolicy routing;
  int64_t ticks = 5000;
};

struct PhaseSweepConfig {
  std::vector<double> lambdas;  // strictly ascending, each in (0, 1]
  std::vector<uint64_t> seeds;  // distinct, at least two
  int jobs = 1;
  // Chains runs per seed instead of starting fresh: an ascending ramp
  // followed by a descending ramp that keeps the congested terminal state.
  bool hysteresis = false;
};

struct SweepPoint {
  double lambda = 0.0;
  double rho_mean = 0.0;
  double rho_std = 0.0;  // population deviation across seeds
  std::vector<double> rho_by_seed;
};

// `up` is ordered by ascending lambda. `down` is only filled for hysteresis
// sweeps and keeps the descending measurement order of the ramp.
struct SweepResult {
  std::vector<SweepPoint> up;
  std::vector<SweepPoint> down;
};

SweepResult phase_sweep(const SweepScenario& scenario,
                        const PhaseSweepConfig& config);

// Fixed header: lambda,rho_mean,rho_std,seeds
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const std::string& meta = "");

// First load where rho_mean crosses the threshold from below, linearly
// interpolated between neighbouring grid points. Returns the first lambda
// when the curve starts at or above the threshold and nothing when it never
// crosses. Needs at least 4 points with strictly ascending lambdas.
std::optional<double> detect_transition(const std::vector<SweepPoint>& points,
                                        double threshold);

struct OscillationMetrics {
  double mean = 0.0;
  double amplitude = 0.0;  // peak to peak
  double stddev = 0.0;     // population deviation
  // Lag of the autocorrelation maximum, when pronounced (>= 0.25). A flat
  // series has no period.
  std::optional<int64_t> period;
};

// Metrics over series[discard..]; at least ten samples must remain.
OscillationMetrics oscillation_metrics(const std::vector<double>& series,
                                       int64_t discard);

// Two independent auto-scalers share one instance pool of size n. Scaler A
// steers towards a utilization target, scaler B pushes back whenever the
// linear cost of the pool exceeds its cap. Both apply their full correction
// each tick without seeing the other's pending delta, which is what makes
// the closed loop oscillate.
struct CoupledScenario {
  double total_load = 10.0;           // demand served by the pool
  double capacity_per_instance = 1.0;
  double target_utilization = 0.5;    // scaler A
  double cost_cap = 28.6;             // scaler B, against the cost params
  double gain_a = 1.0;
  double gain_b = 1.0;
  int64_t n_min = 0;
  int64_t n_max = 50;
  int64_t n0 = 20;
  int64_t ticks = 1000;
  int64_t discard = 500;      // transient excluded from the metrics
  int64_t trigger_period = 200;  // governed mode re-search interval
  // Objective for both the governed search and the utility series: weighted
  // sum of saturating throughput and negated linear cost of the pool.
  ctl::ThroughputParams throughput;
  ctl::CostParams cost;
  double weight_throughput = 1.0;
  double weight_cost = 1.0;

  void validate() const;
};

struct CoupledRun {
  std::vector<int64_t> n_series;  // n0 first, then one entry per tick
  std::vector<double> u_series;   // global utility of each n_series entry
  OscillationMetrics metrics;     // over n_series past the transient
  int64_t final_n = 0;
};

// set_point, governed and governance are only filled when requested.
// amplitude_ratio is ungoverned amplitude over governed amplitude and stays
// empty when the governed loop holds perfectly still.
struct CoupledResult {
  CoupledRun ungoverned;
  std::optional<CoupledRun> governed;
  std::optional<int64_t> set_point;
  std::optional<double> set_point_utility;
  std::optional<double> amplitude_ratio;
  std::optional<gov::GovernanceTrace> governance;
};

// The governed variant picks the pool size that maximizes the global
// utility (re-searched every trigger_period ticks) and slews n towards that
// set point by at most one instance per tick, overriding the scalers.
CoupledResult run_coupled(const CoupledScenario& scenario, bool with_governed);

}  // namespace netgov::lab

#endif  // NETGOV_STABILITY_HPP_
