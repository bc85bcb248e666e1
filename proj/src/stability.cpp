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

#include "netgov/stability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "netgov/common.hpp"
#include "netgov/governance.hpp"

namespace netgov::lab {

namespace {

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values, double mean) {
  double total = 0.0;
  for (double v : values) total += (v - mean) * (v - mean);
  return std::sqrt(total / static_cast<double>(values.size()));
}

SweepPoint make_point(double lambda, std::vector<double> rho_by_seed) {
  SweepPoint point;
  point.lambda = lambda;
  point.rho_mean = mean_of(rho_by_seed);
  point.rho_std = population_std(rho_by_seed, point.rho_mean);
  point.rho_by_seed = std::move(rho_by_seed);
  return point;
}

void validate_sweep(const SweepScenario& scenario,
                    const PhaseSweepConfig& config) {
  if (scenario.ticks < 200) {
    throw ValidationError("sweep runs need at least 200 ticks");
  }
  if (config.lambdas.empty()) throw ValidationError("empty load grid");
  for (size_t i = 0; i < config.lambdas.size(); ++i) {
    const double lambda = config.lambdas[i];
    if (!(lambda > 0.0) || lambda > 1.0) {
      throw ValidationError("sweep loads must lie in (0, 1]");
    }
    if (i > 0 && !(lambda > config.lambdas[i - 1])) {
      throw ValidationError("sweep loads must be strictly ascending");
    }
  }
  if (config.seeds.size() < 2) {
    throw ValidationError("sweep needs at least 2 seeds");
  }
  std::set<uint64_t> distinct(config.seeds.begin(), config.seeds.end());
  if (distinct.size() != config.seeds.size()) {
    throw ValidationError("sweep seeds must be distinct");
  }
  if (config.jobs < 1) throw ValidationError("jobs must be >= 1");
}

}  // namespace

SweepResult phase_sweep(const SweepScenario& scenario,
                        const PhaseSweepConfig& config) {
  validate_sweep(scenario, config);
  const net::Router router(scenario.topology, scenario.routing);
  const int64_t lambda_count = static_cast<int64_t>(config.lambdas.size());
  const int64_t seed_count = static_cast<int64_t>(config.seeds.size());
  const int64_t half = scenario.ticks / 2;

  SweepResult result;
  if (!config.hysteresis) {
    std::vector<std::vector<double>> rho(
        lambda_count, std::vector<double>(seed_count, 0.0));
    parallel_for(lambda_count * seed_count, config.jobs, [&](int64_t index) {
      const int64_t l = index / seed_count;
      const int64_t s = index % seed_count;
      net::TrafficSpec traffic = scenario.traffic;
      traffic.lambda = config.lambdas[l];
      net::NetworkState state = net::NetworkState::make(
          scenario.topology, scenario.service_rate, config.seeds[s]);
      net::SimulationTrace trace;
      net::run_into(state, traffic, router, scenario.ticks, trace);
      rho[l][s] =
          net::order_parameter(trace, {scenario.ticks - half, scenario.ticks});
    });
    for (int64_t l = 0; l < lambda_count; ++l) {
      result.up.push_back(make_point(config.lambdas[l], std::move(rho[l])));
    }
    return result;
  }

  // One chained trajectory per seed: the ascending ramp ends congested and
  // the descending ramp starts from that state.
  std::vector<std::vector<double>> up(lambda_count,
                                      std::vector<double>(seed_count, 0.0));
  std::vector<std::vector<double>> down(lambda_count,
                                        std::vector<double>(seed_count, 0.0));
  parallel_for(seed_count, config.jobs, [&](int64_t s) {
    net::NetworkState state = net::NetworkState::make(
        scenario.topology, scenario.service_rate, config.seeds[s]);
    net::SimulationTrace trace;
    net::TrafficSpec traffic = scenario.traffic;
    auto segment = [&](double lambda) {
      traffic.lambda = lambda;
      net::run_into(state, traffic, router, scenario.ticks, trace);
      return net::order_parameter(trace, {state.tick - half, state.tick});
    };
    for (int64_t l = 0; l < lambda_count; ++l) {
      up[l][s] = segment(config.lambdas[l]);
    }
    for (int64_t l = lambda_count; l-- > 0;) {
      down[l][s] = segment(config.lambdas[l]);
    }
  });
  for (int64_t l = 0; l < lambda_count; ++l) {
    result.up.push_back(make_point(config.lambdas[l], std::move(up[l])));
  }
  for (int64_t l = lambda_count; l-- > 0;) {
    result.down.push_back(make_point(config.lambdas[l], std::move(down[l])));
  }
  return result;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const std::string& meta) {
  if (!meta.empty()) os << "# " << meta << "\n";
  os << "lambda,rho_mean,rho_std,seeds\n";
  for (const SweepPoint& point : points) {
    os << format_g6(point.lambda) << ',' << format_g6(point.rho_mean) << ','
       << format_g6(point.rho_std) << ',' << point.rho_by_seed.size() << '\n';
  }
}

std::optional<double> detect_transition(const std::vector<SweepPoint>& points,
                                        double threshold) {
  if (points.size() < 4) {
    throw ValidationError("transition detection needs at least 4 sweep points");
  }
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw ValidationError("transition threshold must lie in (0, 1)");
  }
  for (size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].lambda > points[i - 1].lambda)) {
      throw ValidationError("transition detection needs ascending loads");
    }
  }
  if (points.front().rho_mean >= threshold) return points.front().lambda;
  for (size_t i = 1; i < points.size(); ++i) {
    const double prev = points[i - 1].rho_mean;
    const double cur = points[i].rho_mean;
    if (cur < threshold) continue;
    if (cur == prev) return points[i].lambda;
    const double t = (threshold - prev) / (cur - prev);
    return points[i - 1].lambda + t * (points[i].lambda - points[i - 1].lambda);
  }
  return std::nullopt;
}

OscillationMetrics oscillation_metrics(const std::vector<double>& series,
                                       int64_t discard) {
  if (discard < 0) throw ValidationError("discard must be >= 0");
  if (static_cast<int64_t>(series.size()) - discard < 10) {
    throw ValidationError("need at least ten samples after the transient");
  }
  const std::vector<double> tail(series.begin() + discard, series.end());
  OscillationMetrics metrics;
  metrics.mean = mean_of(tail);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  metrics.amplitude = *hi - *lo;
  metrics.stddev = population_std(tail, metrics.mean);
  if (metrics.stddev == 0.0) return metrics;  // flat, no period

  const size_t n = tail.size();
  const size_t half = n / 2;
  double denom = 0.0;
  for (double v : tail) denom += (v - metrics.mean) * (v - metrics.mean);
  std::vector<double> r(half + 1, 0.0);
  r[0] = 1.0;
  for (size_t lag = 1; lag <= half; ++lag) {
    double num = 0.0;
    for (size_t t = 0; t + lag < n; ++t) {
      num += (tail[t] - metrics.mean) * (tail[t + lag] - metrics.mean);
    }
    r[lag] = num / denom;
  }
  // The dominant period shows as the first local peak of the
  // autocorrelation. A smooth decay straight from lag 0 has none, and
  // anything at or below the noise floor does not count.
  for (size_t lag = 1; lag <= half; ++lag) {
    if (r[lag] <= 0.25) continue;
    if (r[lag] < r[lag - 1]) continue;
    if (lag < half && r[lag] <= r[lag + 1]) continue;
    metrics.period = static_cast<int64_t>(lag);
    break;
  }
  return metrics;
}

void CoupledScenario::validate() const {
  if (!(total_load > 0.0)) throw ValidationError("total load must be > 0");
  if (!(capacity_per_instance > 0.0)) {
    throw ValidationError("instance capacity must be > 0");
  }
  if (!(target_utilization > 0.0) || target_utilization > 1.0) {
    throw ValidationError("target utilization must lie in (0, 1]");
  }
  if (gain_a < 0.0 || gain_b < 0.0) {
    throw ValidationError("scaler gains must be >= 0");
  }
  if (n_min < 0 || n_max < n_min) {
    throw ValidationError("need 0 <= n_min <= n_max");
  }
  if (n0 < n_min || n0 > n_max) {
    throw ValidationError("initial pool size outside [n_min, n_max]");
  }
  if (ticks < 1) throw ValidationError("ticks must be >= 1");
  if (discard < 0 || ticks + 1 - discard < 10) {
    throw ValidationError("at least ten samples must survive the transient");
  }
  if (trigger_period < 1) throw ValidationError("trigger period must be >= 1");
  if (!(cost.c_unit > 0.0)) throw ValidationError("unit cost must be > 0");
  if (cost_cap < cost.c_fixed) {
    throw ValidationError("cost cap below the fixed cost");
  }
  if (!(throughput.t_max > 0.0) || !(throughput.beta > 0.0)) {
    throw ValidationError("throughput params must be > 0");
  }
  if (weight_throughput < 0.0 || weight_cost < 0.0 ||
      weight_throughput + weight_cost <= 0.0) {
    throw ValidationError("objective weights must be >= 0, not both zero");
  }
}

namespace {

// The governed search, the utility series and the governance trace all
// score a pool size through the same two controllers.
class PoolObjective {
 public:
  explicit PoolObjective(const CoupledScenario& s) {
    std::vector<ctl::Configuration> grid;
    for (int64_t n = s.n_min; n <= s.n_max; ++n) {
      ctl::Configuration config;
      config.set("n", n);
      grid.push_back(std::move(config));
    }

    ctl::ControllerSpec throughput;
    throughput.id = "throughput";
    throughput.kind = ctl::ControllerKind::kThroughput;
    throughput.config_group = "pool";
    throughput.space = grid;
    throughput.model.kind = ctl::ModelKind::kAnalytic;
    throughput.model.form = ctl::AnalyticForm::kSaturatingThroughput;
    throughput.model.throughput = s.throughput;

    ctl::ControllerSpec cost;
    cost.id = "cost";
    cost.kind = ctl::ControllerKind::kCost;
    cost.config_group = "pool";
    cost.space = std::move(grid);
    cost.model.kind = ctl::ModelKind::kAnalytic;
    cost.model.form = ctl::AnalyticForm::kLinearCost;
    cost.model.cost = s.cost;

    controllers_ = {std::move(throughput), std::move(cost)};
    spec_.aggregator = gov::Aggregator::kWeightedSum;
    spec_.weights["throughput"] = s.weight_throughput;
    spec_.weights["cost"] = s.weight_cost;
    space_ = gov::make_joint_space(controllers_);
  }

  std::vector<ctl::UtilityValue> evaluate(
      const gov::ConfigurationVector& vector) const {
    const ctl::Metrics metrics;  // analytic utilities ignore observations
    std::vector<ctl::UtilityValue> values;
    for (const ctl::ControllerSpec& controller : controllers_) {
      values.push_back(ctl::evaluate_utility(
          controller, metrics, vector.components.at(controller.id)));
    }
    return values;
  }

  double utility_of(int64_t n) const {
    ctl::Configuration config;
    config.set("n", n);
    gov::ConfigurationVector vector;
    for (const ctl::ControllerSpec& controller : controllers_) {
      vector.components[controller.id] = config;
    }
    return gov::aggregate(evaluate(vector), spec_);
  }

  gov::SearchOutcome search() const {
    gov::SearchOptions options;
    options.strategy = gov::SearchStrategy::kExhaustive;
    return gov::search(
        space_,
        [this](const gov::ConfigurationVector& v) { return evaluate(v); },
        spec_, options);
  }

  static int64_t pool_size(const gov::SearchOutcome& outcome) {
    return outcome.best.config.components.at("throughput").get_int("n");
  }

 private:
  std::vector<ctl::ControllerSpec> controllers_;
  gov::GlobalUtilitySpec spec_;
  gov::JointSpace space_;
};

CoupledRun finish_run(std::vector<int64_t> series,
                      const PoolObjective& objective, int64_t discard) {
  CoupledRun run;
  std::vector<double> as_double(series.begin(), series.end());
  run.metrics = oscillation_metrics(as_double, discard);
  run.final_n = series.back();
  run.u_series.reserve(series.size());
  for (int64_t n : series) run.u_series.push_back(objective.utility_of(n));
  run.n_series = std::move(series);
  return run;
}

// Both scalers read the pool size the previous tick left behind and apply
// their corrections blind to each other; the sum lands one tick later.
std::vector<int64_t> run_scalers(const CoupledScenario& s) {
  const double desired_a =
      s.total_load / (s.capacity_per_instance * s.target_utilization);
  const int64_t cost_limit = static_cast<int64_t>(
      std::floor((s.cost_cap - s.cost.c_fixed) / s.cost.c_unit));
  std::vector<int64_t> series;
  series.reserve(s.ticks + 1);
  int64_t n = s.n0;
  series.push_back(n);
  for (int64_t t = 0; t < s.ticks; ++t) {
    double delta = s.gain_a * (desired_a - static_cast<double>(n));
    if (n > cost_limit) {
      delta += s.gain_b * static_cast<double>(cost_limit - n);
    }
    const int64_t next = std::llround(static_cast<double>(n) + delta);
    n = std::clamp(next, s.n_min, s.n_max);
    series.push_back(n);
  }
  return series;
}

}  // namespace

CoupledResult run_coupled(const CoupledScenario& scenario,
                          bool with_governed) {
  scenario.validate();
  const PoolObjective objective(scenario);
  CoupledResult result;
  result.ungoverned =
      finish_run(run_scalers(scenario), objective, scenario.discard);
  if (!with_governed) return result;

  gov::GovernanceTrace trace;
  std::vector<int64_t> series;
  series.reserve(scenario.ticks + 1);
  int64_t n = scenario.n0;
  series.push_back(n);
  int64_t set_point = n;
  double set_point_utility = 0.0;
  for (int64_t t = 0; t < scenario.ticks; ++t) {
    if (t % scenario.trigger_period == 0) {
      const gov::SearchOutcome outcome = objective.search();
      set_point = PoolObjective::pool_size(outcome);
      set_point_utility = outcome.best.u_g;
      trace.entries.push_back(gov::GovernanceTraceEntry{
          t, gov::TriggerReason::kPeriodic, outcome.examined,
          outcome.best.config, outcome.best.u_g, true});
    }
    const int64_t step = std::clamp<int64_t>(set_point - n, -1, 1);
    n = std::clamp(n + step, scenario.n_min, scenario.n_max);
    series.push_back(n);
  }

  result.governed = finish_run(std::move(series), objective, scenario.discard);
  result.set_point = set_point;
  result.set_point_utility = set_point_utility;
  result.governance = std::move(trace);
  if (result.governed->metrics.amplitude > 0.0) {
    result.amplitude_ratio = result.ungoverned.metrics.amplitude /
                             result.governed->metrics.amplitude;
  }
  return result;
}

}  // namespace netgov::lab
