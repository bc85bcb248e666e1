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

#include "netgov/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace netgov::ctl {

void Configuration::set(const std::string& name, ConfigValue value) {
  for (auto& [key, existing] : params) {
    if (key == name) {
      existing = std::move(value);
      return;
    }
  }
  params.emplace_back(name, std::move(value));
  std::sort(params.begin(), params.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

const ConfigValue* Configuration::find(const std::string& name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return &value;
  }
  return nullptr;
}

int64_t Configuration::get_int(const std::string& name) const {
  const ConfigValue* value = find(name);
  if (!value) throw ValidationError("configuration misses \"" + name + "\"");
  if (const int64_t* i = std::get_if<int64_t>(value)) return *i;
  throw ValidationError("configuration parameter \"" + name +
                        "\" is not an integer");
}

double Configuration::get_double(const std::string& name) const {
  const ConfigValue* value = find(name);
  if (!value) throw ValidationError("configuration misses \"" + name + "\"");
  if (const int64_t* i = std::get_if<int64_t>(value)) {
    return static_cast<double>(*i);
  }
  if (const double* d = std::get_if<double>(value)) return *d;
  throw ValidationError("configuration parameter \"" + name +
                        "\" is not numeric");
}

std::string Configuration::get_string(const std::string& name) const {
  const ConfigValue* value = find(name);
  if (!value) throw ValidationError("configuration misses \"" + name + "\"");
  if (const std::string* s = std::get_if<std::string>(value)) return *s;
  throw ValidationError("configuration parameter \"" + name +
                        "\" is not a string");
}

std::string Configuration::canonical() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : params) {
    if (const int64_t* i = std::get_if<int64_t>(&value)) {
      j[key] = *i;
    } else if (const double* d = std::get_if<double>(&value)) {
      j[key] = *d;
    } else {
      j[key] = std::get<std::string>(value);
    }
  }
  return j.dump();
}

Metrics monitor(const net::SimulationTrace& trace, TickRange window) {
  const int64_t size = static_cast<int64_t>(trace.records.size());
  if (window.begin < 0 || window.end > size || window.begin >= window.end) {
    throw ValidationError("metrics window out of range");
  }
  Metrics metrics;
  metrics.window = window;
  const double span = static_cast<double>(window.length());

  const auto before = [&](int64_t index, auto field) -> int64_t {
    return index > 0 ? trace.records[index - 1].*field : 0;
  };
  const net::TraceRecord& last = trace.records[window.end - 1];
  const int64_t delivered =
      last.delivered - before(window.begin, &net::TraceRecord::delivered);
  const int64_t created =
      last.created - before(window.begin, &net::TraceRecord::created);

  double queue_sum = 0.0;
  double delay_sum = 0.0;
  int64_t delivered_in_window = 0;
  for (int64_t t = window.begin; t < window.end; ++t) {
    const net::TraceRecord& r = trace.records[t];
    queue_sum += static_cast<double>(r.queue_total);
    delay_sum += r.delay_sum_now;
    delivered_in_window += r.delivered_now;
  }

  metrics.delivered_rate = static_cast<double>(delivered) / span;
  metrics.offered_load = static_cast<double>(created) / span;
  metrics.mean_queue_total = queue_sum / span;
  metrics.mean_delay =
      delivered_in_window > 0 ? delay_sum / delivered_in_window : 0.0;
  metrics.utilization =
      trace.service_capacity > 0
          ? metrics.delivered_rate / static_cast<double>(trace.service_capacity)
          : 0.0;
  return metrics;
}

double predict(const PerformanceModel& model, const Configuration& config,
               double load) {
  (void)load;
  if (model.kind == ModelKind::kEmpirical) {
    const auto it = model.table.find(config.canonical());
    if (it == model.table.end()) {
      throw ValidationError("empirical model has no entry for " +
                            config.canonical());
    }
    return it->second;
  }
  const double n = config.get_double("n");
  if (n < 0.0) throw ValidationError("resource count must be >= 0");
  switch (model.form) {
    case AnalyticForm::kSaturatingThroughput: {
      if (!(model.throughput.t_max > 0.0) || !(model.throughput.beta > 0.0)) {
        throw ValidationError("throughput model needs t_max > 0 and beta > 0");
      }
      return model.throughput.t_max *
             (1.0 - std::exp(-model.throughput.beta * n));
    }
    case AnalyticForm::kLinearCost: {
      if (model.cost.c_fixed < 0.0 || model.cost.c_unit < 0.0) {
        throw ValidationError("cost model needs non-negative coefficients");
      }
      return model.cost.c_fixed + model.cost.c_unit * n;
    }
  }
  throw InvariantError("unknown analytic form");
}

void ControllerSpec::validate() const {
  if (id.empty()) throw ValidationError("controller id must not be empty");
  if (space.empty()) {
    throw ValidationError("controller \"" + id +
                          "\" has an empty configuration space");
  }
  std::set<std::string> seen;
  for (const Configuration& config : space) {
    if (!seen.insert(config.canonical()).second) {
      throw ValidationError("controller \"" + id +
                            "\" lists duplicate configuration " +
                            config.canonical());
    }
  }
  if (kind == ControllerKind::kCongestion) {
    if (!problem) {
      throw ValidationError("congestion controller \"" + id +
                            "\" needs an embedded rate problem");
    }
    problem->validate();
  }
  if (kind == ControllerKind::kAdmission && admission_penalty < 0.0) {
    throw ValidationError("admission penalty must be >= 0");
  }
}

const std::vector<Configuration>& config_space(const ControllerSpec& spec) {
  spec.validate();
  return spec.space;
}

namespace {

void require_in_space(const ControllerSpec& spec, const Configuration& config) {
  for (const Configuration& candidate : spec.space) {
    if (candidate == config) return;
  }
  throw ValidationError("configuration " + config.canonical() +
                        " is outside the space of controller \"" + spec.id +
                        "\"");
}

double congestion_utility(const ControllerSpec& spec,
                          const Configuration& config,
                          const std::vector<double>* warm_prices,
                          std::vector<double>* prices_out) {
  num::RateProblem problem = *spec.problem;
  if (config.has("alpha")) {
    const double alpha = config.get_double("alpha");
    for (num::UtilitySpec& u : problem.utilities) {
      if (alpha == 1.0) {
        u = num::UtilitySpec::log_weighted(u.weight);
      } else {
        u = num::UtilitySpec::alpha_fair(u.weight, alpha);
      }
    }
  }
  num::SolveOptions options = spec.solver;
  if (config.has("gamma")) options.gamma = config.get_double("gamma");
  const num::RateSolution solution =
      num::solve_num(problem, options, warm_prices);
  if (prices_out) *prices_out = solution.prices;
  return num::objective(problem, solution.rates);
}

}  // namespace

UtilityValue evaluate_utility(const ControllerSpec& spec,
                              const Metrics& metrics,
                              const Configuration& config,
                              const std::vector<double>* warm_prices,
                              std::vector<double>* prices_out) {
  spec.validate();
  require_in_space(spec, config);
  UtilityValue result;
  result.controller_id = spec.id;
  result.config = config;
  switch (spec.kind) {
    case ControllerKind::kThroughput:
      result.value = predict(spec.model, config, metrics.offered_load);
      break;
    case ControllerKind::kCost:
      result.value = -predict(spec.model, config, metrics.offered_load);
      break;
    case ControllerKind::kCongestion:
      result.value = congestion_utility(spec, config, warm_prices, prices_out);
      break;
    case ControllerKind::kAdmission:
      result.value = metrics.delivered_rate -
                     spec.admission_penalty * metrics.mean_queue_total;
      break;
    case ControllerKind::kRouting:
      result.value = -metrics.mean_delay;
      break;
  }
  return result;
}

UtilityValue evaluate_utility(const ControllerSpec& spec,
                              const Metrics& metrics,
                              const Configuration& config) {
  return evaluate_utility(spec, metrics, config, nullptr, nullptr);
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kThroughput: return "throughput";
    case ControllerKind::kCost: return "cost";
    case ControllerKind::kCongestion: return "congestion";
    case ControllerKind::kAdmission: return "admission";
    case ControllerKind::kRouting: return "routing";
  }
  throw InvariantError("unknown controller kind");
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "throughput") return ControllerKind::kThroughput;
  if (name == "cost") return ControllerKind::kCost;
  if (name == "congestion") return ControllerKind::kCongestion;
  if (name == "admission") return ControllerKind::kAdmission;
  if (name == "routing") return ControllerKind::kRouting;
  throw ValidationError("unknown controller kind \"" + name + "\"");
}

}  // namespace netgov::ctl
