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

#include "netgov/governance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <utility>

namespace netgov::gov {

namespace {

// Candidates whose evaluation fails to converge score this instead of
// aborting the search; they can only win if every candidate failed.
constexpr double kFailedUtility = -1e300;

std::vector<ctl::UtilityValue> sorted_by_id(
    std::vector<ctl::UtilityValue> values) {
  std::sort(values.begin(), values.end(),
            [](const ctl::UtilityValue& a, const ctl::UtilityValue& b) {
              return a.controller_id < b.controller_id;
            });
  return values;
}

}  // namespace

std::string ConfigurationVector::canonical() const { return to_json().dump(); }

nlohmann::json ConfigurationVector::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, config] : components) {
    j[id] = nlohmann::json::parse(config.canonical());
  }
  return j;
}

double aggregate(const std::vector<ctl::UtilityValue>& values,
                 const GlobalUtilitySpec& spec) {
  if (values.empty()) {
    throw ValidationError("aggregate needs at least one utility");
  }
  const std::vector<ctl::UtilityValue> sorted = sorted_by_id(values);
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].controller_id == sorted[i - 1].controller_id) {
      throw ValidationError("duplicate utility for controller \"" +
                            sorted[i].controller_id + "\"");
    }
  }
  switch (spec.aggregator) {
    case Aggregator::kWeightedSum: {
      if (!spec.weights.empty()) {
        bool any_positive = false;
        for (const auto& [id, weight] : spec.weights) {
          if (weight < 0.0) {
            throw ValidationError("negative weight for controller \"" + id +
                                  "\"");
          }
          if (weight > 0.0) any_positive = true;
        }
        if (!any_positive) {
          throw ValidationError("weighted sum needs a strictly positive weight");
        }
      }
      double total = 0.0;
      for (const ctl::UtilityValue& value : sorted) {
        double weight = 1.0;
        if (!spec.weights.empty()) {
          const auto it = spec.weights.find(value.controller_id);
          if (it == spec.weights.end()) {
            throw ValidationError("no weight for controller \"" +
                                  value.controller_id + "\"");
          }
          weight = it->second;
        }
        if (weight == 0.0) continue;  // ignored outright
        total += weight * value.value;
      }
      return total;
    }
    case Aggregator::kMin: {
      double lowest = sorted.front().value;
      for (const ctl::UtilityValue& value : sorted) {
        lowest = std::min(lowest, value.value);
      }
      return lowest;
    }
    case Aggregator::kProductOfShifted: {
      double product = 1.0;
      for (const ctl::UtilityValue& value : sorted) {
        double shift = 0.0;
        const auto it = spec.shifts.find(value.controller_id);
        if (it != spec.shifts.end()) shift = it->second;
        const double term = value.value + shift;
        if (!(term > 0.0)) {
          throw ValidationError(
              "product aggregator needs shifted utilities > 0; controller \"" +
              value.controller_id + "\" yields " + format_g6(term));
        }
        product *= term;
      }
      return product;
    }
  }
  throw InvariantError("unknown aggregator");
}

uint64_t JointSpace::size() const {
  uint64_t total = 1;
  for (const JointAxis& axis : axes) {
    const uint64_t count = axis.configs.size();
    if (count == 0) return 0;
    if (total > std::numeric_limits<uint64_t>::max() / count) {
      return std::numeric_limits<uint64_t>::max();  // saturate
    }
    total *= count;
  }
  return total;
}

ConfigurationVector JointSpace::vector_at(
    const std::vector<size_t>& indices) const {
  if (indices.size() != axes.size()) {
    throw ValidationError("index vector has wrong length");
  }
  ConfigurationVector vector;
  for (size_t a = 0; a < axes.size(); ++a) {
    if (indices[a] >= axes[a].configs.size()) {
      throw ValidationError("axis index out of range");
    }
    for (const std::string& id : axes[a].controller_ids) {
      vector.components[id] = axes[a].configs[indices[a]];
    }
  }
  return vector;
}

std::vector<size_t> JointSpace::indices_of(
    const ConfigurationVector& vector) const {
  std::vector<size_t> indices(axes.size(), 0);
  for (size_t a = 0; a < axes.size(); ++a) {
    const JointAxis& axis = axes[a];
    const auto component = vector.components.find(axis.controller_ids.front());
    if (component == vector.components.end()) {
      throw ValidationError("configuration vector misses controller \"" +
                            axis.controller_ids.front() + "\"");
    }
    bool found = false;
    for (size_t i = 0; i < axis.configs.size(); ++i) {
      if (axis.configs[i] == component->second) {
        indices[a] = i;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ValidationError("configuration " + component->second.canonical() +
                            " is outside axis \"" + axis.group + "\"");
    }
  }
  return indices;
}

JointSpace make_joint_space(const std::vector<ctl::ControllerSpec>& specs) {
  if (specs.empty()) throw ValidationError("need at least one controller");
  std::set<std::string> ids;
  for (const ctl::ControllerSpec& spec : specs) {
    spec.validate();
    if (!ids.insert(spec.id).second) {
      throw ValidationError("duplicate controller id \"" + spec.id + "\"");
    }
  }
  std::map<std::string, JointAxis> by_group;
  for (const ctl::ControllerSpec& spec : specs) {
    JointAxis& axis = by_group[spec.group()];
    if (axis.controller_ids.empty()) {
      axis.group = spec.group();
      axis.configs = spec.space;
    } else if (!(axis.configs == spec.space)) {
      throw ValidationError(
          "controllers in group \"" + spec.group() +
          "\" must expose identical configuration spaces");
    }
    axis.controller_ids.push_back(spec.id);
  }
  JointSpace space;
  for (auto& [group, axis] : by_group) {
    (void)group;
    std::sort(axis.controller_ids.begin(), axis.controller_ids.end());
    space.axes.push_back(std::move(axis));
  }
  return space;
}

namespace {

std::vector<size_t> decode_linear(const JointSpace& space, uint64_t linear) {
  std::vector<size_t> indices(space.axes.size(), 0);
  for (size_t a = space.axes.size(); a-- > 0;) {
    const uint64_t count = space.axes[a].configs.size();
    indices[a] = static_cast<size_t>(linear % count);
    linear /= count;
  }
  return indices;
}

struct Scored {
  double u_g = 0.0;
  std::vector<ctl::UtilityValue> utilities;
};

class Memo {
 public:
  Memo(const JointSpace& space, const Evaluator& evaluator,
       const GlobalUtilitySpec& spec)
      : space_(space), evaluator_(evaluator), spec_(spec) {}

  const Scored& eval(const std::vector<size_t>& indices) {
    auto it = cache_.find(indices);
    if (it == cache_.end()) {
      Scored scored;
      scored.utilities = sorted_by_id(evaluator_(space_.vector_at(indices)));
      scored.u_g = aggregate(scored.utilities, spec_);
      it = cache_.emplace(indices, std::move(scored)).first;
    }
    return it->second;
  }

  uint64_t examined() const { return cache_.size(); }

 private:
  const JointSpace& space_;
  const Evaluator& evaluator_;
  const GlobalUtilitySpec& spec_;
  std::map<std::vector<size_t>, Scored> cache_;
};

SearchOutcome finish(const JointSpace& space, std::vector<size_t> indices,
                     Scored scored, uint64_t examined, int passes) {
  SearchOutcome outcome;
  outcome.best.config = space.vector_at(indices);
  outcome.best.utilities = std::move(scored.utilities);
  outcome.best.u_g = scored.u_g;
  outcome.best_indices = std::move(indices);
  outcome.examined = examined;
  outcome.passes = passes;
  return outcome;
}

SearchOutcome search_exhaustive(const JointSpace& space,
                                const Evaluator& evaluator,
                                const GlobalUtilitySpec& spec,
                                const SearchOptions& options) {
  const uint64_t total = space.size();
  if (total > options.budget) {
    throw BudgetError(
        "joint space has " + std::to_string(total) +
        " points, above the exhaustive budget of " +
        std::to_string(options.budget) +
        "; use coordinate-descent or hill-climb instead");
  }
  std::vector<Scored> all(total);
  parallel_for(static_cast<int64_t>(total), options.jobs, [&](int64_t linear) {
    Scored scored;
    scored.utilities = sorted_by_id(
        evaluator(space.vector_at(decode_linear(space, linear))));
    scored.u_g = aggregate(scored.utilities, spec);
    all[linear] = std::move(scored);
  });
  uint64_t best_linear = 0;
  for (uint64_t linear = 1; linear < total; ++linear) {
    if (all[linear].u_g > all[best_linear].u_g) best_linear = linear;
  }
  return finish(space, decode_linear(space, best_linear),
                std::move(all[best_linear]), total, 0);
}

SearchOutcome search_coordinate_descent(const JointSpace& space,
                                        const Evaluator& evaluator,
                                        const GlobalUtilitySpec& spec,
                                        const std::vector<size_t>& start) {
  Memo memo(space, evaluator, spec);
  std::vector<size_t> indices = start;
  double current = memo.eval(indices).u_g;
  int passes = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    ++passes;
    for (size_t a = 0; a < space.axes.size(); ++a) {
      size_t best_j = indices[a];
      double best_v = current;
      std::vector<size_t> probe = indices;
      for (size_t j = 0; j < space.axes[a].configs.size(); ++j) {
        if (j == indices[a]) continue;
        probe[a] = j;
        const double v = memo.eval(probe).u_g;
        if (v > best_v) {
          best_v = v;
          best_j = j;
        }
      }
      if (best_j != indices[a]) {
        indices[a] = best_j;
        current = best_v;
        improved = true;
      }
    }
  }
  Scored scored = memo.eval(indices);
  return finish(space, std::move(indices), std::move(scored), memo.examined(),
                passes);
}

SearchOutcome search_hill_climb(const JointSpace& space,
                                const Evaluator& evaluator,
                                const GlobalUtilitySpec& spec,
                                const SearchOptions& options,
                                const std::vector<size_t>& incumbent) {
  Memo memo(space, evaluator, spec);
  std::vector<size_t> best_indices = incumbent;
  double best_value = memo.eval(incumbent).u_g;

  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::vector<size_t> indices;
    if (r == 0) {
      indices = incumbent;
    } else {
      Rng rng(mix_seed(options.seed, static_cast<uint64_t>(r)));
      indices.resize(space.axes.size());
      for (size_t a = 0; a < space.axes.size(); ++a) {
        indices[a] = static_cast<size_t>(
            rng.below(static_cast<uint64_t>(space.axes[a].configs.size())));
      }
    }
    double current = memo.eval(indices).u_g;
    for (;;) {
      // Single-component neighbors: one axis index moved by one step.
      std::vector<size_t> best_neighbor;
      double best_neighbor_value = current;
      for (size_t a = 0; a < space.axes.size(); ++a) {
        for (int direction : {-1, +1}) {
          if (direction < 0 && indices[a] == 0) continue;
          if (direction > 0 &&
              indices[a] + 1 >= space.axes[a].configs.size()) {
            continue;
          }
          std::vector<size_t> probe = indices;
          probe[a] += direction;
          const double v = memo.eval(probe).u_g;
          if (v > best_neighbor_value) {
            best_neighbor_value = v;
            best_neighbor = std::move(probe);
          }
        }
      }
      if (best_neighbor.empty()) break;
      indices = std::move(best_neighbor);
      current = best_neighbor_value;
    }
    if (current > best_value) {
      best_value = current;
      best_indices = indices;
    }
  }
  Scored scored = memo.eval(best_indices);
  return finish(space, std::move(best_indices), std::move(scored),
                memo.examined(), 0);
}

}  // namespace

SearchOutcome search(const JointSpace& space, const Evaluator& evaluator,
                     const GlobalUtilitySpec& spec,
                     const SearchOptions& options,
                     const std::vector<size_t>* incumbent) {
  if (space.axes.empty()) throw ValidationError("joint space has no axes");
  if (space.size() == 0) throw ValidationError("joint space has an empty axis");
  std::vector<size_t> start(space.axes.size(), 0);
  if (incumbent) {
    if (incumbent->size() != space.axes.size()) {
      throw ValidationError("incumbent index vector has wrong length");
    }
    start = *incumbent;
  }
  SearchStrategy strategy = options.strategy;
  if (strategy == SearchStrategy::kAuto) {
    strategy = space.size() <= options.auto_exhaustive_limit
                   ? SearchStrategy::kExhaustive
                   : SearchStrategy::kCoordinateDescent;
  }
  switch (strategy) {
    case SearchStrategy::kExhaustive:
      return search_exhaustive(space, evaluator, spec, options);
    case SearchStrategy::kCoordinateDescent:
      return search_coordinate_descent(space, evaluator, spec, start);
    case SearchStrategy::kHillClimb:
      return search_hill_climb(space, evaluator, spec, options, start);
    case SearchStrategy::kAuto:
      break;
  }
  throw InvariantError("unknown search strategy");
}

std::vector<GovernanceEvaluation> evaluate_all(const JointSpace& space,
                                               const Evaluator& evaluator,
                                               const GlobalUtilitySpec& spec,
                                               uint64_t budget, int jobs) {
  const uint64_t total = space.size();
  if (total > budget) {
    throw BudgetError("joint space has " + std::to_string(total) +
                      " points, above the evaluation budget of " +
                      std::to_string(budget) + "; reduce the grids");
  }
  std::vector<GovernanceEvaluation> evaluations(total);
  parallel_for(static_cast<int64_t>(total), jobs, [&](int64_t linear) {
    GovernanceEvaluation evaluation;
    evaluation.config = space.vector_at(decode_linear(space, linear));
    evaluation.utilities = sorted_by_id(evaluator(evaluation.config));
    evaluation.u_g = aggregate(evaluation.utilities, spec);
    evaluations[linear] = std::move(evaluation);
  });
  return evaluations;
}

std::vector<GovernanceEvaluation> pareto_front(
    const std::vector<GovernanceEvaluation>& evaluations,
    const std::vector<std::string>& objective_ids) {
  if (evaluations.empty()) {
    throw ValidationError("pareto front needs at least one evaluation");
  }
  if (objective_ids.empty()) {
    throw ValidationError("pareto front needs at least one objective");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(evaluations.size());
  for (const GovernanceEvaluation& evaluation : evaluations) {
    std::vector<double> row;
    row.reserve(objective_ids.size());
    for (const std::string& id : objective_ids) {
      const ctl::UtilityValue* found = nullptr;
      for (const ctl::UtilityValue& value : evaluation.utilities) {
        if (value.controller_id == id) {
          found = &value;
          break;
        }
      }
      if (!found) {
        throw ValidationError("evaluation misses objective controller \"" +
                              id + "\"");
      }
      row.push_back(found->value);
    }
    rows.push_back(std::move(row));
  }

  // Exact duplicates keep only the canonically first point.
  std::vector<size_t> kept;
  std::set<std::vector<double>> seen;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (seen.insert(rows[i]).second) kept.push_back(i);
  }

  std::vector<GovernanceEvaluation> front;
  for (size_t i : kept) {
    bool dominated = false;
    for (size_t j : kept) {
      if (i == j) continue;
      bool all_geq = true;
      bool any_gt = false;
      for (size_t k = 0; k < objective_ids.size(); ++k) {
        if (rows[j][k] < rows[i][k]) {
          all_geq = false;
          break;
        }
        if (rows[j][k] > rows[i][k]) any_gt = true;
      }
      if (all_geq && any_gt) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(evaluations[i]);
  }
  return front;
}

std::string to_string(TriggerReason reason) {
  switch (reason) {
    case TriggerReason::kPeriodic: return "periodic";
    case TriggerReason::kThresholdBreach: return "threshold-breach";
    case TriggerReason::kManual: return "manual";
  }
  throw InvariantError("unknown trigger reason");
}

void GovernanceTrace::write_csv(std::ostream& os,
                                const std::string& meta) const {
  if (!meta.empty()) os << "# " << meta << "\n";
  os << "tick,reason,examined,U_g,config_json\n";
  for (const GovernanceTraceEntry& entry : entries) {
    os << entry.tick << ',' << to_string(entry.reason) << ',' << entry.examined
       << ',' << format_g6(entry.u_g) << ','
       << csv_quote(entry.config.canonical()) << '\n';
  }
}

nlohmann::json GovernanceTrace::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const GovernanceTraceEntry& entry : entries) {
    nlohmann::json e;
    e["tick"] = entry.tick;
    e["reason"] = to_string(entry.reason);
    e["examined"] = entry.examined;
    e["u_g"] = entry.u_g;
    e["threshold_met"] = entry.threshold_met;
    e["config"] = entry.config.to_json();
    j.push_back(e);
  }
  return j;
}

GovernOutcome govern_loop(GovernableSystem& system,
                          const std::vector<ctl::ControllerSpec>& controllers,
                          const GlobalUtilitySpec& spec,
                          const TriggerPolicy& trigger, int64_t horizon,
                          const SearchOptions& options,
                          const ConfigurationVector* initial) {
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (trigger.period < 1) throw ValidationError("trigger period must be >= 1");
  if (trigger.lookahead < 1) {
    throw ValidationError("look-ahead window must be >= 1");
  }
  const JointSpace space = make_joint_space(controllers);
  std::set<int64_t> manual(trigger.manual_ticks.begin(),
                           trigger.manual_ticks.end());
  for (int64_t t : manual) {
    if (t < 0 || t >= horizon) {
      throw ValidationError("manual trigger tick out of horizon");
    }
  }

  GovernOutcome outcome;
  for (const ctl::ControllerSpec& controller : controllers) {
    if (controller.kind == ctl::ControllerKind::kAdmission ||
        controller.kind == ctl::ControllerKind::kRouting) {
      outcome.any_actuating = true;
    }
  }

  const Evaluator evaluator = [&](const ConfigurationVector& candidate) {
    try {
      return system.evaluate_candidate(candidate, trigger.lookahead);
    } catch (const ConvergenceError&) {
      std::vector<ctl::UtilityValue> failed;
      for (const ctl::ControllerSpec& controller : controllers) {
        failed.push_back(ctl::UtilityValue{
            controller.id, kFailedUtility,
            candidate.components.at(controller.id)});
      }
      return failed;
    }
  };

  std::vector<size_t> incumbent =
      initial ? space.indices_of(*initial)
              : std::vector<size_t>(space.axes.size(), 0);
  ConfigurationVector active = space.vector_at(incumbent);
  system.apply(active);

  const int64_t measure_window = std::max<int64_t>(1, trigger.period / 2);
  int64_t breach_armed_from = 0;
  bool breach_pending = false;

  for (int64_t t = 0; t < horizon; ++t) {
    std::optional<TriggerReason> reason;
    if (breach_pending) {
      reason = TriggerReason::kThresholdBreach;
    } else if (manual.count(t) > 0) {
      reason = TriggerReason::kManual;
    } else if (t % trigger.period == 0) {
      reason = TriggerReason::kPeriodic;
    }
    if (reason) {
      const SearchOutcome result =
          search(space, evaluator, spec, options, &incumbent);
      incumbent = result.best_indices;
      active = result.best.config;
      system.apply(active);
      outcome.trace.entries.push_back(GovernanceTraceEntry{
          t, *reason, result.examined, active, result.best.u_g,
          result.best.u_g >= trigger.threshold});
      breach_armed_from = t + measure_window;
      breach_pending = false;
    }
    system.advance(1);
    const int64_t window = std::min<int64_t>(measure_window, t + 1);
    const double measured = aggregate(system.measure(active, window), spec);
    outcome.u_g_series.push_back(measured);
    if (measured < trigger.threshold && t + 1 >= breach_armed_from) {
      breach_pending = true;
    }
  }
  outcome.final_config = active;
  return outcome;
}

NetSimSystem::NetSimSystem(Setup setup,
                           std::vector<ctl::ControllerSpec> controllers)
    : setup_(std::move(setup)),
      controllers_(std::move(controllers)),
      state_(net::NetworkState::make(setup_.topology, setup_.service_rate,
                                     setup_.seed)),
      traffic_(setup_.traffic),
      routing_(setup_.routing) {
  std::sort(controllers_.begin(), controllers_.end(),
            [](const ctl::ControllerSpec& a, const ctl::ControllerSpec& b) {
              return a.id < b.id;
            });
  for (const ctl::ControllerSpec& controller : controllers_) {
    controller.validate();
  }
  traffic_.validate(state_.topology);
  router_ = std::make_unique<net::Router>(state_.topology, routing_);
  trace_.service_capacity =
      static_cast<int64_t>(state_.topology.node_count) * state_.service_rate;
}

void NetSimSystem::apply_actuation(
    const std::vector<ctl::ControllerSpec>& specs,
    const ConfigurationVector& config, net::TrafficSpec& traffic,
    net::RoutingPolicy& routing) {
  for (const ctl::ControllerSpec& controller : specs) {
    const auto component = config.components.find(controller.id);
    if (component == config.components.end()) {
      throw ValidationError("configuration vector misses controller \"" +
                            controller.id + "\"");
    }
    if (controller.kind == ctl::ControllerKind::kAdmission) {
      const int64_t limit = component->second.get_int("limit");
      if (limit < 0) throw ValidationError("admission limit must be >= 0");
      traffic.admission_queue_limit = static_cast<int>(limit);
    } else if (controller.kind == ctl::ControllerKind::kRouting) {
      const std::string policy = component->second.get_string("policy");
      if (policy == "static-shortest-path") {
        routing.kind = net::RoutingKind::kStaticShortestPath;
      } else if (policy == "queue-aware-shortest-path") {
        routing.kind = net::RoutingKind::kQueueAwareShortestPath;
      } else if (policy == "local-greedy") {
        routing.kind = net::RoutingKind::kLocalGreedy;
      } else {
        throw ValidationError("unknown routing policy \"" + policy + "\"");
      }
    }
  }
}

void NetSimSystem::apply(const ConfigurationVector& config) {
  apply_actuation(controllers_, config, traffic_, routing_);
  router_ = std::make_unique<net::Router>(state_.topology, routing_);
  for (const ctl::ControllerSpec& controller : controllers_) {
    if (controller.kind != ctl::ControllerKind::kCongestion) continue;
    if (setup_.reset_on_reconfigure) {
      carried_prices_.erase(controller.id);
      continue;
    }
    const auto component = config.components.find(controller.id);
    if (component == config.components.end()) continue;
    const auto carried = carried_prices_.find(controller.id);
    const std::vector<double>* warm =
        carried != carried_prices_.end() ? &carried->second : nullptr;
    try {
      std::vector<double> prices;
      ctl::Metrics unused;
      ctl::evaluate_utility(controller, unused, component->second, warm,
                            &prices);
      carried_prices_[controller.id] = std::move(prices);
    } catch (const ConvergenceError&) {
      carried_prices_.erase(controller.id);
    }
  }
}

void NetSimSystem::advance(int64_t ticks) {
  net::run_into(state_, traffic_, *router_, ticks, trace_);
}

std::vector<ctl::UtilityValue> NetSimSystem::evaluate_with(
    const ctl::Metrics& metrics, const ConfigurationVector& config) const {
  std::vector<ctl::UtilityValue> values;
  values.reserve(controllers_.size());
  for (const ctl::ControllerSpec& controller : controllers_) {
    const auto component = config.components.find(controller.id);
    if (component == config.components.end()) {
      throw ValidationError("configuration vector misses controller \"" +
                            controller.id + "\"");
    }
    const std::vector<double>* warm = nullptr;
    if (controller.kind == ctl::ControllerKind::kCongestion) {
      const auto carried = carried_prices_.find(controller.id);
      if (carried != carried_prices_.end()) warm = &carried->second;
    }
    values.push_back(ctl::evaluate_utility(controller, metrics,
                                           component->second, warm, nullptr));
  }
  return values;
}

std::vector<ctl::UtilityValue> NetSimSystem::measure(
    const ConfigurationVector& config, int64_t window) const {
  const int64_t size = static_cast<int64_t>(trace_.records.size());
  if (size < 1) throw ValidationError("nothing observed yet");
  const int64_t span = std::min(window, size);
  const ctl::Metrics metrics = ctl::monitor(trace_, {size - span, size});
  return evaluate_with(metrics, config);
}

std::vector<ctl::UtilityValue> NetSimSystem::evaluate_candidate(
    const ConfigurationVector& config, int64_t window) const {
  if (window < 1) throw ValidationError("look-ahead window must be >= 1");
  net::NetworkState clone = state_;
  // Same derived seed for every candidate at a trigger: candidates face
  // identical traffic and the loop stays deterministic.
  clone.rng = Rng(mix_seed(setup_.seed, static_cast<uint64_t>(state_.tick)));
  net::TrafficSpec traffic = traffic_;
  net::RoutingPolicy routing = routing_;
  apply_actuation(controllers_, config, traffic, routing);
  const net::Router router(clone.topology, routing);
  const int64_t base_created = clone.created_total;
  const int64_t base_delivered = clone.delivered_total;
  const int64_t base_dropped = clone.dropped_total;
  net::SimulationTrace lookahead;
  net::run_into(clone, traffic, router, window, lookahead);
  // The clone carries the live totals, but the monitor reads a trace as if
  // it began at zero. Rebase the running counters onto the look-ahead
  // window so the rates cover only what happened inside it.
  for (net::TraceRecord& record : lookahead.records) {
    record.created -= base_created;
    record.delivered -= base_delivered;
    record.dropped -= base_dropped;
  }
  const ctl::Metrics metrics = ctl::monitor(lookahead, {0, window});
  return evaluate_with(metrics, config);
}

}  // namespace netgov::gov
