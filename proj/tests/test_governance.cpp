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

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "netgov/governance.hpp"
#include "test_util.hpp"

using namespace netgov;

namespace {

ctl::Configuration config_of(const std::string& name, int64_t value) {
  ctl::Configuration config;
  config.set(name, value);
  return config;
}

ctl::ControllerSpec scripted_controller(const std::string& id, int values,
                                        const std::string& group = "") {
  ctl::ControllerSpec spec;
  spec.id = id;
  spec.kind = ctl::ControllerKind::kThroughput;
  spec.config_group = group;
  for (int v = 0; v < values; ++v) {
    spec.space.push_back(config_of("v", v));
  }
  return spec;
}

ctl::UtilityValue utility_of(const std::string& id, double value,
                             ctl::Configuration config) {
  ctl::UtilityValue u;
  u.controller_id = id;
  u.value = value;
  u.config = std::move(config);
  return u;
}

// Utilities scripted per (controller, config value, tick); lets trigger
// tests assert exact schedules with no simulator noise.
class ScriptedSystem : public gov::GovernableSystem {
 public:
  using Script = std::function<double(const std::string& id, int64_t v,
                                      int64_t tick)>;
  explicit ScriptedSystem(Script script) : script_(std::move(script)) {}

  void apply(const gov::ConfigurationVector&) override {}
  void advance(int64_t ticks) override { tick_ += ticks; }
  int64_t now() const override { return tick_; }

  std::vector<ctl::UtilityValue> measure(
      const gov::ConfigurationVector& config, int64_t) const override {
    return at(config, tick_);
  }
  std::vector<ctl::UtilityValue> evaluate_candidate(
      const gov::ConfigurationVector& config, int64_t) const override {
    return at(config, tick_);
  }

 private:
  std::vector<ctl::UtilityValue> at(const gov::ConfigurationVector& config,
                                    int64_t tick) const {
    std::vector<ctl::UtilityValue> values;
    for (const auto& [id, cfg] : config.components) {
      values.push_back(
          utility_of(id, script_(id, cfg.get_int("v"), tick), cfg));
    }
    return values;
  }

  Script script_;
  int64_t tick_ = 0;
};

gov::GlobalUtilitySpec sum_spec() {
  gov::GlobalUtilitySpec spec;
  spec.aggregator = gov::Aggregator::kWeightedSum;
  return spec;
}

}  // namespace

TEST_SUITE("governance") {

TEST_CASE("weighted sum skips zero weights and validates the rest") {
  gov::GlobalUtilitySpec spec = sum_spec();
  spec.weights = {{"a", 2.0}, {"b", 0.0}};
  const std::vector<ctl::UtilityValue> values = {
      utility_of("a", 3.0, {}), utility_of("b", 100.0, {})};
  CHECK(gov::aggregate(values, spec) == doctest::Approx(6.0));

  spec.weights = {{"a", 0.0}, {"b", 0.0}};
  CHECK_THROWS_AS(gov::aggregate(values, spec), ValidationError);
  spec.weights = {{"a", -1.0}, {"b", 1.0}};
  CHECK_THROWS_AS(gov::aggregate(values, spec), ValidationError);
}

TEST_CASE("aggregate folds in id order regardless of input order") {
  const gov::GlobalUtilitySpec spec = sum_spec();
  const std::vector<ctl::UtilityValue> forward = {
      utility_of("a", 0.1, {}), utility_of("b", 0.2, {}),
      utility_of("c", 0.3, {})};
  std::vector<ctl::UtilityValue> backward(forward.rbegin(), forward.rend());
  CHECK(gov::aggregate(forward, spec) == gov::aggregate(backward, spec));

  const std::vector<ctl::UtilityValue> duplicated = {
      utility_of("a", 1.0, {}), utility_of("a", 2.0, {})};
  CHECK_THROWS_AS(gov::aggregate(duplicated, spec), ValidationError);
}

TEST_CASE("min and product aggregators") {
  gov::GlobalUtilitySpec spec;
  spec.aggregator = gov::Aggregator::kMin;
  const std::vector<ctl::UtilityValue> values = {
      utility_of("a", 3.0, {}), utility_of("b", -1.5, {}),
      utility_of("c", 7.0, {})};
  CHECK(gov::aggregate(values, spec) == doctest::Approx(-1.5));

  spec.aggregator = gov::Aggregator::kProductOfShifted;
  spec.shifts = {{"a", 0.0}, {"b", 2.0}, {"c", 0.0}};
  CHECK(gov::aggregate(values, spec) == doctest::Approx(3.0 * 0.5 * 7.0));

  spec.shifts = {{"b", 1.0}};  // shifted term hits 1.5 - 1.5 = ... -0.5
  CHECK_THROWS_AS(gov::aggregate(values, spec), ValidationError);
}

TEST_CASE("joint space sorts axes by group and groups share one axis") {
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("zeta", 3),
      scripted_controller("alpha", 2),
      scripted_controller("beta", 3, "zeta"),  // shares zeta's group? no:
  };
  // beta declares group "zeta" which zeta does not join (zeta's group
  // defaults to its own id), so axis "zeta" carries both and must have
  // identical spaces: both have 3 values, so this is legal.
  const gov::JointSpace space = gov::make_joint_space(specs);
  REQUIRE(space.axes.size() == 2);
  CHECK(space.axes[0].group == "alpha");
  CHECK(space.axes[1].group == "zeta");
  CHECK(space.axes[1].controller_ids ==
        std::vector<std::string>{"beta", "zeta"});
  CHECK(space.size() == 6);

  // Grouped controllers with different spaces are rejected.
  std::vector<ctl::ControllerSpec> clash = {
      scripted_controller("a", 2, "g"), scripted_controller("b", 3, "g")};
  CHECK_THROWS_AS(gov::make_joint_space(clash), ValidationError);
}

TEST_CASE("vector_at walks the canonical order, first axis slowest") {
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("a", 2), scripted_controller("b", 3)};
  const gov::JointSpace space = gov::make_joint_space(specs);
  const gov::ConfigurationVector v01 = space.vector_at({0, 1});
  CHECK(v01.components.at("a").get_int("v") == 0);
  CHECK(v01.components.at("b").get_int("v") == 1);
  CHECK(space.indices_of(v01) == std::vector<size_t>{0, 1});
  const gov::ConfigurationVector v12 = space.vector_at({1, 2});
  CHECK(v12.canonical() == R"({"a":{"v":1},"b":{"v":2}})");
}

TEST_CASE("exhaustive search equals independent enumeration with ties") {
  // Utility table indexed by (a value, b value); two exact ties at the max.
  const double table[2][3] = {{1.0, 5.0, 2.0}, {5.0, 0.0, 3.0}};
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("a", 2), scripted_controller("b", 3)};
  const gov::JointSpace space = gov::make_joint_space(specs);
  const auto evaluator = [&](const gov::ConfigurationVector& config) {
    const int64_t a = config.components.at("a").get_int("v");
    const int64_t b = config.components.at("b").get_int("v");
    return std::vector<ctl::UtilityValue>{
        utility_of("a", table[a][b], config.components.at("a")),
        utility_of("b", 0.0, config.components.at("b"))};
  };
  gov::SearchOptions options;
  options.strategy = gov::SearchStrategy::kExhaustive;
  const gov::SearchOutcome outcome =
      gov::search(space, evaluator, sum_spec(), options);
  CHECK(outcome.best.u_g == doctest::Approx(5.0));
  // Ties break to the canonically first point: (0,1) precedes (1,0).
  CHECK(outcome.best_indices == std::vector<size_t>{0, 1});
  CHECK(outcome.examined == 6);
}

TEST_CASE("exhaustive search refuses spaces past the budget") {
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("a", 8), scripted_controller("b", 8)};
  const gov::JointSpace space = gov::make_joint_space(specs);
  const auto evaluator = [&](const gov::ConfigurationVector& config) {
    return std::vector<ctl::UtilityValue>{
        utility_of("a", 0.0, config.components.at("a")),
        utility_of("b", 0.0, config.components.at("b"))};
  };
  gov::SearchOptions options;
  options.strategy = gov::SearchStrategy::kExhaustive;
  options.budget = 63;
  CHECK_THROWS_AS(gov::search(space, evaluator, sum_spec(), options),
                  BudgetError);
}

TEST_CASE("heuristics stay between the incumbent and the optimum") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int na = 2 + static_cast<int>(rng() % 7);
    const int nb = 2 + static_cast<int>(rng() % 7);
    const int nc = 2 + static_cast<int>(rng() % 5);
    std::map<std::string, double> table;
    const std::vector<ctl::ControllerSpec> specs = {
        scripted_controller("a", na), scripted_controller("b", nb),
        scripted_controller("c", nc)};
    const gov::JointSpace space = gov::make_joint_space(specs);
    const auto evaluator = [&](const gov::ConfigurationVector& config) {
      std::vector<ctl::UtilityValue> out;
      for (const auto& [id, cfg] : config.components) {
        const std::string key = id + ":" + cfg.canonical();
        auto it = table.find(key);
        if (it == table.end()) {
          // Stable pseudo-random cell value derived from the key.
          std::seed_seq seq(key.begin(), key.end());
          std::mt19937 g(seq);
          it = table.emplace(key, std::uniform_real_distribution<>(-5, 5)(g))
                   .first;
        }
        out.push_back(utility_of(id, it->second, cfg));
      }
      return out;
    };

    gov::SearchOptions exhaustive;
    exhaustive.strategy = gov::SearchStrategy::kExhaustive;
    const double optimum =
        gov::search(space, evaluator, sum_spec(), exhaustive).best.u_g;

    const std::vector<size_t> incumbent = {0, 0, 0};
    const double incumbent_value =
        gov::search(space, evaluator, sum_spec(), exhaustive, &incumbent)
            .best.u_g;  // exhaustive ignores the incumbent except as a floor
    CHECK(incumbent_value == doctest::Approx(optimum));

    for (const auto strategy : {gov::SearchStrategy::kCoordinateDescent,
                                gov::SearchStrategy::kHillClimb}) {
      gov::SearchOptions options;
      options.strategy = strategy;
      options.seed = rng();
      const gov::SearchOutcome outcome =
          gov::search(space, evaluator, sum_spec(), options, &incumbent);
      const double start =
          gov::aggregate(evaluator(space.vector_at(incumbent)), sum_spec());
      CHECK(outcome.best.u_g >= start);
      CHECK(outcome.best.u_g <= optimum + 1e-12);
    }
  }
}

TEST_CASE("coordinate descent solves separable objectives exactly") {
  // U_g = f(a) + g(b): each axis pass lands on the global argmax.
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("a", 9), scripted_controller("b", 7)};
  const gov::JointSpace space = gov::make_joint_space(specs);
  const auto evaluator = [&](const gov::ConfigurationVector& config) {
    const double a =
        static_cast<double>(config.components.at("a").get_int("v"));
    const double b =
        static_cast<double>(config.components.at("b").get_int("v"));
    return std::vector<ctl::UtilityValue>{
        utility_of("a", -(a - 5) * (a - 5), config.components.at("a")),
        utility_of("b", -(b - 2) * (b - 2), config.components.at("b"))};
  };
  gov::SearchOptions options;
  options.strategy = gov::SearchStrategy::kCoordinateDescent;
  const gov::SearchOutcome outcome =
      gov::search(space, evaluator, sum_spec(), options);
  CHECK(outcome.best.u_g == doctest::Approx(0.0));
  CHECK(outcome.best_indices == std::vector<size_t>{5, 2});
  CHECK(outcome.passes <= 2);
}

TEST_CASE("memoization keeps distinct evaluations at or under the budget") {
  int calls = 0;
  const std::vector<ctl::ControllerSpec> specs = {
      scripted_controller("a", 6), scripted_controller("b", 6)};
  const gov::JointSpace space = gov::make_joint_space(specs);
  const auto evaluator = [&](const gov::ConfigurationVector& config) {
    ++calls;
    return std::vector<ctl::UtilityValue>{
        utility_of("a", 1.0, config.components.at("a")),
        utility_of("b", 1.0, config.components.at("b"))};
  };
  gov::SearchOptions options;
  options.strategy = gov::SearchStrategy::kHillClimb;
  options.restarts = 12;
  const gov::SearchOutcome outcome =
      gov::search(space, evaluator, sum_spec(), options);
  CHECK(calls == static_cast<int>(outcome.examined));
  CHECK(outcome.examined <= 36);  // restarts revisit, memo absorbs them
}

TEST_CASE("pareto front matches the hand-checked example") {
  const std::vector<std::pair<double, double>> points = {
      {1, 1}, {2, 0}, {0, 2}, {1, 0}};
  std::vector<gov::GovernanceEvaluation> evaluations;
  for (size_t i = 0; i < points.size(); ++i) {
    gov::GovernanceEvaluation evaluation;
    const ctl::Configuration cfg = config_of("v", static_cast<int64_t>(i));
    evaluation.config.components["p"] = cfg;
    evaluation.utilities = {utility_of("a", points[i].first, cfg),
                            utility_of("b", points[i].second, cfg)};
    evaluation.u_g = points[i].first + points[i].second;
    evaluations.push_back(evaluation);
  }
  const std::vector<gov::GovernanceEvaluation> front =
      gov::pareto_front(evaluations, {"a", "b"});
  REQUIRE(front.size() == 3);  // (1,0) dominated by (1,1)
  CHECK(front[0].utilities[0].value == 1);
  CHECK(front[1].utilities[0].value == 2);
  CHECK(front[2].utilities[0].value == 0);

  // Duplicates in objective space keep only the first point.
  evaluations.push_back(evaluations[0]);
  evaluations.back().config.components["p"] = config_of("v", 9);
  const std::vector<gov::GovernanceEvaluation> deduped =
      gov::pareto_front(evaluations, {"a", "b"});
  CHECK(deduped.size() == 3);
  CHECK(deduped[0].config.components.at("p").get_int("v") == 0);

  const std::vector<gov::GovernanceEvaluation> single =
      gov::pareto_front({evaluations[3]}, {"a", "b"});
  CHECK(single.size() == 1);
  CHECK_THROWS_AS(gov::pareto_front({}, {"a"}), ValidationError);
  CHECK_THROWS_AS(gov::pareto_front(evaluations, {}), ValidationError);
}

TEST_CASE("periodic triggers fire at multiples of the period") {
  ScriptedSystem system([](const std::string&, int64_t v, int64_t) {
    return static_cast<double>(v);  // config 2 is always best
  });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 3)};
  gov::TriggerPolicy trigger;
  trigger.period = 4;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 10);
  REQUIRE(outcome.trace.entries.size() == 3);  // ticks 0, 4, 8
  CHECK(outcome.trace.entries[0].tick == 0);
  CHECK(outcome.trace.entries[1].tick == 4);
  CHECK(outcome.trace.entries[2].tick == 8);
  for (const auto& entry : outcome.trace.entries) {
    CHECK(entry.reason == gov::TriggerReason::kPeriodic);
    CHECK(entry.config.components.at("x").get_int("v") == 2);
    CHECK(entry.threshold_met);
  }
  CHECK(outcome.final_config.components.at("x").get_int("v") == 2);
  CHECK(outcome.u_g_series.size() == 10);
  CHECK_FALSE(outcome.any_actuating);
}

TEST_CASE("degenerate policy reduces to a single search") {
  ScriptedSystem system(
      [](const std::string&, int64_t v, int64_t) { return -double(v); });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 4)};
  gov::TriggerPolicy trigger;
  trigger.period = 50;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 50);
  CHECK(outcome.trace.entries.size() == 1);
  CHECK(outcome.final_config.components.at("x").get_int("v") == 0);
}

TEST_CASE("manual ticks trigger between periodic ones") {
  ScriptedSystem system(
      [](const std::string&, int64_t v, int64_t) { return double(v); });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 2)};
  gov::TriggerPolicy trigger;
  trigger.period = 100;
  trigger.manual_ticks = {3, 7};
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 10);
  REQUIRE(outcome.trace.entries.size() == 3);
  CHECK(outcome.trace.entries[1].tick == 3);
  CHECK(outcome.trace.entries[1].reason == gov::TriggerReason::kManual);
  CHECK(outcome.trace.entries[2].tick == 7);
}

TEST_CASE("threshold breach fires one tick after the measured drop") {
  // Config 0 scores 5 until tick 10, then -5; config 1 holds steady at 3.
  ScriptedSystem system([](const std::string&, int64_t v, int64_t tick) {
    if (v == 0) return tick >= 10 ? -5.0 : 5.0;
    return 3.0;
  });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 2)};
  gov::TriggerPolicy trigger;
  trigger.period = 6;  // measurement window 3
  trigger.threshold = 0.0;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 20);

  // Periodic at 0 and 6 pick config 0; measured falls below 0 at the end
  // of tick 9 (clock reads 10), so the breach fires at tick 10.
  REQUIRE(outcome.trace.entries.size() >= 3);
  CHECK(outcome.trace.entries[0].tick == 0);
  CHECK(outcome.trace.entries[0].config.components.at("x").get_int("v") == 0);
  CHECK(outcome.trace.entries[1].tick == 6);
  const gov::GovernanceTraceEntry& breach = outcome.trace.entries[2];
  CHECK(breach.tick == 10);
  CHECK(breach.reason == gov::TriggerReason::kThresholdBreach);
  CHECK(breach.config.components.at("x").get_int("v") == 1);
  CHECK(breach.threshold_met);
  // Recovery: no further breaches, measured series ends at 3.
  for (size_t i = 3; i < outcome.trace.entries.size(); ++i) {
    CHECK(outcome.trace.entries[i].reason == gov::TriggerReason::kPeriodic);
  }
  CHECK(outcome.u_g_series.back() == doctest::Approx(3.0));
}

TEST_CASE("breach triggers rearm only after a full measurement window") {
  // Every config goes bad at tick 5; breaches must then be spaced by at
  // least the window (period 8 gives window 4), not fire every tick.
  ScriptedSystem system([](const std::string&, int64_t v, int64_t tick) {
    return tick >= 5 ? -5.0 - double(v) : 1.0;
  });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 2)};
  gov::TriggerPolicy trigger;
  trigger.period = 8;
  trigger.threshold = 0.0;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 30);
  int64_t last_trigger = -100;
  for (const auto& entry : outcome.trace.entries) {
    if (entry.reason == gov::TriggerReason::kThresholdBreach) {
      CHECK(entry.tick - last_trigger >= 4);
      CHECK_FALSE(entry.threshold_met);
    }
    last_trigger = entry.tick;
  }
  // The loop keeps running on a best-effort configuration.
  CHECK(outcome.u_g_series.size() == 30);
  CHECK(outcome.final_config.components.at("x").get_int("v") == 0);
}

TEST_CASE("breach outranks a coinciding periodic trigger") {
  // The measured drop first shows on the clock reading 10, so the breach
  // fires at tick 10, exactly where the periodic trigger also lands.
  ScriptedSystem system([](const std::string&, int64_t v, int64_t tick) {
    if (v == 0) return tick >= 10 ? -1.0 : 1.0;
    return 0.5;
  });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 2)};
  gov::TriggerPolicy trigger;
  trigger.period = 10;  // breach lands exactly on the periodic tick 10
  trigger.threshold = 0.0;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 12);
  REQUIRE(outcome.trace.entries.size() == 2);
  CHECK(outcome.trace.entries[1].tick == 10);
  CHECK(outcome.trace.entries[1].reason ==
        gov::TriggerReason::kThresholdBreach);
}

TEST_CASE("unmet thresholds are flagged but the best config is adopted") {
  ScriptedSystem system(
      [](const std::string&, int64_t v, int64_t) { return double(v); });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 3)};
  gov::TriggerPolicy trigger;
  trigger.period = 5;
  trigger.threshold = 100.0;  // unreachable
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, specs, sum_spec(), trigger, 10);
  for (const auto& entry : outcome.trace.entries) {
    CHECK_FALSE(entry.threshold_met);
    CHECK(entry.config.components.at("x").get_int("v") == 2);
  }
}

TEST_CASE("initial configuration seeds the incumbent") {
  ScriptedSystem system(
      [](const std::string&, int64_t v, int64_t) { return double(v); });
  std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 4)};
  gov::ConfigurationVector initial;
  initial.components["x"] = config_of("v", 1);
  gov::TriggerPolicy trigger;
  trigger.period = 100;
  const gov::GovernOutcome outcome = gov::govern_loop(
      system, specs, sum_spec(), trigger, 5, {}, &initial);
  // The search still finds the better config 3 and never returns less
  // than the incumbent's utility.
  CHECK(outcome.trace.entries[0].u_g == doctest::Approx(3.0));
}

TEST_CASE("governance trace csv format") {
  gov::GovernanceTrace trace;
  gov::GovernanceTraceEntry entry;
  entry.tick = 4;
  entry.reason = gov::TriggerReason::kManual;
  entry.examined = 12;
  entry.config.components["x"] = config_of("v", 1);
  entry.u_g = 2.5;
  entry.threshold_met = true;
  trace.entries.push_back(entry);
  std::ostringstream out;
  trace.write_csv(out, "m");
  CHECK(out.str() ==
        "# m\n"
        "tick,reason,examined,U_g,config_json\n"
        "4,manual,12,2.5,\"{\"\"x\"\":{\"\"v\"\":1}}\"\n");
}

TEST_CASE("netsim governance actuates admission limits") {
  // One admission controller, overload traffic: the loop must adopt the
  // tight limit and the simulator must start rejecting.
  net::TopologySpec tspec;
  tspec.kind = net::TopologyKind::kRing;
  tspec.nodes = 8;
  gov::NetSimSystem::Setup setup;
  setup.topology = net::build_topology(tspec);
  setup.service_rate = 1;
  setup.traffic.lambda = 0.9;
  setup.seed = 5;

  ctl::ControllerSpec admission;
  admission.id = "admission";
  admission.kind = ctl::ControllerKind::kAdmission;
  admission.admission_penalty = 1.0;
  for (const int64_t limit : {1, 1000}) {
    ctl::Configuration config;
    config.set("limit", limit);
    admission.space.push_back(config);
  }

  gov::NetSimSystem system(setup, {admission});
  gov::TriggerPolicy trigger;
  trigger.period = 40;
  trigger.lookahead = 60;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, {admission}, sum_spec(), trigger, 120);
  CHECK(outcome.any_actuating);
  // Overload with penalty 1: the tight limit wins every search.
  CHECK(outcome.final_config.components.at("admission").get_int("limit") == 1);
  CHECK(system.state().rejected_total > 0);
  CHECK(system.state().tick == 120);
}

TEST_CASE("netsim candidate evaluations are deterministic and side-effect free") {
  net::TopologySpec tspec;
  tspec.kind = net::TopologyKind::kRing;
  tspec.nodes = 8;
  gov::NetSimSystem::Setup setup;
  setup.topology = net::build_topology(tspec);
  setup.traffic.lambda = 0.3;
  setup.seed = 7;

  ctl::ControllerSpec routing;
  routing.id = "routing";
  routing.kind = ctl::ControllerKind::kRouting;
  for (const char* policy : {"static-shortest-path",
                             "queue-aware-shortest-path"}) {
    ctl::Configuration config;
    config.set("policy", std::string(policy));
    routing.space.push_back(config);
  }

  gov::NetSimSystem system(setup, {routing});
  system.advance(50);
  gov::ConfigurationVector candidate;
  candidate.components["routing"] = routing.space[0];
  const auto a = system.evaluate_candidate(candidate, 40);
  const int64_t tick_after = system.now();
  const auto b = system.evaluate_candidate(candidate, 40);
  CHECK(tick_after == 50);
  REQUIRE(a.size() == 1);
  CHECK(a[0].value == doctest::Approx(b[0].value));

  // The live trace is untouched by candidate probes.
  CHECK(system.trace().records.size() == 50);
}

TEST_CASE("load step forces a breach and a different configuration") {
  // Past the step the old permissive limit floods the queues; the loop
  // must notice the measured drop and fall back to the tight limit.
  net::TopologySpec tspec;
  tspec.kind = net::TopologyKind::kRing;
  tspec.nodes = 16;
  gov::NetSimSystem::Setup setup;
  setup.topology = net::build_topology(tspec);
  setup.traffic.lambda = 0.15;
  setup.traffic.load_step = net::LoadStep{250, 4.0};
  setup.seed = 11;

  ctl::ControllerSpec admission;
  admission.id = "admission";
  admission.kind = ctl::ControllerKind::kAdmission;
  admission.admission_penalty = 0.05;
  for (const int64_t limit : {1, 1000}) {
    ctl::Configuration config;
    config.set("limit", limit);
    admission.space.push_back(config);
  }

  gov::NetSimSystem system(setup, {admission});
  gov::TriggerPolicy trigger;
  trigger.period = 100;  // window 50
  trigger.threshold = 1.2;
  // Short enough that the tick-200 search cannot peek past the step and
  // adopt the tight limit preemptively; the breach must do it.
  trigger.lookahead = 40;
  const gov::GovernOutcome outcome =
      gov::govern_loop(system, {admission}, sum_spec(), trigger, 400);

  const gov::GovernanceTraceEntry* pre_step = nullptr;
  const gov::GovernanceTraceEntry* breach = nullptr;
  for (const auto& entry : outcome.trace.entries) {
    if (entry.tick < 250) pre_step = &entry;
    if (!breach && entry.reason == gov::TriggerReason::kThresholdBreach &&
        entry.tick >= 250) {
      breach = &entry;
    }
  }
  REQUIRE(pre_step != nullptr);
  REQUIRE(breach != nullptr);
  // Breach within one measurement window (plus the one-tick firing delay).
  CHECK(breach->tick <= 250 + 50 + 1);
  CHECK(pre_step->config.components.at("admission").get_int("limit") == 1000);
  CHECK(breach->config.components.at("admission").get_int("limit") == 1);
}

TEST_CASE("govern loop validates its inputs") {
  ScriptedSystem system(
      [](const std::string&, int64_t, int64_t) { return 0.0; });
  const std::vector<ctl::ControllerSpec> specs = {scripted_controller("x", 2)};
  gov::TriggerPolicy trigger;
  trigger.period = 0;
  CHECK_THROWS_AS(gov::govern_loop(system, specs, sum_spec(), trigger, 10),
                  ValidationError);
  trigger.period = 5;
  CHECK_THROWS_AS(gov::govern_loop(system, specs, sum_spec(), trigger, 0),
                  ValidationError);
  trigger.manual_ticks = {-2};
  CHECK_THROWS_AS(gov::govern_loop(system, specs, sum_spec(), trigger, 10),
                  ValidationError);
}

}  // TEST_SUITE
