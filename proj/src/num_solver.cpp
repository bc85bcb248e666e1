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

#include "netgov/num_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace netgov::num {

namespace {
// Route prices below this are treated as zero; the best response is then
// unbounded and the iterate is held at the rate cap instead.
constexpr double kTinyPrice = 1e-12;
}  // namespace

void UtilitySpec::validate() const {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw ValidationError("utility weight must be > 0 and finite");
  }
  if (family == UtilityFamily::kAlphaFair) {
    // alpha == 0 would make the utility linear and the marginal
    // non-invertible, so only strictly positive alpha is admissible.
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw ValidationError("alpha must be > 0 and finite");
    }
  }
}

double utility_value(const UtilitySpec& spec, double rate) {
  spec.validate();
  if (!(rate > 0.0)) throw ValidationError("utility undefined for rate <= 0");
  if (spec.is_log()) return spec.weight * std::log(rate);
  return spec.weight * std::pow(rate, 1.0 - spec.alpha) / (1.0 - spec.alpha);
}

double marginal_utility(const UtilitySpec& spec, double rate) {
  spec.validate();
  if (!(rate > 0.0)) throw ValidationError("marginal undefined for rate <= 0");
  if (spec.is_log()) return spec.weight / rate;
  return spec.weight * std::pow(rate, -spec.alpha);
}

double inverse_marginal(const UtilitySpec& spec, double price) {
  spec.validate();
  if (!(price > 0.0)) {
    throw ValidationError("inverse marginal undefined for price <= 0");
  }
  if (spec.is_log()) return spec.weight / price;
  return std::pow(spec.weight / price, 1.0 / spec.alpha);
}

void RateProblem::validate() const {
  if (routes.empty()) throw ValidationError("problem needs at least 1 source");
  if (capacities.empty()) throw ValidationError("problem needs at least 1 link");
  if (utilities.size() != routes.size()) {
    throw ValidationError("one utility per source required");
  }
  for (double c : capacities) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ValidationError("capacities must be > 0 and finite");
    }
  }
  const int link_count = static_cast<int>(capacities.size());
  for (size_t s = 0; s < routes.size(); ++s) {
    if (routes[s].empty()) {
      throw ValidationError("source " + std::to_string(s) +
                            " crosses no link");
    }
    std::set<int> seen;
    for (int l : routes[s]) {
      if (l < 0 || l >= link_count) {
        throw ValidationError("route link id out of range");
      }
      if (!seen.insert(l).second) {
        throw ValidationError("route lists link " + std::to_string(l) +
                              " twice");
      }
    }
  }
  for (const UtilitySpec& u : utilities) u.validate();
}

RateSolution solve_num(const RateProblem& problem, const SolveOptions& options,
                       const std::vector<double>* warm_prices) {
  problem.validate();
  if (!(options.tolerance > 0.0)) {
    throw ValidationError("tolerance must be > 0");
  }
  if (options.max_iterations < 1) {
    throw ValidationError("max iterations must be >= 1");
  }
  const size_t S = problem.sources();
  const size_t L = problem.links();

  double gamma = options.gamma;
  if (gamma <= 0.0) {
    const double min_c =
        *std::min_element(problem.capacities.begin(), problem.capacities.end());
    double max_w = 0.0;
    for (const UtilitySpec& u : problem.utilities) max_w = std::max(max_w, u.weight);
    gamma = 0.01 * min_c / max_w;
  }

  std::vector<double> prices(L, options.initial_price);
  if (warm_prices) {
    if (warm_prices->size() != L) {
      throw ValidationError("warm price vector has wrong length");
    }
    for (size_t l = 0; l < L; ++l) prices[l] = std::max(0.0, (*warm_prices)[l]);
  }

  // Guards the price ~ 0 regime. Strictly above the total capacity, so a
  // capped source always overloads its links and the residual keeps the
  // prices moving; capping at the capacity itself would freeze the price
  // below its equilibrium with every stopping check satisfied.
  double rate_cap = 1.0;
  for (double c : problem.capacities) rate_cap += c;

  std::vector<double> rates(S, 0.0);
  std::vector<double> previous(S, 0.0);
  std::vector<double> load(L, 0.0);
  double residual = std::numeric_limits<double>::infinity();

  for (int64_t iteration = 1; iteration <= options.max_iterations;
       ++iteration) {
    for (size_t s = 0; s < S; ++s) {
      double route_price = 0.0;
      for (int l : problem.routes[s]) route_price += prices[l];
      rates[s] = route_price <= kTinyPrice
                     ? rate_cap
                     : std::min(inverse_marginal(problem.utilities[s],
                                                 route_price),
                                rate_cap);
    }

    std::fill(load.begin(), load.end(), 0.0);
    for (size_t s = 0; s < S; ++s) {
      for (int l : problem.routes[s]) load[l] += rates[s];
    }

    residual = 0.0;
    bool complementary = true;
    for (size_t l = 0; l < L; ++l) {
      residual = std::max(residual, load[l] - problem.capacities[l]);
      if (prices[l] * (problem.capacities[l] - load[l]) >
          options.tolerance * problem.capacities[l]) {
        complementary = false;
      }
    }
    residual = std::max(residual, 0.0);

    double change = 0.0;
    for (size_t s = 0; s < S; ++s) {
      change = std::max(change, std::fabs(rates[s] - previous[s]));
    }

    if (iteration > 1 && change < options.tolerance &&
        residual < options.tolerance && complementary) {
      return RateSolution{rates, prices, iteration, residual};
    }
    previous = rates;

    for (size_t l = 0; l < L; ++l) {
      prices[l] =
          std::max(0.0, prices[l] + gamma * (load[l] - problem.capacities[l]));
    }
  }
  throw ConvergenceError(
      "rate allocation did not converge within " +
          std::to_string(options.max_iterations) +
          " iterations (residual " + format_g6(residual) + ")",
      residual);
}

double objective(const RateProblem& problem, const std::vector<double>& rates) {
  if (rates.size() != problem.sources()) {
    throw ValidationError("rate vector has wrong length");
  }
  double total = 0.0;
  for (size_t s = 0; s < rates.size(); ++s) {
    total += utility_value(problem.utilities[s], rates[s]);
  }
  return total;
}

KktReport verify_kkt(const RateProblem& problem, const RateSolution& solution,
                     double tolerance) {
  problem.validate();
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (solution.rates.size() != problem.sources() ||
      solution.prices.size() != problem.links()) {
    throw ValidationError("solution shape does not match problem");
  }
  KktReport report;
  const size_t S = problem.sources();
  const size_t L = problem.links();

  std::vector<double> load(L, 0.0);
  for (size_t s = 0; s < S; ++s) {
    for (int l : problem.routes[s]) load[l] += solution.rates[s];
  }

  report.feasible = true;
  for (size_t l = 0; l < L; ++l) {
    const double violation = load[l] - problem.capacities[l];
    report.max_capacity_violation =
        std::max(report.max_capacity_violation, violation);
    if (violation > tolerance) {
      report.feasible = false;
      report.violations.push_back("link " + std::to_string(l) +
                                  " over capacity by " + format_g6(violation));
    }
  }

  report.dual_feasible = true;
  for (size_t l = 0; l < L; ++l) {
    if (solution.prices[l] < 0.0) {
      report.dual_feasible = false;
      report.violations.push_back("negative price on link " +
                                  std::to_string(l));
    }
  }

  report.stationary = true;
  for (size_t s = 0; s < S; ++s) {
    double route_price = 0.0;
    for (int l : problem.routes[s]) route_price += solution.prices[l];
    const double marginal = marginal_utility(problem.utilities[s],
                                             solution.rates[s]);
    const double scale = route_price > 0.0 ? route_price : 1.0;
    const double relative = std::fabs(marginal - route_price) / scale;
    report.worst_stationarity = std::max(report.worst_stationarity, relative);
    if (relative > tolerance) {
      report.stationary = false;
      report.violations.push_back(
          "source " + std::to_string(s) + " marginal " + format_g6(marginal) +
          " != route price " + format_g6(route_price));
    }
  }

  report.complementary = true;
  for (size_t l = 0; l < L; ++l) {
    const double slack = solution.prices[l] * (problem.capacities[l] - load[l]);
    const double relative = slack / problem.capacities[l];
    report.worst_slackness = std::max(report.worst_slackness, relative);
    if (relative > tolerance) {
      report.complementary = false;
      report.violations.push_back("link " + std::to_string(l) +
                                  " priced but slack by " + format_g6(slack));
    }
  }
  return report;
}

RateProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("problem must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "routes" && key != "capacities" && key != "utilities") {
      throw ValidationError("unknown problem field \"" + key + "\"");
    }
  }
  if (!j.contains("routes") || !j.contains("capacities") ||
      !j.contains("utilities")) {
    throw ValidationError("problem needs routes, capacities and utilities");
  }
  RateProblem problem;
  for (const auto& route : j.at("routes")) {
    problem.routes.push_back(route.get<std::vector<int>>());
  }
  problem.capacities = j.at("capacities").get<std::vector<double>>();
  for (const auto& u : j.at("utilities")) {
    for (const auto& [key, value] : u.items()) {
      (void)value;
      if (key != "family" && key != "weight" && key != "alpha") {
        throw ValidationError("unknown utility field \"" + key + "\"");
      }
    }
    const std::string family = u.at("family").get<std::string>();
    const double weight = u.value("weight", 1.0);
    if (family == "log") {
      problem.utilities.push_back(UtilitySpec::log_weighted(weight));
    } else if (family == "alpha-fair") {
      if (!u.contains("alpha")) {
        throw ValidationError("alpha-fair utility needs alpha");
      }
      problem.utilities.push_back(
          UtilitySpec::alpha_fair(weight, u.at("alpha").get<double>()));
    } else {
      throw ValidationError("unknown utility family \"" + family + "\"");
    }
  }
  problem.validate();
  return problem;
}

nlohmann::json problem_to_json(const RateProblem& problem) {
  nlohmann::json j;
  j["routes"] = problem.routes;
  j["capacities"] = problem.capacities;
  nlohmann::json utilities = nlohmann::json::array();
  for (const UtilitySpec& u : problem.utilities) {
    nlohmann::json entry;
    entry["weight"] = u.weight;
    if (u.is_log()) {
      entry["family"] = "log";
    } else {
      entry["family"] = "alpha-fair";
      entry["alpha"] = u.alpha;
    }
    utilities.push_back(entry);
  }
  j["utilities"] = utilities;
  return j;
}

nlohmann::json solution_to_json(const RateProblem& problem,
                                const RateSolution& solution,
                                const KktReport* kkt) {
  nlohmann::json j;
  j["rates"] = solution.rates;
  j["prices"] = solution.prices;
  j["iterations"] = solution.iterations;
  j["residual"] = solution.residual;
  j["objective"] = objective(problem, solution.rates);
  if (kkt) {
    nlohmann::json k;
    k["pass"] = kkt->pass();
    k["feasible"] = kkt->feasible;
    k["dual_feasible"] = kkt->dual_feasible;
    k["stationary"] = kkt->stationary;
    k["complementary"] = kkt->complementary;
    k["max_capacity_violation"] = kkt->max_capacity_violation;
    k["worst_stationarity"] = kkt->worst_stationarity;
    k["worst_slackness"] = kkt->worst_slackness;
    k["violations"] = kkt->violations;
    j["kkt"] = k;
  }
  return j;
}

}  // namespace netgov::num
