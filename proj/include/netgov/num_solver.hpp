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

#ifndef NETGOV_NUM_SOLVER_HPP_
#define NETGOV_NUM_SOLVER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "netgov/common.hpp"

namespace netgov::num {

// Rate allocation by dual projected gradient. Sources s hold strictly
// concave utilities U_s; links l hold capacities c_l. Prices iterate
//   p_l <- max(0, p_l + gamma * (load_l - c_l))
// and each source best-responds through the inverse marginal utility
//   x_s = (U_s')^{-1}(sum of prices along its route).
// At the fixed point the KKT conditions of
//   maximize sum U_s(x_s)  subject to  R x <= c, x > 0
// hold; verify_kkt checks them explicitly.

enum class UtilityFamily { kLogWeighted, kAlphaFair };

struct UtilitySpec {
  UtilityFamily family = UtilityFamily::kLogWeighted;
  double weight = 1.0;  // > 0
  // alpha-fair only: U(x) = weight * x^(1-alpha) / (1-alpha), alpha > 0.
  // alpha == 1 is the log family and is normalized to it before solving.
  double alpha = 2.0;

  static UtilitySpec log_weighted(double weight) {
    return {UtilityFamily::kLogWeighted, weight, 1.0};
  }
  static UtilitySpec alpha_fair(double weight, double alpha) {
    return {UtilityFamily::kAlphaFair, weight, alpha};
  }
  bool is_log() const {
    return family == UtilityFamily::kLogWeighted || alpha == 1.0;
  }
  void validate() const;
};

double utility_value(const UtilitySpec& spec, double rate);
double marginal_utility(const UtilitySpec& spec, double rate);
// x with U'(x) = price; the marginal is strictly decreasing so this is the
// exact best response. Requires price > 0.
double inverse_marginal(const UtilitySpec& spec, double price);

struct RateProblem {
  // routes[s] lists the link ids crossed by source s (binary routing matrix).
  std::vector<std::vector<int>> routes;
  std::vector<double> capacities;   // per link, > 0
  std::vector<UtilitySpec> utilities;  // one per source

  size_t sources() const { return routes.size(); }
  size_t links() const { return capacities.size(); }
  void validate() const;
};

struct SolveOptions {
  double gamma = 0.0;  // step size; <= 0 selects 0.01 * min(c) / max(w)
  double tolerance = 1e-6;
  int64_t max_iterations = 200000;
  double initial_price = 0.01;
};

struct RateSolution {
  std::vector<double> rates;
  std::vector<double> prices;
  int64_t iterations = 0;
  double residual = 0.0;  // max positive capacity violation at return
};

// Converged when, between consecutive iterations, the max rate change and
// the capacity residual are below tolerance and every link satisfies
// complementary slackness p_l * (c_l - load_l) <= tolerance * c_l. Throws
// ConvergenceError (with the last residual) past max_iterations. Optional
// warm prices seed the iteration instead of initial_price.
RateSolution solve_num(const RateProblem& problem,
                       const SolveOptions& options = {},
                       const std::vector<double>* warm_prices = nullptr);

double objective(const RateProblem& problem, const std::vector<double>& rates);

struct KktReport {
  bool feasible = false;        // R x <= c + tol
  bool dual_feasible = false;   // p >= 0
  bool stationary = false;      // |U'(x_s) - route price| <= tol * route price
  bool complementary = false;   // p_l (c_l - load_l) <= tol * c_l
  double max_capacity_violation = 0.0;
  double worst_stationarity = 0.0;  // relative
  double worst_slackness = 0.0;     // relative to c_l
  std::vector<std::string> violations;

  bool pass() const {
    return feasible && dual_feasible && stationary && complementary;
  }
};

KktReport verify_kkt(const RateProblem& problem, const RateSolution& solution,
                     double tolerance);

// JSON shapes:
//   problem: {"routes": [[0,1],...], "capacities": [...],
//             "utilities": [{"family":"log","weight":1.0}, ...]}
//   solution: {"rates": [...], "prices": [...], "iterations": n,
//              "residual": r, "objective": v, "kkt": {...}}
RateProblem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const RateProblem& problem);
nlohmann::json solution_to_json(const RateProblem& problem,
                                const RateSolution& solution,
                                const KktReport* kkt);

}  // namespace netgov::num

#endif  // NETGOV_NUM_SOLVER_HPP_
