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

#ifndef NETGOV_COMMON_HPP_
#define NETGOV_COMMON_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace netgov {

inline constexpr const char* kToolVersion = "0.1.0";

// Error categories double as process exit codes for the CLI.
enum class ErrorCode : int {
  kValidation = 2,
  kInvariant = 3,
  kConvergence = 4,
  kBudget = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorCode::kValidation, message) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message)
      : Error(ErrorCode::kInvariant, message) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& message)
      : Error(ErrorCode::kBudget, message) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(ErrorCode::kConvergence, message), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Half-open interval of tick indices [begin, end).
struct TickRange {
  int64_t begin = 0;
  int64_t end = 0;
  int64_t length() const { return end - begin; }
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives independent streams (per attempt, per trigger tick, ...) from one
// scenario seed without correlated low bits.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

// mt19937_64 plus hand-rolled draws. The engine is pinned by the standard,
// while std::*_distribution is not, so runs stay reproducible across
// toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, bound), unbiased via rejection.
  uint64_t below(uint64_t bound) {
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % bound;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

 private:
  std::mt19937_64 engine_;
};

// Formats with 6 significant digits, the precision used by all CSV output.
std::string format_g6(double value);

// RFC 4180 quoting; applied to any CSV field that may contain commas or
// quotes (configuration JSON in particular).
std::string csv_quote(const std::string& field);

uint64_t fnv1a64(std::string_view data);

// 16 hex characters of fnv1a64; stable across platforms and releases.
std::string stable_digest(std::string_view data);

// Runs body(0..count-1) on up to `jobs` threads. Iterations must be
// independent; the first exception is rethrown after all workers join.
void parallel_for(int64_t count, int jobs,
                  const std::function<void(int64_t)>& body);

}  // namespace netgov

#endif  // NETGOV_COMMON_HPP_
