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

#ifndef NETGOV_SIMULATION_HPP_
#define NETGOV_SIMULATION_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "netgov/common.hpp"
#include "netgov/topology.hpp"

namespace netgov::net {

// Discrete-time store-and-forward network. Each tick runs four phases in a
// fixed order: (1) every node injects a packet with probability lambda,
// (2) every node, in ascending id order, serves up to service_rate packets
// from its FIFO queue and forwards them one hop (arrivals are buffered and
// appended after all nodes served, so a packet moves at most one hop per
// tick), (3) packets forwarded onto their destination are delivered and
// vanish, (4) packets whose hop count exceeds the ttl are dropped. Given the
// same topology, traffic, routing and seed the whole run is bit-identical.

struct Packet {
  int64_t id = 0;
  int source = 0;
  int destination = 0;
  int64_t created_at = 0;
  int hops = 0;
};

enum class DestinationPolicy { kUniformRandom, kFixedPairs };

// Multiplies lambda by `factor` from `at_tick` onward.
struct LoadStep {
  int64_t at_tick = 0;
  double factor = 1.0;
};

struct TrafficSpec {
  double lambda = 0.0;  // per-node (or per-pair) injection probability
  DestinationPolicy destination_policy = DestinationPolicy::kUniformRandom;
  std::vector<std::pair<int, int>> pairs;  // fixed (source, destination)
  std::optional<int> ttl;                  // max hops; disabled by default
  // A node only admits a new packet while its queue is shorter than this.
  // Refused packets are counted as rejected and never enter the network.
  std::optional<int> admission_queue_limit;
  std::optional<LoadStep> load_step;

  double lambda_at(int64_t tick) const {
    double value = lambda;
    if (load_step && tick >= load_step->at_tick) value *= load_step->factor;
    return value;
  }
  void validate(const Topology& topology) const;
};

enum class RoutingKind {
  kStaticShortestPath,
  kQueueAwareShortestPath,
  kLocalGreedy,
};

struct RoutingPolicy {
  RoutingKind kind = RoutingKind::kStaticShortestPath;
  // Queue-aware cost of forwarding to neighbor v is
  //   1 + dist(v, destination) + queue_weight * queue_len(v),
  // evaluated against live queue lengths at decision time.
  double queue_weight = 0.5;
};

struct NetworkState;

// Routing policy bound to a topology; static tables are computed once here.
class Router {
 public:
  Router(const Topology& topology, RoutingPolicy policy);

  int next_hop(int node, int destination, const NetworkState& state) const;
  const RoutingPolicy& policy() const { return policy_; }
  const RoutingTable& table() const { return table_; }

 private:
  RoutingPolicy policy_;
  RoutingTable table_;
  std::vector<std::vector<int>> adjacency_;
};

struct NetworkState {
  Topology topology;
  std::vector<std::deque<Packet>> queues;  // one FIFO per node
  int64_t tick = 0;                        // completed ticks
  int64_t created_total = 0;
  int64_t delivered_total = 0;
  int64_t dropped_total = 0;
  int64_t rejected_total = 0;  // refused by admission, never created
  int service_rate = 1;        // packets served per node per tick
  uint64_t rng_seed = 0;
  Rng rng{0};
  int64_t next_packet_id = 0;

  static NetworkState make(Topology topology, int service_rate, uint64_t seed);

  int64_t queue_total() const;
  int64_t in_flight() const {
    return created_total - delivered_total - dropped_total;
  }
};

// created = delivered + dropped + sum of queue lengths, exactly.
void verify_conservation(const NetworkState& state);

struct StepStats {
  int64_t created = 0;
  int64_t delivered = 0;
  int64_t dropped = 0;
  int64_t rejected = 0;
  double delay_sum = 0.0;  // over packets delivered this tick
};

StepStats step(NetworkState& state, const TrafficSpec& traffic,
               const Router& router);

// Counter fields are cumulative; delivered_now / delay_sum_now cover only
// this tick. Delivery delay counts ticks inclusively, so a one-hop packet
// delivered in its creation tick has delay 1.
struct TraceRecord {
  int64_t tick = 0;
  int64_t created = 0;
  int64_t delivered = 0;
  int64_t dropped = 0;
  int64_t in_flight = 0;
  int64_t queue_total = 0;
  int64_t delivered_now = 0;
  double delay_sum_now = 0.0;

  double mean_delay() const {
    return delivered_now > 0 ? delay_sum_now / delivered_now : 0.0;
  }
};

struct SimulationTrace {
  std::vector<TraceRecord> records;
  int64_t service_capacity = 0;  // node count * service rate

  // Optional '#'-prefixed metadata line, then the fixed header
  // tick,created,delivered,dropped,in_flight,queue_total,mean_delay
  void write_csv(std::ostream& os, const std::string& meta = "") const;
};

// Advances `ticks` ticks, appending one record per tick and checking packet
// conservation after each.
void run_into(NetworkState& state, const TrafficSpec& traffic,
              const Router& router, int64_t ticks, SimulationTrace& trace);

SimulationTrace run(NetworkState& state, const TrafficSpec& traffic,
                    const Router& router, int64_t ticks);

// Fraction of created packets that stay in flight:
//   (mean per-tick in-flight increase) / (mean per-tick creation),
// clipped to [0, 1]. 0 means free flow, 1 means congestion collapse.
// Requires a window of at least 100 ticks with at least one packet created.
double order_parameter(const SimulationTrace& trace, TickRange window);

}  // namespace netgov::net

#endif  // NETGOV_SIMULATION_HPP_
