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

#include "netgov/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace netgov::net {

void TrafficSpec::validate(const Topology& topology) const {
  if (lambda < 0.0 || lambda > 1.0) {
    throw ValidationError("lambda must lie in [0, 1]");
  }
  if (load_step) {
    if (load_step->factor < 0.0) {
      throw ValidationError("load step factor must be >= 0");
    }
    const double stepped = lambda * load_step->factor;
    if (stepped > 1.0) {
      throw ValidationError("lambda after load step exceeds 1");
    }
  }
  if (ttl && *ttl < 1) throw ValidationError("ttl must be >= 1");
  if (admission_queue_limit && *admission_queue_limit < 0) {
    throw ValidationError("admission queue limit must be >= 0");
  }
  if (destination_policy == DestinationPolicy::kFixedPairs) {
    if (pairs.empty()) {
      throw ValidationError("fixed-pairs traffic needs at least one pair");
    }
    for (const auto& [src, dst] : pairs) {
      if (src < 0 || src >= topology.node_count || dst < 0 ||
          dst >= topology.node_count) {
        throw ValidationError("traffic pair endpoint out of range");
      }
      if (src == dst) throw ValidationError("traffic pair with equal endpoints");
    }
  } else if (!pairs.empty()) {
    throw ValidationError("pairs given but destination policy is uniform");
  }
  if (destination_policy == DestinationPolicy::kUniformRandom &&
      topology.node_count < 2) {
    throw ValidationError("uniform traffic needs at least 2 nodes");
  }
}

Router::Router(const Topology& topology, RoutingPolicy policy)
    : policy_(policy),
      table_(shortest_paths(topology)),
      adjacency_(topology.adjacency) {
  if (policy_.queue_weight < 0.0) {
    throw ValidationError("queue weight must be >= 0");
  }
}

int Router::next_hop(int node, int destination,
                     const NetworkState& state) const {
  switch (policy_.kind) {
    case RoutingKind::kStaticShortestPath:
      return table_.next(node, destination);
    case RoutingKind::kQueueAwareShortestPath: {
      int best = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int v : adjacency_[node]) {  // ascending ids, ties keep first
        double cost = 1.0 + table_.distance(v, destination);
        if (v != destination) {
          cost += policy_.queue_weight *
                  static_cast<double>(state.queues[v].size());
        }
        if (cost < best_cost) {
          best_cost = cost;
          best = v;
        }
      }
      return best;
    }
    case RoutingKind::kLocalGreedy: {
      // Deliver when adjacent; otherwise pick the least-loaded neighbor.
      // Uses local information only, so paths need not make progress.
      int best = -1;
      size_t best_len = std::numeric_limits<size_t>::max();
      for (int v : adjacency_[node]) {
        if (v == destination) return v;
        if (state.queues[v].size() < best_len) {
          best_len = state.queues[v].size();
          best = v;
        }
      }
      return best;
    }
  }
  throw InvariantError("unknown routing kind");
}

NetworkState NetworkState::make(Topology topology, int service_rate,
                                uint64_t seed) {
  if (service_rate < 1) throw ValidationError("service rate must be >= 1");
  NetworkState state;
  state.topology = std::move(topology);
  state.queues.resize(state.topology.node_count);
  state.service_rate = service_rate;
  state.rng_seed = seed;
  state.rng = Rng(seed);
  return state;
}

int64_t NetworkState::queue_total() const {
  int64_t total = 0;
  for (const auto& queue : queues) total += static_cast<int64_t>(queue.size());
  return total;
}

void verify_conservation(const NetworkState& state) {
  if (state.in_flight() != state.queue_total() || state.in_flight() < 0) {
    throw InvariantError(
        "packet conservation violated at tick " + std::to_string(state.tick) +
        ": created " + std::to_string(state.created_total) + " != delivered " +
        std::to_string(state.delivered_total) + " + dropped " +
        std::to_string(state.dropped_total) + " + queued " +
        std::to_string(state.queue_total()));
  }
}

StepStats step(NetworkState& state, const TrafficSpec& traffic,
               const Router& router) {
  const int n = state.topology.node_count;
  const int64_t now = state.tick;
  StepStats stats;

  auto inject = [&](int source, int destination) {
    if (traffic.admission_queue_limit &&
        static_cast<int64_t>(state.queues[source].size()) >=
            *traffic.admission_queue_limit) {
      ++state.rejected_total;
      ++stats.rejected;
      return;
    }
    state.queues[source].push_back(
        Packet{state.next_packet_id++, source, destination, now, 0});
    ++state.created_total;
    ++stats.created;
  };

  const double lambda = traffic.lambda_at(now);
  if (lambda > 0.0) {
    if (traffic.destination_policy == DestinationPolicy::kUniformRandom) {
      for (int u = 0; u < n; ++u) {
        if (!state.rng.bernoulli(lambda)) continue;
        int destination =
            static_cast<int>(state.rng.below(static_cast<uint64_t>(n - 1)));
        if (destination >= u) ++destination;
        inject(u, destination);
      }
    } else {
      for (const auto& [src, dst] : traffic.pairs) {
        if (state.rng.bernoulli(lambda)) inject(src, dst);
      }
    }
  }

  // Serve from a buffered arrival set so no packet moves twice per tick.
  std::vector<std::vector<Packet>> arrivals(n);
  for (int u = 0; u < n; ++u) {
    auto& queue = state.queues[u];
    for (int served = 0; served < state.service_rate && !queue.empty();
         ++served) {
      Packet packet = queue.front();
      queue.pop_front();
      const int hop = router.next_hop(u, packet.destination, state);
      packet.hops += 1;
      if (hop == packet.destination) {
        ++state.delivered_total;
        ++stats.delivered;
        stats.delay_sum += static_cast<double>(now - packet.created_at + 1);
      } else if (traffic.ttl && packet.hops > *traffic.ttl) {
        ++state.dropped_total;
        ++stats.dropped;
      } else {
        arrivals[hop].push_back(packet);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    for (Packet& packet : arrivals[v]) {
      state.queues[v].push_back(packet);
    }
  }
  ++state.tick;
  return stats;
}

void run_into(NetworkState& state, const TrafficSpec& traffic,
              const Router& router, int64_t ticks, SimulationTrace& trace) {
  if (ticks < 1) throw ValidationError("run needs at least 1 tick");
  traffic.validate(state.topology);
  trace.service_capacity =
      static_cast<int64_t>(state.topology.node_count) * state.service_rate;
  trace.records.reserve(trace.records.size() + static_cast<size_t>(ticks));
  for (int64_t i = 0; i < ticks; ++i) {
    const StepStats stats = step(state, traffic, router);
    verify_conservation(state);
    trace.records.push_back(TraceRecord{
        state.tick - 1, state.created_total, state.delivered_total,
        state.dropped_total, state.in_flight(), state.queue_total(),
        stats.delivered, stats.delay_sum});
  }
}

SimulationTrace run(NetworkState& state, const TrafficSpec& traffic,
                    const Router& router, int64_t ticks) {
  SimulationTrace trace;
  run_into(state, traffic, router, ticks, trace);
  return trace;
}

void SimulationTrace::write_csv(std::ostream& os,
                                const std::string& meta) const {
  if (!meta.empty()) os << "# " << meta << "\n";
  os << "tick,created,delivered,dropped,in_flight,queue_total,mean_delay\n";
  for (const TraceRecord& r : records) {
    os << r.tick << ',' << r.created << ',' << r.delivered << ',' << r.dropped
       << ',' << r.in_flight << ',' << r.queue_total << ','
       << format_g6(r.mean_delay()) << '\n';
  }
}

double order_parameter(const SimulationTrace& trace, TickRange window) {
  const int64_t size = static_cast<int64_t>(trace.records.size());
  if (window.begin < 0 || window.end > size || window.begin >= window.end) {
    throw ValidationError("order parameter window out of range");
  }
  if (window.length() < 100) {
    throw ValidationError("order parameter window must span >= 100 ticks");
  }
  const TraceRecord& first = trace.records[window.begin];
  const TraceRecord& last = trace.records[window.end - 1];
  const double span = static_cast<double>(window.end - 1 - window.begin);
  const double created = static_cast<double>(last.created - first.created);
  if (created <= 0.0) {
    throw ValidationError(
        "order parameter undefined: no packets created in window");
  }
  const double growth = static_cast<double>(last.in_flight - first.in_flight);
  return std::clamp((growth / span) / (created / span), 0.0, 1.0);
}

}  // namespace netgov::net
