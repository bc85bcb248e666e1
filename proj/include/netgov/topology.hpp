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

#ifndef NETGOV_TOPOLOGY_HPP_
#define NETGOV_TOPOLOGY_HPP_

#include <cstdint>
#include <vector>

#include "netgov/common.hpp"

namespace netgov::net {

enum class TopologyKind { kRing, kLattice, kRandom };

// Undirected link, stored with a < b. Capacity is in packets per tick.
struct Link {
  int a = 0;
  int b = 0;
  int capacity = 1;
};

struct TopologySpec {
  TopologyKind kind = TopologyKind::kRing;
  int nodes = 0;        // ring and random
  int side = 0;         // lattice (nodes = side * side, no wraparound)
  double edge_prob = 0.0;  // random
  uint64_t seed = 0;       // random; same seed yields the same edge set
  int capacity = 1;        // uniform link capacity
};

// Always connected, no self loops, no duplicate links.
struct Topology {
  TopologyKind kind = TopologyKind::kRing;
  int node_count = 0;
  std::vector<Link> links;
  std::vector<std::vector<int>> adjacency;  // neighbor ids, sorted ascending
};

// Throws ValidationError on bad parameters or when a random graph stays
// disconnected after the retry budget (100 reseeded attempts).
Topology build_topology(const TopologySpec& spec);

// Minimum-hop next hops and distances for every (node, destination) pair.
// Equal-cost candidates resolve to the lowest neighbor id.
class RoutingTable {
 public:
  RoutingTable() = default;
  RoutingTable(int nodes, std::vector<int> next_hop, std::vector<int> distance)
      : nodes_(nodes),
        next_hop_(std::move(next_hop)),
        distance_(std::move(distance)) {}

  int next(int node, int destination) const {
    return next_hop_[static_cast<size_t>(node) * nodes_ + destination];
  }
  int distance(int node, int destination) const {
    return distance_[static_cast<size_t>(node) * nodes_ + destination];
  }
  int nodes() const { return nodes_; }

  // Average hop count over ordered pairs with distinct endpoints.
  double mean_path_length() const;

 private:
  int nodes_ = 0;
  std::vector<int> next_hop_;
  std::vector<int> distance_;
};

RoutingTable shortest_paths(const Topology& topology);

}  // namespace netgov::net

#endif  // NETGOV_TOPOLOGY_HPP_
