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

#include "netgov/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <utility>

namespace netgov::net {

namespace {

std::vector<std::vector<int>> build_adjacency(int nodes,
                                              const std::vector<Link>& links) {
  std::vector<std::vector<int>> adjacency(nodes);
  std::set<std::pair<int, int>> seen;
  for (const Link& link : links) {
    if (link.a < 0 || link.a >= nodes || link.b < 0 || link.b >= nodes) {
      throw ValidationError("link endpoint out of range");
    }
    if (link.a == link.b) throw ValidationError("self loop not allowed");
    if (link.capacity <= 0) throw ValidationError("link capacity must be > 0");
    const auto key = std::minmax(link.a, link.b);
    if (!seen.insert(key).second) {
      throw ValidationError("duplicate link " + std::to_string(link.a) + "-" +
                            std::to_string(link.b));
    }
    adjacency[link.a].push_back(link.b);
    adjacency[link.b].push_back(link.a);
  }
  for (auto& neighbors : adjacency) std::sort(neighbors.begin(), neighbors.end());
  return adjacency;
}

bool connected(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) return false;
  std::vector<char> visited(n, 0);
  std::deque<int> frontier{0};
  visited[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : adjacency[u]) {
      if (!visited[v]) {
        visited[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return reached == n;
}

Topology finalize(TopologyKind kind, int nodes, std::vector<Link> links) {
  Topology topology;
  topology.kind = kind;
  topology.node_count = nodes;
  topology.links = std::move(links);
  topology.adjacency = build_adjacency(nodes, topology.links);
  if (!connected(topology.adjacency)) {
    throw ValidationError("topology is not connected");
  }
  return topology;
}

Topology make_ring(int nodes, int capacity) {
  if (nodes < 3) throw ValidationError("ring needs at least 3 nodes");
  std::vector<Link> links;
  links.reserve(nodes);
  for (int i = 0; i < nodes; ++i) {
    const int j = (i + 1) % nodes;
    links.push_back({std::min(i, j), std::max(i, j), capacity});
  }
  return finalize(TopologyKind::kRing, nodes, std::move(links));
}

Topology make_lattice(int side, int capacity) {
  if (side < 2) throw ValidationError("lattice side must be at least 2");
  const int nodes = side * side;
  std::vector<Link> links;
  links.reserve(static_cast<size_t>(2) * side * (side - 1));
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int id = r * side + c;
      if (c + 1 < side) links.push_back({id, id + 1, capacity});
      if (r + 1 < side) links.push_back({id, id + side, capacity});
    }
  }
  return finalize(TopologyKind::kLattice, nodes, std::move(links));
}

Topology make_random(int nodes, double edge_prob, uint64_t seed,
                     int capacity) {
  if (nodes < 2) throw ValidationError("random graph needs at least 2 nodes");
  if (edge_prob < 0.0 || edge_prob > 1.0) {
    throw ValidationError("edge probability must lie in [0, 1]");
  }
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(attempt)));
    std::vector<Link> links;
    for (int i = 0; i < nodes; ++i) {
      for (int j = i + 1; j < nodes; ++j) {
        if (rng.bernoulli(edge_prob)) links.push_back({i, j, capacity});
      }
    }
    auto adjacency = build_adjacency(nodes, links);
    if (!connected(adjacency)) continue;
    Topology topology;
    topology.kind = TopologyKind::kRandom;
    topology.node_count = nodes;
    topology.links = std::move(links);
    topology.adjacency = std::move(adjacency);
    return topology;
  }
  throw ValidationError(
      "random topology stayed disconnected after 100 attempts; raise the edge "
      "probability or the node count");
}

}  // namespace

Topology build_topology(const TopologySpec& spec) {
  if (spec.capacity <= 0) throw ValidationError("link capacity must be > 0");
  switch (spec.kind) {
    case TopologyKind::kRing:
      return make_ring(spec.nodes, spec.capacity);
    case TopologyKind::kLattice:
      return make_lattice(spec.side, spec.capacity);
    case TopologyKind::kRandom:
      return make_random(spec.nodes, spec.edge_prob, spec.seed, spec.capacity);
  }
  throw ValidationError("unknown topology kind");
}

double RoutingTable::mean_path_length() const {
  double sum = 0.0;
  int64_t pairs = 0;
  for (int u = 0; u < nodes_; ++u) {
    for (int d = 0; d < nodes_; ++d) {
      if (u == d) continue;
      sum += distance(u, d);
      ++pairs;
    }
  }
  return pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
}

RoutingTable shortest_paths(const Topology& topology) {
  const int n = topology.node_count;
  std::vector<int> next_hop(static_cast<size_t>(n) * n, -1);
  std::vector<int> distance(static_cast<size_t>(n) * n, -1);
  std::vector<int> dist(n);
  for (int d = 0; d < n; ++d) {
    // BFS from the destination; hop metric, so level order is exact.
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<int> frontier{d};
    dist[d] = 0;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop_front();
      for (int v : topology.adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          frontier.push_back(v);
        }
      }
    }
    for (int u = 0; u < n; ++u) {
      const size_t slot = static_cast<size_t>(u) * n + d;
      distance[slot] = dist[u];
      if (u == d) {
        next_hop[slot] = u;
        continue;
      }
      if (dist[u] < 0) throw InvariantError("unreachable node in routing table");
      for (int v : topology.adjacency[u]) {  // ascending, so ties pick low id
        if (dist[v] == dist[u] - 1) {
          next_hop[slot] = v;
          break;
        }
      }
    }
  }
  return RoutingTable(n, std::move(next_hop), std::move(distance));
}

}  // namespace netgov::net
