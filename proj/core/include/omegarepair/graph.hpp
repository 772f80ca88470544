#pragma once

#include <cstdint>
#include <vector>

namespace omegarepair {

// Plain adjacency-list digraph over vertices 0..n-1.
using Adjacency = std::vector<std::vector<int>>;

struct SccResult {
  std::vector<int> comp;   // vertex -> component id (reverse topological order)
  int count = 0;
  std::vector<bool> nontrivial; // component has at least one internal edge
};

SccResult strongly_connected_components(const Adjacency& adj);

// Vertices reachable from the sources (sources included).
std::vector<bool> reachable_from(const Adjacency& adj, const std::vector<int>& sources);

// Vertices that can reach one of the targets (targets included).
std::vector<bool> can_reach(const Adjacency& adj, const std::vector<bool>& targets);

Adjacency reverse(const Adjacency& adj);

} // namespace omegarepair
