#include "omegarepair/graph.hpp"

#include <algorithm>
#include <deque>

namespace omegarepair {

// Iterative Tarjan; components are numbered in the order they complete.
SccResult strongly_connected_components(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult r;
  r.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on(n, false);
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
      }
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (index[w] < 0) {
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = false;
          r.comp[w] = r.count;
        } while (w != v);
        ++r.count;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  r.nontrivial.assign(r.count, false);
  for (int v = 0; v < n; ++v)
    for (int w : adj[v])
      if (r.comp[v] == r.comp[w]) r.nontrivial[r.comp[v]] = true;
  return r;
}

std::vector<bool> reachable_from(const Adjacency& adj, const std::vector<int>& sources) {
  std::vector<bool> seen(adj.size(), false);
  std::deque<int> q;
  for (int s : sources)
    if (!seen[s]) {
      seen[s] = true;
      q.push_back(s);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        q.push_back(w);
      }
  }
  return seen;
}

Adjacency reverse(const Adjacency& adj) {
  Adjacency r(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (int w : adj[v]) r[w].push_back(static_cast<int>(v));
  return r;
}

std::vector<bool> can_reach(const Adjacency& adj, const std::vector<bool>& targets) {
  std::vector<int> src;
  for (std::size_t v = 0; v < targets.size(); ++v)
    if (targets[v]) src.push_back(static_cast<int>(v));
  return reachable_from(reverse(adj), src);
}

} // namespace omegarepair
