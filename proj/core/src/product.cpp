#include "omegarepair/product.hpp"
#include "omegarepair/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace omegarepair {

// --- extended moves ------------------------------------------------------

std::vector<ExtendedMove> extended_moves(const NBA& b, int from, const std::vector<int>& word) {
  if (from < 0 || from >= static_cast<int>(b.states.size()))
    throw Error(ErrorCode::INVALID_MODEL, "extended_moves: bad source state");
  for (int s : word)
    if (s < 0 || s >= static_cast<int>(b.alphabet.size()))
      throw Error(ErrorCode::ALPHABET_MISMATCH, "extended_moves: symbol outside the alphabet");
  if (word.empty()) return {ExtendedMove{from, {}, from, false, {}}};

  auto d = b.delta();
  std::vector<ExtendedMove> out;
  std::set<std::pair<int, bool>> seen;
  std::vector<int> path;
  // DFS in increasing state order so the first path found per outcome is
  // the lexicographically smallest.
  auto dfs = [&](auto&& self, int q, std::size_t pos, bool vis) -> void {
    if (pos == word.size()) {
      if (seen.insert({q, vis}).second) out.push_back({from, word, q, vis, path});
      return;
    }
    auto next = d[q][word[pos]];
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    for (int q2 : next) {
      path.push_back(q2);
      self(self, q2, pos + 1, vis || b.accepting[q2]);
      path.pop_back();
    }
  };
  dfs(dfs, from, 0, false);
  std::sort(out.begin(), out.end(), [](const ExtendedMove& x, const ExtendedMove& y) {
    return std::tie(x.to, x.visits_accepting) < std::tie(y.to, y.visits_accepting);
  });
  return out;
}

std::vector<ExtendedMove> extended_moves(const NBA& b, int from, const Word& word) {
  std::vector<int> w;
  for (const auto& s : word) {
    int i = b.symbol_index(s);
    if (i < 0) throw Error(ErrorCode::ALPHABET_MISMATCH, "symbol '" + s + "' not in NBA alphabet");
    w.push_back(i);
  }
  return extended_moves(b, from, w);
}

// --- product graph -------------------------------------------------------

int ProductGraph::index_of(const ProductVertex& v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  return it != vertices.end() && *it == v ? static_cast<int>(it - vertices.begin()) : -1;
}

Adjacency ProductGraph::adjacency() const {
  Adjacency a(vertices.size());
  for (const auto& e : edges) a[e.src].push_back(e.dst);
  return a;
}

std::vector<std::vector<int>> ProductGraph::out_edges() const {
  std::vector<std::vector<int>> o(vertices.size());
  for (std::size_t i = 0; i < edges.size(); ++i) o[edges[i].src].push_back(static_cast<int>(i));
  return o;
}

std::int64_t ProductGraph::max_weight() const {
  std::int64_t m = 0;
  for (const auto& e : edges) m = std::max(m, e.weight);
  return m;
}

ProductGraph ProductGraph::induced(const std::vector<bool>& keep) const {
  ProductGraph g;
  std::vector<int> id(vertices.size(), -1);
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (keep[v]) {
      id[v] = static_cast<int>(g.vertices.size());
      g.vertices.push_back(vertices[v]);
      g.final.push_back(final[v]);
    }
  for (const auto& e : edges)
    if (keep[e.src] && keep[e.dst]) {
      ProductEdge f = e;
      f.src = id[e.src];
      f.dst = id[e.dst];
      g.edges.push_back(std::move(f));
    }
  for (int v : initial)
    if (keep[v]) g.initial.push_back(id[v]);
  return g;
}

ProductGraph ProductGraph::with_max_weight(std::int64_t bound) const {
  ProductGraph g = *this;
  g.edges.clear();
  for (const auto& e : edges)
    if (e.weight <= bound) g.edges.push_back(e);
  return g;
}

ProductGraph build_product(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                           const ProductOptions& opt) {
  require_valid(k);
  require_valid(t);
  require_valid(b);

  std::vector<int> label_in(k.states.size());
  for (std::size_t s = 0; s < k.states.size(); ++s) {
    label_in[s] = t.in_index(k.label[s]);
    if (label_in[s] < 0)
      throw Error(ErrorCode::ALPHABET_MISMATCH,
                  "kripke label '" + k.label[s] + "' is not an input symbol of the repair machine");
  }
  std::vector<int> out_to_b(t.out_alphabet.size());
  for (std::size_t o = 0; o < t.out_alphabet.size(); ++o) {
    out_to_b[o] = b.symbol_index(t.out_alphabet[o]);
    if (out_to_b[o] < 0)
      throw Error(ErrorCode::ALPHABET_MISMATCH,
                  "output symbol '" + t.out_alphabet[o] + "' is not in the NBA alphabet");
  }

  // moves[e][p]: extended moves of edge e's output from NBA state p
  std::vector<std::vector<std::vector<ExtendedMove>>> moves(t.edges.size());
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    std::vector<int> w;
    for (int o : t.edges[e].out) w.push_back(out_to_b[o]);
    moves[e].resize(b.states.size());
    for (std::size_t p = 0; p < b.states.size(); ++p)
      moves[e][p] = extended_moves(b, static_cast<int>(p), w);
  }
  std::vector<std::vector<int>> rm_out(t.states.size());
  for (std::size_t e = 0; e < t.edges.size(); ++e) rm_out[t.edges[e].src].push_back(static_cast<int>(e));
  auto ksucc = k.successors();
  for (auto& s : ksucc) std::sort(s.begin(), s.end());

  auto next_counter = [&](const ProductVertex& u, int q2, const ExtendedMove& m) {
    if (opt.literal_counter) {
      if (u.counter == 1) return t.accepting[q2] ? 2 : 1;
      return b.accepting[u.nba] ? 1 : 2;
    }
    if (u.counter == 2 && !t.accepting[u.rm]) return 2;
    return m.visits_accepting ? 2 : 1;
  };

  std::map<ProductVertex, int> id;
  std::vector<ProductVertex> verts;
  std::deque<int> work;
  auto intern = [&](const ProductVertex& v) {
    auto [it, fresh] = id.emplace(v, static_cast<int>(verts.size()));
    if (fresh) {
      verts.push_back(v);
      work.push_back(it->second);
    }
    return it->second;
  };
  std::vector<int> init;
  for (int s0 : k.initial)
    for (int q0 : t.initial)
      for (int p0 : b.initial) init.push_back(intern({s0, q0, p0, 1}));

  struct Cand {
    std::int64_t w;
    int rm_edge;
    std::vector<int> path;
    bool vis;
  };
  std::map<std::pair<int, int>, Cand> best;
  while (!work.empty()) {
    int ui = work.front();
    work.pop_front();
    ProductVertex u = verts[ui];
    for (int e : rm_out[u.rm]) {
      const auto& te = t.edges[e];
      if (te.in != label_in[u.kripke]) continue;
      for (const auto& m : moves[e][u.nba]) {
        int c2 = next_counter(u, te.dst, m);
        for (int s2 : ksucc[u.kripke]) {
          int vi = intern({s2, te.dst, m.to, c2});
          Cand c{te.cost, e, m.path, m.visits_accepting};
          auto [it, fresh] = best.emplace(std::make_pair(ui, vi), c);
          if (!fresh && std::tie(c.w, c.rm_edge, c.path) < std::tie(it->second.w, it->second.rm_edge, it->second.path))
            it->second = std::move(c);
        }
      }
    }
  }

  // Renumber in sorted vertex order.
  std::vector<int> order(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int c) { return verts[a] < verts[c]; });
  std::vector<int> rank(verts.size());
  ProductGraph g;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = static_cast<int>(i);
    g.vertices.push_back(verts[order[i]]);
  }
  for (const auto& v : g.vertices) {
    bool fin = opt.literal_counter ? (v.counter == 2 && b.accepting[v.nba])
                                : (v.counter == 2 && t.accepting[v.rm]);
    g.final.push_back(fin);
  }
  for (int v : init) g.initial.push_back(rank[v]);
  std::sort(g.initial.begin(), g.initial.end());
  g.initial.erase(std::unique(g.initial.begin(), g.initial.end()), g.initial.end());
  for (auto& [key, c] : best)
    g.edges.push_back({rank[key.first], rank[key.second], c.w, c.rm_edge, std::move(c.path), c.vis});
  std::sort(g.edges.begin(), g.edges.end(), [](const ProductEdge& a, const ProductEdge& c) {
    return std::tie(a.src, a.dst) < std::tie(c.src, c.dst);
  });
  return g;
}

// --- arena ---------------------------------------------------------------

Adjacency GameArena::adjacency() const {
  Adjacency a(vertices.size());
  for (const auto& e : edges) a[e.src].push_back(e.dst);
  return a;
}

std::vector<std::vector<int>> GameArena::out_edges() const {
  std::vector<std::vector<int>> o(vertices.size());
  for (std::size_t i = 0; i < edges.size(); ++i) o[edges[i].src].push_back(static_cast<int>(i));
  return o;
}

std::int64_t GameArena::max_weight() const {
  std::int64_t m = 0;
  for (const auto& e : edges) m = std::max(m, e.weight);
  return m;
}

GameArena build_arena(const ProductGraph& g) {
  GameArena a;
  a.min_count = static_cast<int>(g.vertices.size());
  for (const auto& v : g.vertices) {
    a.vertices.push_back({v.kripke, v.rm, v.nba, v.counter, 0});
    a.max_owned.push_back(false);
    a.final.push_back(false);
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) a.final[v] = g.final[v];
  a.initial = g.initial;

  std::set<ArenaVertex> maxes;
  auto key = [&](const ProductEdge& e) {
    const auto& u = g.vertices[e.src];
    const auto& v = g.vertices[e.dst];
    return ArenaVertex{u.kripke, v.rm, v.nba, 3, v.counter};
  };
  for (const auto& e : g.edges) maxes.insert(key(e));
  std::map<ArenaVertex, int> mid;
  for (const auto& m : maxes) {
    mid[m] = static_cast<int>(a.vertices.size());
    a.vertices.push_back(m);
    a.max_owned.push_back(true);
    a.final.push_back(false);
  }
  std::map<std::pair<int, int>, ArenaEdge> first, second;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    int m = mid[key(e)];
    auto [it, fresh] = first.emplace(std::make_pair(e.src, m), ArenaEdge{e.src, m, e.weight, static_cast<int>(i)});
    if (!fresh && e.weight < it->second.weight) it->second = {e.src, m, e.weight, static_cast<int>(i)};
    second.emplace(std::make_pair(m, e.dst), ArenaEdge{m, e.dst, 0, static_cast<int>(i)});
  }
  for (auto& [_, e] : first) a.edges.push_back(e);
  for (auto& [_, e] : second) a.edges.push_back(e);
  std::sort(a.edges.begin(), a.edges.end(), [](const ArenaEdge& x, const ArenaEdge& y) {
    return std::tie(x.src, x.dst) < std::tie(y.src, y.dst);
  });
  return a;
}

// --- machine products ----------------------------------------------------

namespace {

struct TripleKey {
  int a, b, f;
  auto operator<=>(const TripleKey&) const = default;
};

// Shared exploration for the two-flag constructions. `step` enumerates the
// successors (b', visits) of the second component for a given first-component
// edge; flag 1 waits for a visit of the second component, flag 2 waits for an
// accepting state of the first.
template <class Step>
RepairMachine flag_product(const RepairMachine& t, const std::vector<int>& init2,
                           const std::vector<std::string>& names2, Step step) {
  RepairMachine r;
  r.in_alphabet = t.in_alphabet;
  r.out_alphabet = t.out_alphabet;
  r.agg = t.agg;
  std::map<TripleKey, int> id;
  std::vector<TripleKey> keys;
  std::deque<int> work;
  auto intern = [&](TripleKey k) {
    auto [it, fresh] = id.emplace(k, static_cast<int>(keys.size()));
    if (fresh) {
      keys.push_back(k);
      work.push_back(it->second);
    }
    return it->second;
  };
  for (int q0 : t.initial)
    for (int p0 : init2) r.initial.push_back(intern({q0, p0, 1}));
  std::vector<std::vector<int>> out(t.states.size());
  for (std::size_t e = 0; e < t.edges.size(); ++e) out[t.edges[e].src].push_back(static_cast<int>(e));
  while (!work.empty()) {
    int ui = work.front();
    work.pop_front();
    TripleKey u = keys[ui];
    for (int e : out[u.a]) {
      const auto& te = t.edges[e];
      for (auto [p2, vis] : step(te, u.b)) {
        int f2 = (u.f == 2 && !t.accepting[u.a]) ? 2 : (vis ? 2 : 1);
        int vi = intern({te.dst, p2, f2});
        r.edges.push_back({ui, te.in, vi, te.out, te.cost});
      }
    }
  }
  for (const auto& k : keys) {
    r.states.push_back(t.states[k.a] + "|" + names2[k.b] + "|" + std::to_string(k.f));
    r.accepting.push_back(k.f == 2 && t.accepting[k.a]);
  }
  canonicalize(r);
  return r;
}

} // namespace

RepairMachine restrict_domain(const RepairMachine& t, const NBA& n) {
  require_valid(t);
  require_valid(n);
  std::vector<int> in_to_n(t.in_alphabet.size());
  for (std::size_t i = 0; i < t.in_alphabet.size(); ++i) in_to_n[i] = n.symbol_index(t.in_alphabet[i]);
  for (const auto& s : n.alphabet)
    if (t.in_index(s) < 0)
      throw Error(ErrorCode::ALPHABET_MISMATCH, "domain symbol '" + s + "' is not an input of the repair machine");
  auto d = n.delta();
  return flag_product(t, n.initial, n.states, [&](const RmEdge& e, int p) {
    std::vector<std::pair<int, bool>> r;
    int s = in_to_n[e.in];
    if (s < 0) return r;
    for (int p2 : d[p][s]) r.push_back({p2, static_cast<bool>(n.accepting[p2])});
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
  });
}

RepairMachine output_product(const RepairMachine& t, const NBA& a) {
  require_valid(t);
  require_valid(a);
  std::vector<int> out_to_a(t.out_alphabet.size());
  for (std::size_t o = 0; o < t.out_alphabet.size(); ++o) {
    out_to_a[o] = a.symbol_index(t.out_alphabet[o]);
    if (out_to_a[o] < 0)
      throw Error(ErrorCode::ALPHABET_MISMATCH,
                  "output symbol '" + t.out_alphabet[o] + "' is not in the NBA alphabet");
  }
  return flag_product(t, a.initial, a.states, [&](const RmEdge& e, int p) {
    std::vector<int> w;
    for (int o : e.out) w.push_back(out_to_a[o]);
    std::vector<std::pair<int, bool>> r;
    for (const auto& m : extended_moves(a, p, w)) r.push_back({m.to, m.visits_accepting});
    return r;
  });
}

template <class M, class EdgeSrc, class EdgeDst>
static std::vector<bool> live_states(const M& m, EdgeSrc src, EdgeDst dst) {
  const std::size_t n = m.states.size();
  Adjacency adj(n);
  for (const auto& e : m.edges) adj[src(e)].push_back(dst(e));
  auto reach = reachable_from(adj, m.initial);
  auto scc = strongly_connected_components(adj);
  std::vector<bool> good(n, false);
  for (std::size_t v = 0; v < n; ++v)
    if (m.accepting[v] && scc.nontrivial[scc.comp[v]]) good[v] = true;
  auto co = can_reach(adj, good);
  std::vector<bool> keep(n);
  for (std::size_t v = 0; v < n; ++v) keep[v] = reach[v] && co[v];
  return keep;
}

RepairMachine trim(const RepairMachine& t) {
  auto keep = live_states(t, [](const RmEdge& e) { return e.src; }, [](const RmEdge& e) { return e.dst; });
  RepairMachine r;
  r.in_alphabet = t.in_alphabet;
  r.out_alphabet = t.out_alphabet;
  r.agg = t.agg;
  std::vector<int> id(t.states.size(), -1);
  for (std::size_t v = 0; v < t.states.size(); ++v)
    if (keep[v]) {
      id[v] = static_cast<int>(r.states.size());
      r.states.push_back(t.states[v]);
      r.accepting.push_back(t.accepting[v]);
    }
  for (int q : t.initial)
    if (keep[q]) r.initial.push_back(id[q]);
  for (const auto& e : t.edges)
    if (keep[e.src] && keep[e.dst]) r.edges.push_back({id[e.src], e.in, id[e.dst], e.out, e.cost});
  canonicalize(r);
  return r;
}

NBA trim(const NBA& a) {
  auto keep = live_states(a, [](const NbaEdge& e) { return e.src; }, [](const NbaEdge& e) { return e.dst; });
  NBA r;
  r.alphabet = a.alphabet;
  std::vector<int> id(a.states.size(), -1);
  for (std::size_t v = 0; v < a.states.size(); ++v)
    if (keep[v]) {
      id[v] = static_cast<int>(r.states.size());
      r.states.push_back(a.states[v]);
      r.accepting.push_back(a.accepting[v]);
    }
  for (int q : a.initial)
    if (keep[q]) r.initial.push_back(id[q]);
  for (const auto& e : a.edges)
    if (keep[e.src] && keep[e.dst]) r.edges.push_back({id[e.src], e.sym, id[e.dst]});
  canonicalize(r);
  return r;
}

NBA input_projection(const RepairMachine& t) {
  NBA a;
  a.states = t.states;
  a.alphabet = t.in_alphabet;
  a.initial = t.initial;
  a.accepting = t.accepting;
  for (const auto& e : t.edges) a.edges.push_back({e.src, e.in, e.dst});
  canonicalize(a);
  return a;
}

NBA intersect(const NBA& a, const NBA& b) {
  std::vector<int> to_b(a.alphabet.size());
  for (std::size_t s = 0; s < a.alphabet.size(); ++s) to_b[s] = b.symbol_index(a.alphabet[s]);
  auto da = a.delta();
  auto db = b.delta();
  NBA r;
  r.alphabet = a.alphabet;
  std::map<TripleKey, int> id;
  std::vector<TripleKey> keys;
  std::deque<int> work;
  auto intern = [&](TripleKey k) {
    auto [it, fresh] = id.emplace(k, static_cast<int>(keys.size()));
    if (fresh) {
      keys.push_back(k);
      work.push_back(it->second);
    }
    return it->second;
  };
  for (int x : a.initial)
    for (int y : b.initial) r.initial.push_back(intern({x, y, 1}));
  while (!work.empty()) {
    int ui = work.front();
    work.pop_front();
    TripleKey u = keys[ui];
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
      if (to_b[s] < 0) continue;
      for (int x : da[u.a][s])
        for (int y : db[u.b][to_b[s]]) {
          int f2 = (u.f == 2 && !a.accepting[u.a]) ? 2 : (b.accepting[y] ? 2 : 1);
          r.edges.push_back({ui, static_cast<int>(s), intern({x, y, f2})});
        }
    }
  }
  for (const auto& k : keys) {
    r.states.push_back(a.states[k.a] + "|" + b.states[k.b] + "|" + std::to_string(k.f));
    r.accepting.push_back(k.f == 2 && a.accepting[k.a]);
  }
  if (r.states.empty()) {
    // keep the result well-formed: a single non-accepting sink
    r.states.push_back("empty");
    r.accepting.push_back(false);
  }
  canonicalize(r);
  return r;
}

} // namespace omegarepair
