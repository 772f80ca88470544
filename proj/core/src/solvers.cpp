#include "omegarepair/solvers.hpp"
#include "omegarepair/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace omegarepair {

// --- sub-arenas ----------------------------------------------------------

SubArena::SubArena(const GameArena& a) : arena_(&a), in_(a.size(), true) {
  auto out = std::make_shared<std::vector<std::vector<int>>>(a.size());
  auto inc = std::make_shared<std::vector<std::vector<int>>>(a.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    (*out)[a.edges[i].src].push_back(static_cast<int>(i));
    (*inc)[a.edges[i].dst].push_back(static_cast<int>(i));
  }
  out_ = out;
  in_edges_ = inc;
}

SubArena SubArena::restrict_to(const std::vector<bool>& keep) const {
  SubArena s = *this;
  for (std::size_t v = 0; v < in_.size(); ++v) s.in_[v] = in_[v] && keep[v];
  return s;
}

SubArena SubArena::with_bound(std::int64_t b) const {
  SubArena s = *this;
  s.bound_ = bound_ ? std::min(*bound_, b) : b;
  return s;
}

bool SubArena::edge_ok(int e) const {
  const auto& ed = arena_->edges[e];
  if (!in_[ed.src] || !in_[ed.dst]) return false;
  if (bound_ && !arena_->max_owned[ed.src] && ed.weight > *bound_) return false;
  return true;
}

std::vector<int> SubArena::out(int v) const {
  std::vector<int> r;
  if (!in_[v]) return r;
  for (int e : (*out_)[v])
    if (edge_ok(e)) r.push_back(e);
  return r;
}

std::vector<int> SubArena::in(int v) const {
  std::vector<int> r;
  if (!in_[v]) return r;
  for (int e : (*in_edges_)[v])
    if (edge_ok(e)) r.push_back(e);
  return r;
}

static Player owner(const GameArena& a, int v) { return a.max_owned[v] ? Player::MAX : Player::MIN; }
static Player other(Player p) { return p == Player::MIN ? Player::MAX : Player::MIN; }

std::vector<bool> attractor(const SubArena& s, const std::vector<bool>& target, Player p,
                            std::vector<int>* rank) {
  const GameArena& a = s.arena();
  const int n = static_cast<int>(a.size());
  std::vector<bool> in_attr(n, false);
  std::vector<int> rk(n, -1), count(n, 0);
  std::deque<int> q;
  for (int v = 0; v < n; ++v) {
    if (!s.contains(v)) continue;
    count[v] = static_cast<int>(s.out(v).size());
    bool hit = target[v] || (owner(a, v) != p && count[v] == 0);
    if (hit) {
      in_attr[v] = true;
      rk[v] = 0;
      q.push_back(v);
    }
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e : s.in(v)) {
      int u = a.edges[e].src;
      if (in_attr[u]) continue;
      if (owner(a, u) == p || --count[u] == 0) {
        in_attr[u] = true;
        rk[u] = rk[v] + 1;
        q.push_back(u);
      }
    }
  }
  if (rank) *rank = std::move(rk);
  return in_attr;
}

// --- Buchi games ---------------------------------------------------------

BuchiGameResult solve_buchi_game(const SubArena& s, Player p) {
  const GameArena& a = s.arena();
  const int n = static_cast<int>(a.size());
  const Player o = other(p);
  std::vector<bool> w = s.vertices();
  // Opponent ranking on removed vertices: (layer, distance to its trap).
  std::vector<int> layer(n, std::numeric_limits<int>::max()), lrank(n, 0);
  std::vector<int> rank_p;
  for (int j = 0;; ++j) {
    SubArena sub = s.restrict_to(w);
    std::vector<bool> target(n, false);
    for (int v = 0; v < n; ++v)
      if (w[v] && a.final[v] && (owner(a, v) != p || !sub.out(v).empty())) target[v] = true;
    auto attr = attractor(sub, target, p, &rank_p);
    std::vector<bool> trap(n, false);
    bool any = false;
    for (int v = 0; v < n; ++v)
      if (w[v] && !attr[v]) trap[v] = any = true;
    if (!any) break;
    std::vector<int> rank_o;
    auto lost = attractor(sub, trap, o, &rank_o);
    for (int v = 0; v < n; ++v)
      if (lost[v]) {
        layer[v] = j;
        lrank[v] = rank_o[v];
        w[v] = false;
      }
  }

  BuchiGameResult r;
  r.min_strategy.assign(n, -1);
  r.max_strategy.assign(n, -1);
  std::vector<bool> win_p = w, win_o(n, false);
  for (int v = 0; v < n; ++v) win_o[v] = s.contains(v) && !w[v];
  SubArena sub = s.restrict_to(w);
  auto& strat_p = p == Player::MIN ? r.min_strategy : r.max_strategy;
  auto& strat_o = p == Player::MIN ? r.max_strategy : r.min_strategy;
  for (int v = 0; v < n; ++v) {
    if (!s.contains(v)) continue;
    if (owner(a, v) == p && win_p[v]) {
      int best = -1;
      for (int e : sub.out(v)) {
        int x = a.edges[e].dst;
        bool ok = a.final[v] ? true : rank_p[x] < rank_p[v];
        if (ok && (best < 0 || x < best)) best = x;
      }
      strat_p[v] = best;
    } else if (owner(a, v) == o && win_o[v]) {
      int best = -1;
      std::pair<int, int> key{std::numeric_limits<int>::max(), 0};
      for (int e : s.out(v)) {
        int x = a.edges[e].dst;
        std::pair<int, int> k{layer[x], lrank[x]};
        if (best < 0 || k < key || (k == key && x < best)) {
          best = x;
          key = k;
        }
      }
      strat_o[v] = best;
    }
  }
  r.min_winning = p == Player::MIN ? win_p : win_o;
  r.max_winning = p == Player::MIN ? win_o : win_p;
  return r;
}

BuchiGameResult solve_buchi_game(const GameArena& arena, Player favored) {
  return solve_buchi_game(SubArena(arena), favored);
}

ProductGraph prune_to_accepting_lassos(const ProductGraph& g) {
  auto adj = g.adjacency();
  auto scc = strongly_connected_components(adj);
  std::vector<bool> good(g.size(), false);
  for (std::size_t v = 0; v < g.size(); ++v)
    good[v] = g.final[v] && scc.nontrivial[scc.comp[v]];
  return g.induced(can_reach(adj, good));
}

// --- round view of a sub-arena -------------------------------------------

namespace {

struct Choice {
  int mid;           // Max vertex
  std::int64_t w;
};

struct RoundView {
  std::vector<int> mins;                       // Min vertices in the sub-arena
  std::vector<std::vector<Choice>> choices;    // by arena vertex (Min only)
  std::vector<std::vector<int>> replies;       // by arena vertex (Max only)
  std::vector<int> maxes;                      // Max vertices reachable by a choice
  std::int64_t wmax = 0;
};

RoundView round_view(const SubArena& s) {
  const GameArena& a = s.arena();
  RoundView rv;
  rv.choices.resize(a.size());
  rv.replies.resize(a.size());
  std::vector<bool> seen(a.size(), false);
  for (int v = 0; v < static_cast<int>(a.size()); ++v) {
    if (!s.contains(v) || a.max_owned[v]) continue;
    rv.mins.push_back(v);
    for (int e : s.out(v)) {
      int m = a.edges[e].dst;
      if (!a.max_owned[m])
        throw Error(ErrorCode::INVALID_MODEL, "arena does not alternate between Min and Max");
      rv.choices[v].push_back({m, a.edges[e].weight});
      rv.wmax = std::max(rv.wmax, a.edges[e].weight);
      if (!seen[m]) {
        seen[m] = true;
        rv.maxes.push_back(m);
      }
    }
    if (rv.choices[v].empty())
      throw Error(ErrorCode::NO_SUCCESSOR, "vertex " + std::to_string(v) + " has no move");
  }
  std::sort(rv.maxes.begin(), rv.maxes.end());
  for (int m : rv.maxes) {
    for (int e : s.out(m)) rv.replies[m].push_back(a.edges[e].dst);
    if (rv.replies[m].empty())
      throw Error(ErrorCode::NO_SUCCESSOR, "vertex " + std::to_string(m) + " has no move");
  }
  return rv;
}

// Exact discounted values of the play induced by fixed strategies.
std::vector<Rational> eval_dsum(const RoundView& rv, std::size_t n, const std::vector<int>& smin,
                                const std::vector<std::int64_t>& wmin, const std::vector<int>& smax,
                                const Rational& lambda) {
  std::vector<Rational> val(n);
  std::vector<char> done(n, 0);
  std::map<int, std::size_t> pos;
  std::vector<int> path;
  for (int u : rv.mins) {
    if (done[u]) continue;
    path.clear();
    pos.clear();
    int x = u;
    while (!done[x] && !pos.count(x)) {
      pos[x] = path.size();
      path.push_back(x);
      x = smax[smin[x]];
    }
    std::size_t stop = path.size();
    if (!done[x]) {
      std::size_t start = pos[x];
      Rational s(0), pw(1);
      for (std::size_t j = start; j < path.size(); ++j) {
        s += pw * Rational(wmin[path[j]]);
        pw *= lambda;
      }
      val[x] = s / (Rational(1) - pw);
      done[x] = 1;
      for (std::size_t j = path.size(); j-- > start + 1;) {
        int y = path[j];
        val[y] = Rational(wmin[y]) + lambda * val[smax[smin[y]]];
        done[y] = 1;
      }
      stop = start;
    }
    for (std::size_t j = stop; j-- > 0;) {
      int y = path[j];
      val[y] = Rational(wmin[y]) + lambda * val[smax[smin[y]]];
      done[y] = 1;
    }
  }
  return val;
}

std::int64_t choice_weight(const RoundView& rv, int u, int m) {
  for (const auto& c : rv.choices[u])
    if (c.mid == m) return c.w;
  throw Error(ErrorCode::INTERNAL, "strategy picks a missing edge");
}

} // namespace

// --- discounted games ----------------------------------------------------

ValueMap solve_dsum_game(const SubArena& s, const Rational& lambda) {
  if (lambda <= Rational(0) || lambda >= Rational(1))
    throw Error(ErrorCode::BAD_AGGREGATOR, "discount must lie in (0,1)");
  const GameArena& a = s.arena();
  const std::size_t n = a.size();
  RoundView rv = round_view(s);
  const long double l = lambda.to_long_double();
  const long double wm = static_cast<long double>(std::max<std::int64_t>(rv.wmax, 1));

  std::vector<long double> v(n, 0.0L), vmax(n, 0.0L);
  std::vector<int> smin(n, -1), smax(n, -1);
  std::vector<std::int64_t> wmin(n, 0);

  auto max_values = [&]() {
    for (int m : rv.maxes) {
      long double b = -1;
      for (int x : rv.replies[m]) b = std::max(b, v[x]);
      vmax[m] = b;
    }
  };

  std::vector<Rational> exact;
  auto certify = [&]() {
    exact = eval_dsum(rv, n, smin, wmin, smax, lambda);
    std::vector<Rational> mx(n);
    for (int m : rv.maxes) {
      Rational b = exact[rv.replies[m].front()];
      for (int x : rv.replies[m]) b = std::max(b, exact[x]);
      mx[m] = b;
      if (exact[smax[m]] != b) return false;
    }
    for (int u : rv.mins) {
      Rational b = Rational(rv.choices[u].front().w) + lambda * mx[rv.choices[u].front().mid];
      for (const auto& c : rv.choices[u]) b = std::min(b, Rational(c.w) + lambda * mx[c.mid]);
      if (exact[u] != b) return false;
    }
    return true;
  };

  bool ok = false;
  for (long double prec : {1e-6L, 1e-9L, 1e-12L, 1e-15L}) {
    long double bound = std::ceil(std::log(prec * (1 - l) / wm) / std::log(l)) + 1;
    long iters = static_cast<long>(std::min<long double>(std::max<long double>(bound, 1), 1e7L));
    for (long it = 0; it < iters; ++it) {
      max_values();
      long double delta = 0;
      for (int u : rv.mins) {
        long double b = std::numeric_limits<long double>::infinity();
        for (const auto& c : rv.choices[u]) b = std::min(b, c.w + l * vmax[c.mid]);
        delta = std::max(delta, std::fabs(b - v[u]));
        v[u] = b;
      }
      if (delta < prec * (1 - l)) break;
    }
    max_values();
    long double tol = prec * 4 * std::max<long double>(1, wm / (1 - l));
    for (int m : rv.maxes) {
      int best = -1;
      for (int x : rv.replies[m])
        if (v[x] >= vmax[m] - tol && (best < 0 || x < best)) best = x;
      smax[m] = best;
    }
    for (int u : rv.mins) {
      long double b = std::numeric_limits<long double>::infinity();
      for (const auto& c : rv.choices[u]) b = std::min(b, c.w + l * vmax[c.mid]);
      int best = -1;
      for (const auto& c : rv.choices[u])
        if (c.w + l * vmax[c.mid] <= b + tol && (best < 0 || c.mid < best)) best = c.mid;
      smin[u] = best;
      wmin[u] = choice_weight(rv, u, best);
    }
    if ((ok = certify())) break;
  }

  if (!ok) {
    // Exact strategy improvement from the best floating-point guess.
    for (int guard = 0; guard < 100000; ++guard) {
      for (;;) {
        exact = eval_dsum(rv, n, smin, wmin, smax, lambda);
        bool changed = false;
        for (int m : rv.maxes) {
          Rational b = exact[smax[m]];
          int arg = smax[m];
          for (int x : rv.replies[m])
            if (exact[x] > b) {
              b = exact[x];
              arg = x;
            }
          if (arg != smax[m]) {
            smax[m] = arg;
            changed = true;
          }
        }
        if (!changed) break;
      }
      bool changed = false;
      for (int u : rv.mins) {
        Rational cur = exact[u];
        Rational b = cur;
        int arg = smin[u];
        for (const auto& c : rv.choices[u]) {
          Rational q = Rational(c.w) + lambda * exact[smax[c.mid]];
          if (q < b) {
            b = q;
            arg = c.mid;
          }
        }
        if (arg != smin[u]) {
          smin[u] = arg;
          wmin[u] = choice_weight(rv, u, arg);
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (!certify()) throw Error(ErrorCode::INTERNAL, "discounted solver failed to certify");
  }

  ValueMap r;
  r.values.assign(n, Rational(0));
  r.strategy_min.assign(n, -1);
  r.strategy_max.assign(n, -1);
  for (int u : rv.mins) {
    r.values[u] = exact[u];
    r.strategy_min[u] = smin[u];
  }
  for (int m : rv.maxes) {
    r.values[m] = exact[smax[m]];
    r.strategy_max[m] = smax[m];
  }
  return r;
}

ValueMap solve_dsum_game(const GameArena& arena, const Rational& lambda) {
  return solve_dsum_game(SubArena(arena), lambda);
}

// Arena in which Max has exactly one reply per product edge.
static GameArena single_player_arena(const ProductGraph& g) {
  GameArena a;
  a.min_count = static_cast<int>(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& pv = g.vertices[v];
    a.vertices.push_back({pv.kripke, pv.rm, pv.nba, pv.counter, 0});
    a.max_owned.push_back(false);
    a.final.push_back(g.final[v]);
  }
  a.initial = g.initial;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    int m = static_cast<int>(a.vertices.size());
    const auto& pv = g.vertices[e.dst];
    a.vertices.push_back({pv.kripke, pv.rm, pv.nba, 3, pv.counter});
    a.max_owned.push_back(true);
    a.final.push_back(false);
    a.edges.push_back({e.src, m, e.weight, static_cast<int>(i)});
    a.edges.push_back({m, e.dst, 0, static_cast<int>(i)});
  }
  return a;
}

static ValueMap project_single(const ProductGraph& g, const GameArena& a, const ValueMap& vm) {
  ValueMap r;
  r.certified = vm.certified;
  r.values.assign(vm.values.begin(), vm.values.begin() + static_cast<long>(g.size()));
  r.strategy_min.assign(g.size(), -1);
  r.strategy_max.assign(g.size(), -1);
  for (std::size_t v = 0; v < g.size(); ++v) {
    int m = vm.strategy_min[v];
    if (m >= 0) r.strategy_min[v] = g.edges[a.edges[2 * (m - a.min_count) + 1].product_edge].dst;
  }
  return r;
}

ValueMap min_dsum_single(const ProductGraph& g, const Rational& lambda) {
  auto out = g.out_edges();
  for (std::size_t v = 0; v < g.size(); ++v)
    if (out[v].empty()) throw Error(ErrorCode::NO_SUCCESSOR, "vertex " + std::to_string(v) + " has no successor");
  GameArena a = single_player_arena(g);
  return project_single(g, a, solve_dsum_game(a, lambda));
}

// --- Karp and cycle means ------------------------------------------------

WeightedDigraph WeightedDigraph::from(const ProductGraph& g) {
  WeightedDigraph d;
  d.n = static_cast<int>(g.size());
  for (const auto& e : g.edges) d.edges.push_back({e.src, e.dst, e.weight});
  return d;
}

Adjacency WeightedDigraph::adjacency() const {
  Adjacency a(n);
  for (const auto& e : edges) a[e.src].push_back(e.dst);
  return a;
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Karp on the strongly connected vertex set `comp` (local edges only).
Rational karp_scc(const std::vector<int>& comp, const std::vector<WeightedDigraph::Edge>& local) {
  const int m = static_cast<int>(comp.size());
  std::vector<std::vector<std::int64_t>> d(m + 1, std::vector<std::int64_t>(m, kInf));
  d[0][0] = 0;
  for (int k = 1; k <= m; ++k)
    for (const auto& e : local)
      if (d[k - 1][e.src] < kInf) d[k][e.dst] = std::min(d[k][e.dst], d[k - 1][e.src] + e.w);
  std::optional<Rational> best;
  for (int v = 0; v < m; ++v) {
    if (d[m][v] >= kInf) continue;
    std::optional<Rational> worst;
    for (int k = 0; k < m; ++k) {
      if (d[k][v] >= kInf) continue;
      Rational q(d[m][v] - d[k][v], m - k);
      if (!worst || q > *worst) worst = q;
    }
    if (worst && (!best || *worst < *best)) best = worst;
  }
  if (!best) throw Error(ErrorCode::INTERNAL, "karp on a component without cycles");
  return *best;
}

struct Component {
  std::vector<int> verts;
  std::vector<WeightedDigraph::Edge> local; // local indices
  std::vector<int> local_of;                // global -> local (or -1)
};

std::vector<Component> components(const WeightedDigraph& g, const SccResult& scc) {
  std::vector<Component> cs(scc.count);
  std::vector<int> loc(g.n, -1);
  for (int v = 0; v < g.n; ++v) {
    auto& c = cs[scc.comp[v]];
    loc[v] = static_cast<int>(c.verts.size());
    c.verts.push_back(v);
  }
  for (const auto& e : g.edges)
    if (scc.comp[e.src] == scc.comp[e.dst]) cs[scc.comp[e.src]].local.push_back({loc[e.src], loc[e.dst], e.w});
  for (auto& c : cs) {
    c.local_of.assign(g.n, -1);
    for (std::size_t i = 0; i < c.verts.size(); ++i) c.local_of[c.verts[i]] = static_cast<int>(i);
  }
  return cs;
}

// Shortest cycle through local vertex f using only `edges`.
std::vector<int> cycle_through(int m, const std::vector<WeightedDigraph::Edge>& edges, int f) {
  Adjacency adj(m);
  for (const auto& e : edges) adj[e.src].push_back(e.dst);
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<int> parent(m, -2);
  std::deque<int> q;
  for (int x : adj[f]) {
    if (x == f) return {f};
    if (parent[x] == -2) {
      parent[x] = f;
      q.push_back(x);
    }
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int x : adj[v]) {
      if (x == f) {
        std::vector<int> path{v};
        while (path.back() != f) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (parent[x] == -2) {
        parent[x] = v;
        q.push_back(x);
      }
    }
  }
  return {};
}

// A cycle of mean exactly `mu` inside a component whose minimum mean is mu,
// preferring one through a vertex with prefer[global] set.
std::vector<int> tight_cycle(const Component& c, const Rational& mu, const std::vector<bool>* prefer) {
  const int m = static_cast<int>(c.verts.size());
  std::int64_t p = static_cast<std::int64_t>(mu.num());
  std::int64_t q = static_cast<std::int64_t>(mu.den());
  std::vector<std::int64_t> dist(m, kInf);
  dist[0] = 0;
  for (int it = 0; it < m; ++it)
    for (const auto& e : c.local)
      if (dist[e.src] < kInf && dist[e.src] + (q * e.w - p) < dist[e.dst])
        dist[e.dst] = dist[e.src] + (q * e.w - p);
  std::vector<WeightedDigraph::Edge> tight;
  for (const auto& e : c.local)
    if (dist[e.src] < kInf && dist[e.src] + (q * e.w - p) == dist[e.dst]) tight.push_back(e);
  Adjacency adj(m);
  for (const auto& e : tight) adj[e.src].push_back(e.dst);
  auto scc = strongly_connected_components(adj);
  int pick = -1;
  for (int v = 0; v < m && pick < 0; ++v)
    if (scc.nontrivial[scc.comp[v]] && prefer && (*prefer)[c.verts[v]]) pick = v;
  for (int v = 0; v < m && pick < 0; ++v)
    if (scc.nontrivial[scc.comp[v]]) pick = v;
  if (pick < 0) throw Error(ErrorCode::INTERNAL, "no tight cycle");
  auto cyc = cycle_through(m, tight, pick);
  for (int& v : cyc) v = c.verts[v];
  return cyc;
}

} // namespace

std::vector<std::optional<Rational>> reachable_cycle_mean(const WeightedDigraph& g, bool maximize) {
  WeightedDigraph h = g;
  if (maximize)
    for (auto& e : h.edges) e.w = -e.w;
  auto scc = strongly_connected_components(h.adjacency());
  auto cs = components(h, scc);
  std::vector<std::optional<Rational>> best(scc.count);
  // Tarjan numbers sink components first.
  std::vector<std::vector<int>> succ(scc.count);
  for (const auto& e : h.edges)
    if (scc.comp[e.src] != scc.comp[e.dst]) succ[scc.comp[e.src]].push_back(scc.comp[e.dst]);
  for (int c = 0; c < scc.count; ++c) {
    if (scc.nontrivial[c]) best[c] = karp_scc(cs[c].verts, cs[c].local);
    for (int d : succ[c])
      if (best[d] && (!best[c] || *best[d] < *best[c])) best[c] = best[d];
  }
  std::vector<std::optional<Rational>> r(g.n);
  for (int v = 0; v < g.n; ++v) {
    r[v] = best[scc.comp[v]];
    if (r[v] && maximize) r[v] = -*r[v];
  }
  return r;
}

static std::vector<int> bfs_generic(const Adjacency& adj, const std::vector<int>& sources,
                                    const std::vector<bool>& goal) {
  std::vector<int> parent(adj.size(), -2);
  std::deque<int> q;
  std::vector<int> src = sources;
  std::sort(src.begin(), src.end());
  for (int s : src)
    if (parent[s] == -2) {
      parent[s] = -1;
      q.push_back(s);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (goal[v]) {
      std::vector<int> path{v};
      while (parent[path.back()] >= 0) path.push_back(parent[path.back()]);
      std::reverse(path.begin(), path.end());
      return path;
    }
    std::vector<int> next = adj[v];
    std::sort(next.begin(), next.end());
    for (int x : next)
      if (parent[x] == -2) {
        parent[x] = v;
        q.push_back(x);
      }
  }
  return {};
}

// Lasso whose prefix reaches the cycle; the prefix is cut at the first vertex
// that already lies on the cycle.
static Lasso<int> make_lasso(const std::vector<int>& path, std::vector<int> cycle) {
  Lasso<int> l;
  for (int v : path) {
    auto it = std::find(cycle.begin(), cycle.end(), v);
    if (it != cycle.end()) {
      std::rotate(cycle.begin(), it, cycle.end());
      break;
    }
    l.prefix.push_back(v);
  }
  l.cycle = std::move(cycle);
  return l;
}

CycleResult karp_min_mean_cycle(const WeightedDigraph& g, const std::vector<int>& sources) {
  std::vector<int> src = sources;
  if (src.empty())
    for (int v = 0; v < g.n; ++v) src.push_back(v);
  auto adj = g.adjacency();
  auto reach = reachable_from(adj, src);
  auto scc = strongly_connected_components(adj);
  auto cs = components(g, scc);
  std::optional<Rational> best;
  int best_c = -1;
  for (int c = 0; c < scc.count; ++c) {
    if (!scc.nontrivial[c] || !reach[cs[c].verts.front()]) continue;
    Rational mu = karp_scc(cs[c].verts, cs[c].local);
    if (!best || mu < *best || (mu == *best && cs[c].verts.front() < cs[best_c].verts.front())) {
      best = mu;
      best_c = c;
    }
  }
  if (!best) throw Error(ErrorCode::ACYCLIC, "graph has no reachable cycle");
  auto cyc = tight_cycle(cs[best_c], *best, nullptr);
  std::vector<bool> on(g.n, false);
  for (int v : cyc) on[v] = true;
  auto path = bfs_generic(adj, src, on);
  CycleResult r;
  r.value = *best;
  r.cycle = make_lasso(path, cyc);
  r.n = static_cast<std::int64_t>(r.cycle.cycle.size());
  for (std::size_t i = 0; i < r.cycle.cycle.size(); ++i) {
    int u = r.cycle.cycle[i], v = r.cycle.cycle[(i + 1) % r.cycle.cycle.size()];
    std::int64_t w = kInf;
    for (const auto& e : g.edges)
      if (e.src == u && e.dst == v) w = std::min(w, e.w);
    r.d += w;
  }
  return r;
}

CycleResult min_mean_cycle_within(const WeightedDigraph& g, const std::vector<int>& scc,
                                  const std::vector<bool>* prefer) {
  Component c;
  c.verts = scc;
  std::sort(c.verts.begin(), c.verts.end());
  c.local_of.assign(g.n, -1);
  for (std::size_t i = 0; i < c.verts.size(); ++i) c.local_of[c.verts[i]] = static_cast<int>(i);
  for (const auto& e : g.edges)
    if (c.local_of[e.src] >= 0 && c.local_of[e.dst] >= 0)
      c.local.push_back({c.local_of[e.src], c.local_of[e.dst], e.w});
  if (c.local.empty()) throw Error(ErrorCode::ACYCLIC, "component has no cycle");
  CycleResult r;
  r.value = karp_scc(c.verts, c.local);
  r.cycle.cycle = tight_cycle(c, r.value, prefer);
  r.n = static_cast<std::int64_t>(r.cycle.cycle.size());
  for (std::size_t i = 0; i < r.cycle.cycle.size(); ++i) {
    int u = r.cycle.cycle[i], v = r.cycle.cycle[(i + 1) % r.cycle.cycle.size()];
    std::int64_t w = kInf;
    for (const auto& e : g.edges)
      if (e.src == u && e.dst == v) w = std::min(w, e.w);
    r.d += w;
  }
  return r;
}

CycleResult karp_min_mean_cycle(const ProductGraph& g) {
  return karp_min_mean_cycle(WeightedDigraph::from(g), g.initial);
}

// --- mean-payoff games ---------------------------------------------------

ValueMap solve_mean_game(const SubArena& s) {
  const GameArena& a = s.arena();
  const std::size_t n = a.size();
  RoundView rv = round_view(s);
  const long double nmin = static_cast<long double>(rv.mins.size());
  const long double wm = static_cast<long double>(std::max<std::int64_t>(rv.wmax, 1));
  // Beyond this horizon v_k / k is within 1/(2 n^2) of the value.
  const long double horizon = 4.0L * nmin * nmin * nmin * wm + 1;

  std::vector<long double> v(n, 0.0L), vmax(n, 0.0L);
  std::vector<int> smin(n, -1), smax(n, -1);

  auto certify = [&](std::vector<Rational>& out) {
    WeightedDigraph up, lo;
    up.n = lo.n = static_cast<int>(n);
    for (int u : rv.mins) {
      std::int64_t w = choice_weight(rv, u, smin[u]);
      for (int x : rv.replies[smin[u]]) up.edges.push_back({u, x, w});
      for (const auto& c : rv.choices[u]) lo.edges.push_back({u, smax[c.mid], c.w});
    }
    auto gu = reachable_cycle_mean(up, true);
    auto gl = reachable_cycle_mean(lo, false);
    out.assign(n, Rational(0));
    for (int u : rv.mins) {
      if (!gu[u] || !gl[u] || *gu[u] != *gl[u]) return false;
      out[u] = *gu[u];
    }
    return true;
  };

  std::vector<Rational> exact;
  bool ok = false;
  long double k = 0, checkpoint = 8;
  while (true) {
    for (int m : rv.maxes) {
      long double b = -1;
      int arg = -1;
      for (int x : rv.replies[m])
        if (v[x] > b || (v[x] == b && x < arg)) {
          b = v[x];
          arg = x;
        }
      vmax[m] = b;
      smax[m] = arg;
    }
    std::vector<long double> nv = v;
    for (int u : rv.mins) {
      long double b = std::numeric_limits<long double>::infinity();
      int arg = -1;
      for (const auto& c : rv.choices[u]) {
        long double q = c.w + vmax[c.mid];
        if (q < b || (q == b && c.mid < arg)) {
          b = q;
          arg = c.mid;
        }
      }
      nv[u] = b;
      smin[u] = arg;
    }
    v.swap(nv);
    k += 1;
    if (k >= checkpoint || k >= horizon) {
      if ((ok = certify(exact))) break;
      if (k >= horizon) break;
      checkpoint *= 2;
    }
  }

  ValueMap r;
  r.certified = ok;
  r.values.assign(n, Rational(0));
  r.strategy_min.assign(n, -1);
  r.strategy_max.assign(n, -1);
  for (int u : rv.mins) {
    r.values[u] = ok ? exact[u] : nearest_rational(v[u] / k, static_cast<std::int64_t>(nmin));
    r.strategy_min[u] = smin[u];
  }
  for (int m : rv.maxes) {
    Rational b = r.values[rv.replies[m].front()];
    for (int x : rv.replies[m]) b = std::max(b, r.values[x]);
    r.values[m] = b;
    r.strategy_max[m] = smax[m];
  }
  return r;
}

ValueMap solve_mean_game(const GameArena& arena) { return solve_mean_game(SubArena(arena)); }

ValueMap solve_mean_game(const ProductGraph& g) {
  auto out = g.out_edges();
  for (std::size_t v = 0; v < g.size(); ++v)
    if (out[v].empty()) throw Error(ErrorCode::NO_SUCCESSOR, "vertex " + std::to_string(v) + " has no successor");
  GameArena a = single_player_arena(g);
  return project_single(g, a, solve_mean_game(a));
}

// --- threshold results ---------------------------------------------------

const char* to_string(Attainment a) {
  return a == Attainment::ATTAINED ? "ATTAINED" : "INFIMUM_ONLY";
}

const char* to_string(MemoryClass m) {
  switch (m) {
  case MemoryClass::POSITIONAL: return "POSITIONAL";
  case MemoryClass::FINITE: return "FINITE";
  case MemoryClass::INFINITE_FOR_EXACT: return "INFINITE_FOR_EXACT";
  }
  return "?";
}

const char* to_string(Orientation o) { return o == Orientation::REPAIR ? "REPAIR" : "IMPAIR"; }

std::string Interval::str() const {
  std::string s = lo_closed ? "[" : "(";
  s += lo.str() + "," + (hi ? hi->str() : std::string("inf"));
  s += hi && hi_closed ? "]" : ")";
  return s;
}

ThresholdResult make_threshold(Orientation o, ExtRational value, Attainment a, MemoryClass m) {
  ThresholdResult r;
  r.value = value;
  r.attainment = a;
  r.memory = m;
  r.orientation = o;
  if (o == Orientation::REPAIR) {
    if (value) {
      r.good.push_back({*value, std::nullopt, true, false});
      if (*value > Rational(0)) r.bad.push_back({Rational(0), *value, true, false});
    } else {
      r.bad.push_back({Rational(0), std::nullopt, true, false});
    }
  } else {
    if (value) {
      if (*value > Rational(0)) r.good.push_back({Rational(0), *value, false, false});
      r.bad.push_back({*value, std::nullopt, true, false});
    } else {
      r.good.push_back({Rational(0), std::nullopt, false, false});
    }
  }
  return r;
}

// --- lasso threshold searches --------------------------------------------

std::vector<int> bfs_path(const ProductGraph& g, const std::vector<int>& sources,
                          const std::vector<bool>& goal, const std::vector<bool>* edge_ok) {
  Adjacency adj(g.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (!edge_ok || (*edge_ok)[i]) adj[g.edges[i].src].push_back(g.edges[i].dst);
  return bfs_generic(adj, sources, goal);
}

static std::vector<int> cycle_in(const ProductGraph& g, const std::vector<bool>& edge_ok, int f) {
  std::vector<WeightedDigraph::Edge> es;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (edge_ok[i]) es.push_back({g.edges[i].src, g.edges[i].dst, g.edges[i].weight});
  return cycle_through(static_cast<int>(g.size()), es, f);
}

static std::vector<std::int64_t> distinct_weights(const ProductGraph& g) {
  std::vector<std::int64_t> ws;
  for (const auto& e : g.edges) ws.push_back(e.weight);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

ThresholdResult minimax_lasso_sup(const ProductGraph& g) {
  for (std::int64_t c : distinct_weights(g)) {
    std::vector<bool> ok(g.edges.size());
    Adjacency adj(g.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      ok[i] = g.edges[i].weight <= c;
      if (ok[i]) adj[g.edges[i].src].push_back(g.edges[i].dst);
    }
    auto reach = reachable_from(adj, g.initial);
    auto scc = strongly_connected_components(adj);
    std::vector<bool> good(g.size(), false);
    bool any = false;
    for (std::size_t v = 0; v < g.size(); ++v)
      if (g.final[v] && reach[v] && scc.nontrivial[scc.comp[v]]) good[v] = any = true;
    if (!any) continue;
    auto path = bfs_path(g, g.initial, good, &ok);
    auto cyc = cycle_in(g, ok, path.back());
    auto r = make_threshold(Orientation::IMPAIR, Rational(c), Attainment::ATTAINED, MemoryClass::POSITIONAL);
    r.witness = make_lasso(path, cyc);
    return r;
  }
  return make_threshold(Orientation::IMPAIR, std::nullopt, Attainment::ATTAINED, MemoryClass::POSITIONAL);
}

ThresholdResult min_limsup_cycle(const ProductGraph& g) {
  auto reach = reachable_from(g.adjacency(), g.initial);
  for (std::int64_t c : distinct_weights(g)) {
    std::vector<bool> ok(g.edges.size());
    Adjacency adj(g.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      ok[i] = g.edges[i].weight <= c;
      if (ok[i]) adj[g.edges[i].src].push_back(g.edges[i].dst);
    }
    auto scc = strongly_connected_components(adj);
    std::vector<bool> good(g.size(), false);
    bool any = false;
    for (std::size_t v = 0; v < g.size(); ++v)
      if (g.final[v] && reach[v] && scc.nontrivial[scc.comp[v]]) good[v] = any = true;
    if (!any) continue;
    auto path = bfs_path(g, g.initial, good);
    auto cyc = cycle_in(g, ok, path.back());
    auto r = make_threshold(Orientation::IMPAIR, Rational(c), Attainment::ATTAINED, MemoryClass::POSITIONAL);
    r.witness = make_lasso(path, cyc);
    return r;
  }
  return make_threshold(Orientation::IMPAIR, std::nullopt, Attainment::ATTAINED, MemoryClass::POSITIONAL);
}

Lasso<std::int64_t> lasso_costs(const ProductGraph& g, const Lasso<int>& run) {
  auto weight = [&](int u, int v) {
    auto it = std::lower_bound(g.edges.begin(), g.edges.end(), std::make_pair(u, v),
                               [](const ProductEdge& e, const std::pair<int, int>& k) {
                                 return std::make_pair(e.src, e.dst) < k;
                               });
    if (it == g.edges.end() || it->src != u || it->dst != v)
      throw Error(ErrorCode::INVALID_MODEL, "lasso uses a missing edge");
    return it->weight;
  };
  Lasso<std::int64_t> c;
  for (std::size_t i = 0; i < run.prefix.size(); ++i) c.prefix.push_back(weight(run.prefix[i], run.at(i + 1)));
  for (std::size_t i = 0; i < run.cycle.size(); ++i)
    c.cycle.push_back(weight(run.cycle[i], run.cycle[(i + 1) % run.cycle.size()]));
  return c;
}

} // namespace omegarepair
