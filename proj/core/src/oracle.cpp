#include "omegarepair/oracle.hpp"
#include "omegarepair/error.hpp"
#include "omegarepair/mask.hpp"
#include "omegarepair/repair.hpp"
#include "omegarepair/impair.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>

namespace omegarepair {

namespace {

// Small explicit graph used by the brute-force searches.
struct Small {
  int n = 0;
  std::vector<std::vector<std::pair<int, std::int64_t>>> out; // sorted by target
  std::vector<bool> final;
};

Small small_of(const ProductGraph& g) {
  Small s;
  s.n = static_cast<int>(g.size());
  s.out.resize(g.size());
  for (const auto& e : g.edges) s.out[e.src].push_back({e.dst, e.weight});
  for (auto& o : s.out) std::sort(o.begin(), o.end());
  s.final = g.final;
  return s;
}

struct Steps {
  std::size_t used = 0, limit;
  void tick() {
    if (++used > limit) throw Error(ErrorCode::BUDGET_EXCEEDED, "oracle search exceeded its step budget");
  }
};

// Simple lassos from `start`; calls fn(path, i) where path[i..] is the cycle
// closed by an edge back to path[i].
void simple_lassos(const Small& s, int start, std::size_t max_prefix, std::size_t max_cycle, Steps& st,
                   const std::function<void(const std::vector<int>&, std::size_t)>& fn) {
  std::vector<int> path{start};
  std::vector<int> pos(s.n, -1);
  pos[start] = 0;
  auto rec = [&](auto& self) -> void {
    st.tick();
    int u = path.back();
    for (auto [x, w] : s.out[u]) {
      (void)w;
      if (pos[x] >= 0) {
        std::size_t i = static_cast<std::size_t>(pos[x]);
        if (i <= max_prefix && path.size() - i <= max_cycle) fn(path, i);
        continue;
      }
      if (path.size() >= max_prefix + max_cycle) continue;
      pos[x] = static_cast<int>(path.size());
      path.push_back(x);
      self(self);
      path.pop_back();
      pos[x] = -1;
    }
  };
  rec(rec);
}

std::int64_t weight_of(const Small& s, int u, int v) {
  for (auto [x, w] : s.out[u])
    if (x == v) return w;
  throw Error(ErrorCode::INTERNAL, "oracle: missing edge");
}

Lasso<std::int64_t> costs_of(const Small& s, const std::vector<int>& path, std::size_t i) {
  Lasso<std::int64_t> c;
  for (std::size_t j = 0; j + 1 < path.size(); ++j)
    (j < i ? c.prefix : c.cycle).push_back(weight_of(s, path[j], path[j + 1]));
  c.cycle.push_back(weight_of(s, path.back(), path[i]));
  return c;
}

// reach[u][v]: v reachable from u in zero or more steps.
std::vector<std::vector<bool>> closure(const Small& s) {
  std::vector<std::vector<bool>> r(s.n, std::vector<bool>(s.n, false));
  for (int u = 0; u < s.n; ++u) {
    std::deque<int> q{u};
    r[u][u] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (auto [x, w] : s.out[v]) {
        (void)w;
        if (!r[u][x]) {
          r[u][x] = true;
          q.push_back(x);
        }
      }
    }
  }
  return r;
}

// Every simple cycle once, rooted at its smallest vertex.
std::vector<std::vector<int>> simple_cycles(const Small& s, Steps& st) {
  std::vector<std::vector<int>> cycles;
  for (int root = 0; root < s.n; ++root) {
    std::vector<int> path{root};
    std::vector<bool> on(s.n, false);
    on[root] = true;
    auto rec = [&](auto& self) -> void {
      st.tick();
      for (auto [x, w] : s.out[path.back()]) {
        (void)w;
        if (x == root) {
          cycles.push_back(path);
        } else if (x > root && !on[x]) {
          on[x] = true;
          path.push_back(x);
          self(self);
          path.pop_back();
          on[x] = false;
        }
      }
    };
    rec(rec);
  }
  return cycles;
}

std::size_t or_default(std::size_t v, std::size_t d) { return v ? v : d; }

ExtRational brute_impair_small(const Small& s, const std::vector<int>& starts, const Aggregator& agg,
                               const OracleBudget& b) {
  if (static_cast<std::size_t>(s.n) > b.max_vertices)
    throw Error(ErrorCode::BUDGET_EXCEEDED, "graph too large for the oracle");
  const std::size_t n = static_cast<std::size_t>(s.n);
  const std::size_t max_prefix = or_default(b.max_prefix, n * n);
  const std::size_t max_cycle = or_default(b.max_cycle, n);
  Steps st{0, b.max_steps};
  ExtRational best;
  auto offer = [&](const Rational& v) {
    if (!best || v < *best) best = v;
  };
  auto accepting = [&](const std::vector<int>& path, std::size_t i) {
    for (std::size_t j = i; j < path.size(); ++j)
      if (s.final[path[j]]) return true;
    return false;
  };
  switch (agg.kind) {
  case AggKind::SUP:
  case AggKind::LIMSUP:
    for (int v : starts)
      simple_lassos(s, v, max_prefix, max_cycle, st, [&](const std::vector<int>& path, std::size_t i) {
        if (accepting(path, i)) offer(eval_aggregator(agg, costs_of(s, path, i)));
      });
    return best;
  case AggKind::MEAN: {
    auto reach = closure(s);
    auto cycles = simple_cycles(s, st);
    std::vector<int> acc_vertices;
    for (const auto& c : cycles) {
      bool acc = false;
      for (int v : c) acc = acc || s.final[v];
      if (acc) acc_vertices.push_back(c.front());
    }
    for (const auto& c : cycles) {
      if (c.size() > max_cycle) continue;
      int x = c.front();
      bool from_start = false;
      for (int v : starts) from_start = from_start || reach[v][x];
      bool linked = false;
      for (int a : acc_vertices) linked = linked || (reach[x][a] && reach[a][x]);
      if (!from_start || !linked) continue;
      Rational sum(0);
      for (std::size_t j = 0; j < c.size(); ++j) sum += Rational(weight_of(s, c[j], c[(j + 1) % c.size()]));
      offer(sum / Rational(static_cast<std::int64_t>(c.size())));
    }
    return best;
  }
  case AggKind::DSUM: {
    // Vertices that can still reach an accepting cycle; any run staying among
    // them can be completed into an accepting one at vanishing extra cost.
    auto reach = closure(s);
    auto cycles = simple_cycles(s, st);
    Small k = s;
    std::vector<bool> keep(n, false);
    for (const auto& c : cycles) {
      bool acc = false;
      for (int v : c) acc = acc || s.final[v];
      if (!acc) continue;
      for (std::size_t u = 0; u < n; ++u)
        if (reach[u][c.front()]) keep[u] = true;
    }
    for (std::size_t u = 0; u < n; ++u) {
      k.out[u].clear();
      if (!keep[u]) continue;
      for (auto e : s.out[u])
        if (keep[e.first]) k.out[u].push_back(e);
    }
    for (int v : starts) {
      if (!keep[v]) continue;
      simple_lassos(k, v, max_prefix, max_cycle, st, [&](const std::vector<int>& path, std::size_t i) {
        offer(eval_aggregator(agg, costs_of(k, path, i)));
      });
    }
    return best;
  }
  }
  return best;
}

} // namespace

void enumerate_accepting_lassos(const ProductGraph& g, const OracleBudget& b,
                                const std::function<void(const Lasso<int>&)>& fn) {
  if (g.size() > b.max_vertices) throw Error(ErrorCode::BUDGET_EXCEEDED, "graph too large for the oracle");
  Small s = small_of(g);
  const std::size_t n = g.size();
  Steps st{0, b.max_steps};
  for (int v : g.initial)
    simple_lassos(s, v, or_default(b.max_prefix, n * n), or_default(b.max_cycle, n), st,
                  [&](const std::vector<int>& path, std::size_t i) {
                    bool acc = false;
                    for (std::size_t j = i; j < path.size(); ++j) acc = acc || g.final[path[j]];
                    if (!acc) return;
                    Lasso<int> l;
                    l.prefix.assign(path.begin(), path.begin() + static_cast<long>(i));
                    l.cycle.assign(path.begin() + static_cast<long>(i), path.end());
                    fn(l);
                  });
}

std::vector<Lasso<int>> accepting_lassos(const ProductGraph& g, const OracleBudget& b) {
  std::vector<Lasso<int>> r;
  enumerate_accepting_lassos(g, b, [&](const Lasso<int>& l) { r.push_back(l); });
  return r;
}

ExtRational brute_impair_threshold(const ProductGraph& g, const Aggregator& agg, const OracleBudget& b) {
  return brute_impair_small(small_of(g), g.initial, agg, b);
}

ExtRational brute_repair_threshold(const GameArena& a, const Aggregator& agg, const OracleBudget& b) {
  const int n = static_cast<int>(a.size());
  const int nmin = a.min_count;
  auto out = a.out_edges();
  std::map<int, ExtRational> value; // start -> max over strategies
  for (int v : a.initial) value[v] = Rational(0);
  // Max choices are fixed lazily: only vertices reachable under the choices
  // made so far are branched on, so strategies differing elsewhere are
  // evaluated once.
  std::vector<int> sigma(n, -1);
  std::size_t leaves = 0;
  auto evaluate = [&] {
    if (++leaves > b.max_strategies) throw Error(ErrorCode::BUDGET_EXCEEDED, "too many Max strategies");
    Small s;
    s.n = nmin;
    s.out.resize(nmin);
    s.final.assign(a.final.begin(), a.final.begin() + nmin);
    std::map<std::pair<int, int>, std::int64_t> w;
    for (const auto& e : a.edges) {
      if (a.max_owned[e.src] || sigma[e.dst] < 0) continue;
      auto key = std::make_pair(e.src, sigma[e.dst]);
      auto it = w.find(key);
      if (it == w.end() || e.weight < it->second) w[key] = e.weight;
    }
    for (auto [k, wt] : w) s.out[k.first].push_back({k.second, wt});
    for (auto& o : s.out) std::sort(o.begin(), o.end());
    for (int v : a.initial) {
      ExtRational r = brute_impair_small(s, {v}, agg, b);
      if (ext_less(value[v], r)) value[v] = r;
    }
  };
  auto rec = [&](auto& self) -> void {
    std::vector<bool> vis(n, false);
    std::deque<int> q;
    for (int v : a.initial) {
      vis[v] = true;
      q.push_back(v);
    }
    int open = -1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (a.max_owned[v] && !out[v].empty() && sigma[v] < 0) {
        if (open < 0 || v < open) open = v;
        continue;
      }
      auto visit = [&](int x) {
        if (!vis[x]) {
          vis[x] = true;
          q.push_back(x);
        }
      };
      if (a.max_owned[v]) visit(sigma[v]);
      else
        for (int e : out[v]) visit(a.edges[e].dst);
    }
    if (open < 0) return evaluate();
    for (int e : out[open]) {
      sigma[open] = a.edges[e].dst;
      self(self);
    }
    sigma[open] = -1;
  };
  rec(rec);
  ExtRational tau = Rational(0);
  if (a.initial.empty()) return std::nullopt;
  for (const auto& grp : start_groups(a)) {
    ExtRational g = std::nullopt;
    for (int v : grp)
      if (ext_less(value[v], g)) g = value[v];
    if (ext_less(tau, g)) tau = g;
  }
  return tau;
}

ExtRational brute_repair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& spec,
                                   const Aggregator& agg, const OracleBudget& b) {
  return brute_repair_threshold(build_arena(build_product(k, t, spec)), agg, b);
}

std::optional<Lasso<int>> bounded_bad_rewrite(const RepairMachine& tq, const NBA& a, const Lasso<Symbol>& input,
                                              const Rational& tau, const Aggregator& agg, const OracleBudget& b) {
  RepairMachine tpp = bad_rewrite_machine(tq, a);
  tpp.agg = agg;
  if (tpp.states.empty()) return std::nullopt;
  ProductGraph g = machine_lasso_product(tpp, input);
  Small s = small_of(g);
  const std::size_t n = g.size();
  const bool discounted = agg.kind == AggKind::DSUM;
  const std::size_t max_prefix = or_default(b.max_prefix, discounted ? n * n : n);
  const std::size_t max_cycle = or_default(b.max_cycle, n);
  Steps st{0, b.max_steps};

  // Accepting simple cycles through each vertex, with their cost sequences.
  std::vector<std::vector<std::vector<int>>> cycles_at(n);
  for (auto& c : simple_cycles(s, st)) {
    if (c.size() > max_cycle) continue;
    bool acc = false;
    for (int v : c) acc = acc || s.final[v];
    if (!acc) continue;
    for (std::size_t r = 0; r < c.size(); ++r) {
      std::vector<int> rot(c.begin() + static_cast<long>(r), c.end());
      rot.insert(rot.end(), c.begin(), c.begin() + static_cast<long>(r));
      cycles_at[rot.front()].push_back(rot);
    }
  }
  auto cycle_costs = [&](const std::vector<int>& c) {
    std::vector<std::int64_t> w;
    for (std::size_t j = 0; j < c.size(); ++j) w.push_back(weight_of(s, c[j], c[(j + 1) % c.size()]));
    return w;
  };

  if (!discounted && agg.kind != AggKind::SUP) {
    // The prefix does not matter: breadth-first access paths suffice.
    std::vector<int> parent(n, -2), depth(n, 0);
    std::deque<int> q;
    for (int v : g.initial) {
      parent[v] = -1;
      q.push_back(v);
    }
    std::vector<int> order;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      order.push_back(v);
      if (static_cast<std::size_t>(depth[v]) >= max_prefix) continue;
      for (auto [x, w] : s.out[v]) {
        (void)w;
        if (parent[x] == -2) {
          parent[x] = v;
          depth[x] = depth[v] + 1;
          q.push_back(x);
        }
      }
    }
    for (int v : order)
      for (const auto& c : cycles_at[v]) {
        Lasso<std::int64_t> cost{{}, cycle_costs(c)};
        if (eval_aggregator(agg, cost) <= tau) {
          Lasso<int> l;
          for (int x = parent[v]; x >= 0; x = parent[x]) l.prefix.push_back(x);
          std::reverse(l.prefix.begin(), l.prefix.end());
          l.cycle = c;
          return l;
        }
      }
    return std::nullopt;
  }

  // DSUM / SUP: depth-first over prefixes, pruning dominated partial costs.
  std::map<std::pair<int, std::size_t>, Rational> best;
  std::vector<int> path;
  std::vector<std::int64_t> pcost;
  std::optional<Lasso<int>> found;
  auto rec = [&](auto& self, int v, const Rational& partial, const Rational& scale) -> void {
    st.tick();
    path.push_back(v);
    for (const auto& c : cycles_at[v]) {
      Lasso<std::int64_t> cost{pcost, cycle_costs(c)};
      if (eval_aggregator(agg, cost) <= tau) {
        found = Lasso<int>{std::vector<int>(path.begin(), path.end() - 1), c};
        return;
      }
    }
    if (path.size() <= max_prefix) {
      for (auto [x, w] : s.out[v]) {
        Rational np = discounted ? partial + scale * Rational(w) : std::max(partial, Rational(w));
        if (np > tau) continue;
        auto key = std::make_pair(x, path.size());
        auto it = best.find(key);
        if (it != best.end() && it->second <= np) continue;
        best[key] = np;
        pcost.push_back(w);
        self(self, x, np, discounted ? scale * *agg.lambda : scale);
        pcost.pop_back();
        if (found) return;
      }
    }
    path.pop_back();
  };
  for (int v : g.initial) {
    rec(rec, v, Rational(0), Rational(1));
    if (found) return found;
    path.clear();
    pcost.clear();
  }
  return std::nullopt;
}

// --- random instances ----------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GeneratorConfig, max_kripke_states, max_rm_states, max_nba_states,
                                                max_weight, max_output_length, extra_edge_percent,
                                                accepting_percent, symbols, lambdas, max_strategies,
                                                max_product_vertices, finite_repair_percent)

GeneratorConfig parse_generator_config(const std::string& json_text) {
  try {
    return nlohmann::json::parse(json_text).get<GeneratorConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::PARSE, std::string("generator config: ") + e.what());
  }
}

std::string generator_config_json(const GeneratorConfig& c) { return nlohmann::json(c).dump(2); }

namespace {

struct Draw {
  std::mt19937_64 rng;
  int below(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool percent(int p) { return below(100) < p; }
};

RandomInstance draw_instance(Draw& d, const GeneratorConfig& c) {
  const int nsym = static_cast<int>(c.symbols.size());
  RandomInstance inst;
  auto& k = inst.kripke;
  int nk = 1 + d.below(c.max_kripke_states);
  for (int s = 0; s < nk; ++s) {
    k.states.push_back("s" + std::to_string(s));
    k.label.push_back(c.symbols[d.below(nsym)]);
    k.edges.push_back({s, d.below(nk)});
    if (d.percent(c.extra_edge_percent)) k.edges.push_back({s, d.below(nk)});
  }
  k.initial.push_back(0);
  if (nk > 1 && d.percent(c.extra_edge_percent)) k.initial.push_back(1);
  canonicalize(k);

  auto& t = inst.rm;
  int nq = 1 + d.below(c.max_rm_states);
  t.in_alphabet = c.symbols;
  t.out_alphabet = c.symbols;
  for (int q = 0; q < nq; ++q) {
    t.states.push_back("q" + std::to_string(q));
    t.accepting.push_back(d.percent(c.accepting_percent));
  }
  t.initial.push_back(0);
  for (int q = 0; q < nq; ++q)
    for (int s = 0; s < nsym; ++s) {
      int copies = 1 + (d.percent(c.extra_edge_percent) ? 1 : 0);
      for (int i = 0; i < copies; ++i) {
        RmEdge e{q, s, d.below(nq), {}, d.below(c.max_weight + 1)};
        int len = d.below(c.max_output_length + 1);
        if (len == 0 && d.percent(50)) len = 1; // keep epsilon outputs rare
        for (int j = 0; j < len; ++j) e.out.push_back(d.below(nsym));
        t.edges.push_back(e);
      }
    }
  canonicalize(t);

  auto& b = inst.nba;
  int np = 1 + d.below(c.max_nba_states);
  b.alphabet = c.symbols;
  for (int p = 0; p < np; ++p) {
    b.states.push_back("p" + std::to_string(p));
    b.accepting.push_back(d.percent(c.accepting_percent));
  }
  b.initial.push_back(0);
  for (int p = 0; p < np; ++p)
    for (int s = 0; s < nsym; ++s) {
      if (d.percent(80)) b.edges.push_back({p, s, d.below(np)});
      if (d.percent(c.extra_edge_percent)) b.edges.push_back({p, s, d.below(np)});
    }
  canonicalize(b);
  inst.lambda = Rational::parse(c.lambdas[d.below(static_cast<int>(c.lambdas.size()))]);
  return inst;
}

bool fits(const RandomInstance& inst, const GeneratorConfig& c, bool need_repair) {
  auto g = build_product(inst.kripke, inst.rm, inst.nba);
  if (g.size() > c.max_product_vertices) return false;
  auto a = build_arena(g);
  auto out = a.out_edges();
  std::size_t total = 1;
  for (std::size_t v = 0; v < a.size(); ++v)
    if (a.max_owned[v] && !out[v].empty()) {
      total *= out[v].size();
      if (total > c.max_strategies) return false;
    }
  OracleBudget b;
  b.max_strategies = c.max_strategies;
  if (need_repair) return brute_repair_threshold(a, Aggregator::sup(), b).has_value();
  return brute_impair_threshold(g, Aggregator::sup(), b).has_value();
}

} // namespace

RandomInstance random_instance(std::uint64_t seed, const GeneratorConfig& c) {
  if (c.symbols.empty() || c.lambdas.empty() || c.max_kripke_states < 1 || c.max_rm_states < 1 ||
      c.max_nba_states < 1 || c.max_weight < 0 || c.max_output_length < 0)
    throw Error(ErrorCode::INVALID_MODEL, "generator config out of range");
  Draw d{std::mt19937_64(seed)};
  for (int attempt = 0; attempt < 10000; ++attempt) {
    bool need_repair = d.percent(c.finite_repair_percent);
    RandomInstance inst = draw_instance(d, c);
    if (fits(inst, c, need_repair)) return inst;
  }
  throw Error(ErrorCode::BUDGET_EXCEEDED, "no instance within budget for seed " + std::to_string(seed));
}

std::string OracleLine::str() const {
  std::ostringstream os;
  os << "SEED " << seed << " AGG " << to_string(agg) << " PROBLEM " << (repair ? "REPAIR" : "IMPAIR") << " SOLVER "
     << ext_str(solver) << " ORACLE " << ext_str(oracle) << " VERDICT " << (ok() ? "OK" : "MISMATCH");
  return os.str();
}

std::vector<OracleLine> run_oracle(std::uint64_t seed, std::size_t count, const GeneratorConfig& c,
                                   const OracleBudget& b) {
  std::vector<OracleLine> lines;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t s = seed + i;
    RandomInstance inst = random_instance(s, c);
    auto g = build_product(inst.kripke, inst.rm, inst.nba);
    auto a = build_arena(g);
    for (AggKind kind : {AggKind::DSUM, AggKind::MEAN, AggKind::SUP, AggKind::LIMSUP}) {
      Aggregator agg = kind == AggKind::DSUM ? Aggregator::dsum(inst.lambda) : Aggregator{kind, std::nullopt};
      OracleLine imp{s, kind, false, impair_threshold(g, agg).value, brute_impair_threshold(g, agg, b)};
      OracleLine rep{s, kind, true, solve_repair(a, agg).threshold.value, brute_repair_threshold(a, agg, b)};
      lines.push_back(imp);
      lines.push_back(rep);
    }
  }
  return lines;
}

} // namespace omegarepair
