#include "omegarepair/impair.hpp"
#include "omegarepair/error.hpp"

#include <algorithm>
#include <sstream>

namespace omegarepair {

namespace {

struct MeanAnalysis {
  std::optional<CycleResult> best; // optimal cycle, empty prefix
  bool attained = false;
  std::vector<int> scc;            // component of the optimal cycle
};

MeanAnalysis analyze_mean(const ProductGraph& p) {
  MeanAnalysis r;
  auto adj = p.adjacency();
  auto reach = reachable_from(adj, p.initial);
  auto scc = strongly_connected_components(adj);
  std::vector<std::vector<int>> comps(scc.count);
  for (std::size_t v = 0; v < p.size(); ++v) comps[scc.comp[v]].push_back(static_cast<int>(v));
  auto wg = WeightedDigraph::from(p);
  for (int c = 0; c < scc.count; ++c) {
    if (!scc.nontrivial[c] || !reach[comps[c].front()]) continue;
    bool has_final = false;
    for (int v : comps[c]) has_final = has_final || p.final[v];
    if (!has_final) continue;
    auto cr = min_mean_cycle_within(wg, comps[c], &p.final);
    bool att = false;
    for (int v : cr.cycle.cycle) att = att || p.final[v];
    bool better = !r.best || cr.value < r.best->value || (cr.value == r.best->value && att && !r.attained);
    if (better) {
      r.best = cr;
      r.attained = att;
      r.scc = comps[c];
    }
  }
  return r;
}

std::vector<bool> mask_of(std::size_t n, const std::vector<int>& vs) {
  std::vector<bool> m(n, false);
  for (int v : vs) m[v] = true;
  return m;
}

// Edge filter keeping edges inside a vertex set.
std::vector<bool> edges_within(const ProductGraph& g, const std::vector<bool>& in) {
  std::vector<bool> ok(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) ok[i] = in[g.edges[i].src] && in[g.edges[i].dst];
  return ok;
}

// Walk from `from` back to itself passing through `via`, inside `in`.
std::vector<int> closed_walk(const ProductGraph& g, const std::vector<bool>& in, int from, int via) {
  auto ok = edges_within(g, in);
  std::vector<int> there, back;
  if (from == via) {
    // any cycle through `from`
    std::vector<bool> goal(g.size(), false);
    std::vector<int> best;
    for (const auto& e : g.edges)
      if (e.src == from && in[e.dst]) {
        goal.assign(g.size(), false);
        goal[from] = true;
        auto p = bfs_path(g, {e.dst}, goal, &ok);
        if (!p.empty() && (best.empty() || p.size() + 1 < best.size())) {
          best = {from};
          best.insert(best.end(), p.begin(), p.end() - 1);
        }
      }
    return best;
  }
  there = bfs_path(g, {from}, mask_of(g.size(), {via}), &ok);
  back = bfs_path(g, {via}, mask_of(g.size(), {from}), &ok);
  std::vector<int> walk(there.begin(), there.end() - 1);
  walk.insert(walk.end(), back.begin(), back.end() - 1);
  return walk;
}

Rational walk_cost(const ProductGraph& g, const std::vector<int>& cyc) {
  Lasso<int> l{{}, cyc};
  auto c = lasso_costs(g, l);
  Rational s(0);
  for (auto w : c.cycle) s += Rational(w);
  return s;
}

// Rotate `cycle` so that it starts at the first vertex reached by BFS from
// the initial vertices, and return the access path.
Lasso<int> attach(const ProductGraph& g, std::vector<int> cycle) {
  auto on = mask_of(g.size(), cycle);
  auto path = bfs_path(g, g.initial, on);
  if (path.empty()) throw Error(ErrorCode::INTERNAL, "cycle unreachable from the initial vertices");
  auto it = std::find(cycle.begin(), cycle.end(), path.back());
  std::rotate(cycle.begin(), it, cycle.end());
  return {std::vector<int>(path.begin(), path.end() - 1), cycle};
}

} // namespace

ThresholdResult impair_threshold(const ProductGraph& g, const Aggregator& agg) {
  ProductGraph p = prune_to_accepting_lassos(g);
  auto none = [] {
    return make_threshold(Orientation::IMPAIR, std::nullopt, Attainment::ATTAINED, MemoryClass::POSITIONAL);
  };
  if (p.initial.empty()) return none();
  switch (agg.kind) {
  case AggKind::DSUM: {
    if (!agg.lambda) throw Error(ErrorCode::BAD_AGGREGATOR, "DSUM needs a discount factor");
    auto vm = min_dsum_single(p, *agg.lambda);
    Rational best = vm.values[p.initial.front()];
    for (int v : p.initial) best = std::min(best, vm.values[v]);
    return make_threshold(Orientation::IMPAIR, best, Attainment::INFIMUM_ONLY, MemoryClass::FINITE);
  }
  case AggKind::MEAN: {
    auto m = analyze_mean(p);
    if (!m.best) return none();
    auto r = m.attained
                 ? make_threshold(Orientation::IMPAIR, m.best->value, Attainment::ATTAINED, MemoryClass::POSITIONAL)
                 : make_threshold(Orientation::IMPAIR, m.best->value, Attainment::INFIMUM_ONLY,
                                  MemoryClass::INFINITE_FOR_EXACT);
    return r;
  }
  case AggKind::SUP: return minimax_lasso_sup(p);
  case AggKind::LIMSUP: return min_limsup_cycle(p);
  }
  throw Error(ErrorCode::BAD_AGGREGATOR, "unknown aggregator");
}

ThresholdResult impair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& bad,
                                 const ProductOptions& opt) {
  return impair_threshold(build_product(k, t, bad, opt), t.agg);
}

// Witness runs are computed on the pruned graph and mapped back to g's ids.
Lasso<int> impair_witness_run(const ProductGraph& g, const Aggregator& agg, const Rational& epsilon) {
  if (epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  ProductGraph p = prune_to_accepting_lassos(g);
  if (p.initial.empty()) throw Error(ErrorCode::INFEASIBLE, "no accepting lasso: the system is safe at every threshold");
  Lasso<int> run;
  switch (agg.kind) {
  case AggKind::DSUM: {
    if (!agg.lambda) throw Error(ErrorCode::BAD_AGGREGATOR, "DSUM needs a discount factor");
    const Rational& lambda = *agg.lambda;
    auto vm = min_dsum_single(p, lambda);
    int v = p.initial.front();
    for (int x : p.initial)
      if (vm.values[x] < vm.values[v]) v = x;
    // Smallest k with lambda^k * W / (1 - lambda) <= epsilon.
    Rational tail = Rational(p.max_weight()) / (Rational(1) - lambda);
    std::vector<int> walk{v};
    while (tail > epsilon) {
      tail *= lambda;
      walk.push_back(vm.strategy_min[walk.back()]);
    }
    auto scc = strongly_connected_components(p.adjacency());
    std::vector<bool> goal(p.size(), false);
    for (std::size_t x = 0; x < p.size(); ++x) goal[x] = p.final[x] && scc.nontrivial[scc.comp[x]];
    auto path = bfs_path(p, {walk.back()}, goal);
    walk.insert(walk.end(), path.begin() + 1, path.end());
    int f = walk.back();
    std::vector<bool> comp(p.size(), false);
    for (std::size_t x = 0; x < p.size(); ++x) comp[x] = scc.comp[x] == scc.comp[f];
    run.prefix.assign(walk.begin(), walk.end() - 1);
    run.cycle = closed_walk(p, comp, f, f);
    break;
  }
  case AggKind::MEAN: {
    auto m = analyze_mean(p);
    if (!m.best) throw Error(ErrorCode::INFEASIBLE, "no accepting lasso");
    if (m.attained) {
      auto cyc = m.best->cycle.cycle;
      auto it = std::find_if(cyc.begin(), cyc.end(), [&](int x) { return p.final[x]; });
      std::rotate(cyc.begin(), it, cyc.end());
      run = attach(p, cyc);
      break;
    }
    const auto& c1 = m.best->cycle.cycle;
    auto in = mask_of(p.size(), m.scc);
    int x = c1.front();
    int f = -1;
    for (int v : m.scc)
      if (p.final[v]) {
        f = v;
        break;
      }
    auto ret = closed_walk(p, in, x, f);
    Rational d2 = walk_cost(p, ret);
    auto n2 = static_cast<std::int64_t>(ret.size());
    unsigned i = mean_round_index(static_cast<std::int64_t>(m.best->d), m.best->n,
                                  static_cast<std::int64_t>(d2.num()), n2, epsilon);
    std::vector<int> cycle;
    for (std::uint64_t j = 0; j + 1 < (std::uint64_t{1} << (i + 1)); ++j) cycle.insert(cycle.end(), c1.begin(), c1.end());
    cycle.insert(cycle.end(), ret.begin(), ret.end());
    auto path = bfs_path(p, p.initial, mask_of(p.size(), {x}));
    run.prefix.assign(path.begin(), path.end() - 1);
    run.cycle = cycle;
    break;
  }
  case AggKind::SUP:
  case AggKind::LIMSUP: {
    auto r = agg.kind == AggKind::SUP ? minimax_lasso_sup(p) : min_limsup_cycle(p);
    if (!r.witness) throw Error(ErrorCode::INFEASIBLE, "no accepting lasso");
    run = *r.witness;
    break;
  }
  }
  // Map back to g's vertex ids.
  auto back = [&](int v) { return g.index_of(p.vertices[v]); };
  for (int& v : run.prefix) v = back(v);
  for (int& v : run.cycle) v = back(v);
  return run;
}

ImpairWitness make_witness(const ProductGraph& g, const KripkeStructure& k, const RepairMachine& t,
                           const Lasso<int>& run) {
  ImpairWitness w;
  w.run_ids = run;
  for (int v : run.prefix) w.run.prefix.push_back(g.vertices[v]);
  for (int v : run.cycle) w.run.cycle.push_back(g.vertices[v]);
  for (int v : run.prefix) w.trace.prefix.push_back(k.label[g.vertices[v].kripke]);
  for (int v : run.cycle) w.trace.cycle.push_back(k.label[g.vertices[v].kripke]);
  auto out_of = [&](int u, int v, std::vector<Symbol>& dst) {
    for (const auto& e : g.edges)
      if (e.src == u && e.dst == v) {
        for (int o : t.edges[e.rm_edge].out) dst.push_back(t.out_alphabet[o]);
        return;
      }
    throw Error(ErrorCode::INTERNAL, "witness uses a missing edge");
  };
  for (std::size_t i = 0; i < run.prefix.size(); ++i) out_of(run.prefix[i], run.at(i + 1), w.rewrite.prefix);
  for (std::size_t i = 0; i < run.cycle.size(); ++i)
    out_of(run.cycle[i], run.cycle[(i + 1) % run.cycle.size()], w.rewrite.cycle);
  if (w.rewrite.cycle.empty()) throw Error(ErrorCode::INFEASIBLE, "witness rewrite is a finite word");
  w.costs = lasso_costs(g, run);
  w.cost = eval_aggregator(t.agg, w.costs);
  return w;
}

ImpairWitness impair_witness(const KripkeStructure& k, const RepairMachine& t, const NBA& bad,
                             const Rational& epsilon, const ProductOptions& opt) {
  auto g = build_product(k, t, bad, opt);
  return make_witness(g, k, t, impair_witness_run(g, t.agg, epsilon));
}

std::string ImpairWitness::serialize() const {
  auto join = [](const std::vector<Symbol>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "." : "") + xs[i];
    return s;
  };
  std::ostringstream os;
  os << "TRACE " << join(trace.prefix) << "|" << join(trace.cycle) << "\n";
  os << "REWRITE " << join(rewrite.prefix) << "|" << join(rewrite.cycle) << "\n";
  os << "COST " << cost.str() << "\n";
  return os.str();
}

Rational mean_round_value(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2, unsigned i) {
  BigInt reps = (BigInt(1) << (i + 1)) - 1;
  return Rational(reps * d1 + BigInt(i) * d2, reps * n1 + BigInt(i) * n2);
}

Rational mean_round_simulated(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2, unsigned i) {
  BigInt d = 0, n = 0, copies = 1;
  for (unsigned j = 0; j <= i; ++j) {
    d += copies * d1;
    n += copies * n1;
    if (j < i) {
      d += d2;
      n += n2;
    }
    copies *= 2;
  }
  return Rational(d, n);
}

unsigned mean_round_index(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2,
                          const Rational& epsilon) {
  if (epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  Rational target(d1, n1);
  for (unsigned i = 1; i < 4096; ++i) {
    Rational a = mean_round_value(d1, n1, d2, n2, i);
    Rational gap = a > target ? a - target : target - a;
    if (gap <= epsilon) return i;
  }
  throw Error(ErrorCode::INTERNAL, "round index search did not terminate");
}

} // namespace omegarepair
