#include "omegarepair/repair.hpp"
#include "omegarepair/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace omegarepair {

const char* to_string(ExitKind k) {
  switch (k) {
  case ExitKind::AFTER_STEPS: return "AFTER_STEPS";
  case ExitKind::AFTER_ANCHOR_HITS: return "AFTER_ANCHOR_HITS";
  case ExitKind::AFTER_ACCEPTING_VISIT: return "AFTER_ACCEPTING_VISIT";
  case ExitKind::FOREVER: return "FOREVER";
  }
  return "?";
}

int FiniteMemoryStrategy::successor(int mode, int v) const {
  const auto& m = modes.at(mode).map;
  auto it = std::lower_bound(m.begin(), m.end(), std::make_pair(v, -1));
  return it != m.end() && it->first == v ? it->second : -1;
}

std::string FiniteMemoryStrategy::serialize() const {
  std::ostringstream os;
  os << "STRATEGY\n";
  if (epsilon) os << "EPSILON " << epsilon->str() << "\n";
  os << "STEPS " << k << "\n";
  for (int s : starts) os << "START " << s << "\n";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    os << "MODE " << i << "\n";
    for (auto [u, m] : modes[i].map) os << "MAP " << u << " -> " << m << "\n";
    const auto& e = modes[i].exit;
    os << "EXIT " << to_string(e.kind);
    if (e.kind == ExitKind::AFTER_STEPS) os << " " << e.n;
    if (e.kind == ExitKind::AFTER_ANCHOR_HITS) os << " " << e.anchor << " " << e.n;
    if (e.kind != ExitKind::FOREVER) os << " NEXT " << modes[i].next;
    os << "\n";
  }
  return os.str();
}

FiniteMemoryStrategy FiniteMemoryStrategy::parse(const std::string& text) {
  FiniteMemoryStrategy s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::PARSE, "line " + std::to_string(lineno) + ": " + msg);
  };
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (!header) {
      if (kw != "STRATEGY") fail("expected STRATEGY header");
      header = true;
      continue;
    }
    if (kw == "EPSILON") {
      std::string r;
      ls >> r;
      s.epsilon = Rational::parse(r);
    } else if (kw == "STEPS") {
      if (!(ls >> s.k)) fail("bad STEPS");
    } else if (kw == "START") {
      int v;
      if (!(ls >> v)) fail("bad START");
      s.starts.push_back(v);
    } else if (kw == "MODE") {
      std::size_t i;
      if (!(ls >> i) || i != s.modes.size()) fail("modes must be numbered consecutively");
      s.modes.emplace_back();
    } else if (kw == "MAP") {
      int u, m;
      std::string arrow;
      if (s.modes.empty() || !(ls >> u >> arrow >> m) || arrow != "->") fail("bad MAP");
      s.modes.back().map.emplace_back(u, m);
    } else if (kw == "EXIT") {
      if (s.modes.empty()) fail("EXIT outside a mode");
      std::string kind;
      ls >> kind;
      auto& mode = s.modes.back();
      if (kind == "FOREVER") {
        mode.exit.kind = ExitKind::FOREVER;
      } else {
        if (kind == "AFTER_STEPS") {
          mode.exit.kind = ExitKind::AFTER_STEPS;
          if (!(ls >> mode.exit.n)) fail("bad step count");
        } else if (kind == "AFTER_ANCHOR_HITS") {
          mode.exit.kind = ExitKind::AFTER_ANCHOR_HITS;
          if (!(ls >> mode.exit.anchor >> mode.exit.n)) fail("bad anchor rule");
        } else if (kind == "AFTER_ACCEPTING_VISIT") {
          mode.exit.kind = ExitKind::AFTER_ACCEPTING_VISIT;
        } else {
          fail("unknown exit rule " + kind);
        }
        std::string nx;
        if (!(ls >> nx >> mode.next) || nx != "NEXT") fail("missing NEXT");
      }
    } else {
      fail("unknown keyword " + kw);
    }
  }
  if (!header) fail("empty strategy");
  for (auto& m : s.modes) std::sort(m.map.begin(), m.map.end());
  return s;
}

std::vector<std::vector<int>> start_groups(const GameArena& a) {
  std::map<int, std::vector<int>> g;
  for (int v : a.initial) g[a.vertices[v].kripke].push_back(v);
  std::vector<std::vector<int>> r;
  for (auto& [s, vs] : g) {
    std::sort(vs.begin(), vs.end());
    r.push_back(vs);
  }
  return r;
}

namespace {

std::vector<std::pair<int, int>> to_map(const std::vector<int>& strat, const GameArena& a,
                                        const std::vector<bool>& region) {
  std::vector<std::pair<int, int>> m;
  for (int v = 0; v < static_cast<int>(a.size()); ++v)
    if (!a.max_owned[v] && region[v] && strat[v] >= 0) m.emplace_back(v, strat[v]);
  return m;
}

std::int64_t min_edge_max(const SubArena& s) {
  const GameArena& a = s.arena();
  std::int64_t w = 0;
  for (int v = 0; v < static_cast<int>(a.size()); ++v)
    if (s.contains(v) && !a.max_owned[v])
      for (int e : s.out(v)) w = std::max(w, a.edges[e].weight);
  return w;
}

std::vector<std::int64_t> min_weights(const GameArena& a) {
  std::vector<std::int64_t> ws;
  for (const auto& e : a.edges)
    if (!a.max_owned[e.src]) ws.push_back(e.weight);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

// Min wins "Buchi and eventually only edges of weight <= c" (one Rabin pair).
struct LightBuchi {
  std::vector<bool> win;
  std::vector<int> strategy;
};

LightBuchi solve_light_buchi(const SubArena& s, std::int64_t c) {
  const GameArena& a = s.arena();
  const int n = static_cast<int>(a.size());
  LightBuchi r{std::vector<bool>(n, false), std::vector<int>(n, -1)};
  std::vector<bool> g = s.vertices();
  for (;;) {
    SubArena sub = s.restrict_to(g);
    auto b = solve_buchi_game(sub.with_bound(c), Player::MIN);
    bool any = false;
    for (int v = 0; v < n; ++v) any = any || (g[v] && b.min_winning[v]);
    if (!any) break;
    std::vector<int> rank;
    auto attr = attractor(sub, b.min_winning, Player::MIN, &rank);
    for (int v = 0; v < n; ++v) {
      if (!attr[v]) continue;
      r.win[v] = true;
      g[v] = false;
      if (a.max_owned[v]) continue;
      if (b.min_winning[v]) {
        r.strategy[v] = b.min_strategy[v];
      } else {
        for (int e : sub.out(v)) {
          int x = a.edges[e].dst;
          if (attr[x] && rank[x] < rank[v] && (r.strategy[v] < 0 || x < r.strategy[v])) r.strategy[v] = x;
        }
      }
    }
  }
  return r;
}

// Per group the smallest value; tau* is the worst group.
struct StartChoice {
  ExtRational tau;
  std::vector<int> starts;
};

StartChoice choose_starts(const GameArena& a, const std::vector<ExtRational>& val) {
  StartChoice c;
  c.tau = Rational(0);
  for (const auto& grp : start_groups(a)) {
    int best = grp.front();
    for (int v : grp)
      if (ext_less(val[v], val[best])) best = v;
    c.starts.push_back(best);
    if (ext_less(c.tau, val[best])) c.tau = val[best];
  }
  return c;
}

// Vertices reachable from `starts` when Min follows `strat` and Max is free,
// as a Min-vertex graph (u -> replies of strat[u]).
bool positional_buchi_ok(const SubArena& s, const std::vector<int>& strat, const std::vector<int>& starts) {
  const GameArena& a = s.arena();
  Adjacency adj(a.size());
  for (int u = 0; u < static_cast<int>(a.size()); ++u) {
    if (!s.contains(u) || a.max_owned[u] || strat[u] < 0) continue;
    for (int e : s.out(strat[u])) adj[u].push_back(a.edges[e].dst);
  }
  auto reach = reachable_from(adj, starts);
  Adjacency sub(a.size());
  for (int u = 0; u < static_cast<int>(a.size()); ++u)
    if (reach[u] && !a.final[u])
      for (int x : adj[u])
        if (!a.final[x]) sub[u].push_back(x);
  auto scc = strongly_connected_components(sub);
  for (int u = 0; u < static_cast<int>(a.size()); ++u)
    if (reach[u] && !a.final[u] && scc.nontrivial[scc.comp[u]]) return false;
  return true;
}

RepairSolution infeasible(Orientation o) {
  return {make_threshold(o, std::nullopt, Attainment::ATTAINED, MemoryClass::POSITIONAL), std::nullopt};
}

RepairSolution solve_sup_like(const GameArena& a, AggKind kind, const std::vector<bool>& buchi) {
  const int n = static_cast<int>(a.size());
  SubArena base = SubArena(a).restrict_to(buchi);
  std::vector<ExtRational> val(n);
  std::vector<int> strat(n, -1);
  auto ws = min_weights(a);
  auto groups = start_groups(a);
  std::vector<bool> settled(n, false);
  // Ascending thresholds; a start keeps the first threshold at which it wins.
  for (std::int64_t c : ws) {
    std::vector<bool> win;
    std::vector<int> st;
    if (kind == AggKind::SUP) {
      auto b = solve_buchi_game(base.with_bound(c), Player::MIN);
      win = b.min_winning;
      st = b.min_strategy;
    } else {
      auto r = solve_light_buchi(base, c);
      win = r.win;
      st = r.strategy;
    }
    bool all = true;
    for (const auto& g : groups)
      for (int v : g)
        if (win[v] && !settled[v]) {
          settled[v] = true;
          val[v] = Rational(c);
        }
    for (const auto& g : groups) {
      bool any = false;
      for (int v : g) any = any || settled[v];
      all = all && any;
    }
    if (all) {
      auto choice = choose_starts(a, val);
      if (choice.tau && *choice.tau == Rational(c)) {
        RepairSolution sol;
        sol.threshold = make_threshold(Orientation::REPAIR, choice.tau, Attainment::ATTAINED, MemoryClass::POSITIONAL);
        FiniteMemoryStrategy fs;
        fs.starts = choice.starts;
        fs.modes.push_back({to_map(st, a, win), {ExitKind::FOREVER, 0, -1}, -1});
        sol.strategy = fs;
        return sol;
      }
    }
  }
  return infeasible(Orientation::REPAIR);
}

RepairSolution solve_dsum(const GameArena& a, const Rational& lambda, const std::vector<bool>& buchi,
                          const BuchiGameResult& b, const std::optional<Rational>& epsilon) {
  SubArena sub = SubArena(a).restrict_to(buchi);
  auto vm = solve_dsum_game(sub, lambda);
  std::vector<ExtRational> val(a.size());
  for (std::size_t v = 0; v < a.size(); ++v)
    if (buchi[v]) val[v] = vm.values[v];
  auto choice = choose_starts(a, val);
  RepairSolution sol;
  sol.threshold = make_threshold(Orientation::REPAIR, choice.tau, Attainment::INFIMUM_ONLY, MemoryClass::FINITE);
  FiniteMemoryStrategy fs;
  fs.starts = choice.starts;
  fs.epsilon = epsilon;
  if (epsilon) {
    // Smallest k with lambda^k * W / (1 - lambda) <= epsilon.
    Rational tail = Rational(min_edge_max(sub)) / (Rational(1) - lambda);
    while (tail > *epsilon) {
      tail *= lambda;
      ++fs.k;
    }
  }
  fs.modes.push_back({to_map(vm.strategy_min, a, buchi), {ExitKind::AFTER_STEPS, fs.k, -1}, 1});
  fs.modes.push_back({to_map(b.min_strategy, a, buchi), {ExitKind::FOREVER, 0, -1}, -1});
  sol.strategy = fs;
  return sol;
}

RepairSolution solve_mean(const GameArena& a, const std::vector<bool>& buchi,
                          const std::optional<Rational>& epsilon) {
  const int n = static_cast<int>(a.size());
  std::vector<ExtRational> val(n);
  struct Level {
    std::vector<bool> region;
    Rational top;
    ValueMap vm;
  };
  std::vector<Level> levels;
  std::vector<bool> x = buchi;
  std::optional<Rational> cap;
  for (;;) {
    bool any = false;
    for (int v = 0; v < n; ++v) any = any || x[v];
    if (!any) break;
    SubArena sx = SubArena(a).restrict_to(x);
    auto vm = solve_mean_game(sx);
    std::optional<Rational> top;
    for (int v = 0; v < n; ++v)
      if (x[v] && (!top || vm.values[v] > *top)) top = vm.values[v];
    std::vector<bool> argmax(n, false);
    for (int v = 0; v < n; ++v) argmax[v] = x[v] && vm.values[v] == *top;
    Rational tau = cap && *cap < *top ? *cap : *top;
    // Above the cap Min escapes to the vertices already settled at the cap.
    if (cap && *cap < *top)
      for (int v = 0; v < n; ++v) argmax[v] = x[v] && vm.values[v] >= *cap;
    levels.push_back({x, *top, vm});
    auto r = attractor(sx, argmax, Player::MAX);
    std::vector<bool> rest(n, false);
    for (int v = 0; v < n; ++v) rest[v] = x[v] && !r[v];
    auto b = solve_buchi_game(SubArena(a).restrict_to(rest), Player::MIN);
    for (int v = 0; v < n; ++v) {
      bool keep = rest[v] && b.min_winning[v];
      if (x[v] && !keep) val[v] = tau;
      x[v] = keep;
    }
    cap = tau;
  }
  auto choice = choose_starts(a, val);
  if (!choice.tau) return infeasible(Orientation::REPAIR);
  const Rational tau = *choice.tau;

  // First level whose whole mean game is within tau*.
  const Level* lv = nullptr;
  for (const auto& l : levels)
    if (l.top <= tau) {
      lv = &l;
      break;
    }
  if (!lv) throw Error(ErrorCode::INTERNAL, "mean repair: no level below the threshold");
  SubArena sx = SubArena(a).restrict_to(lv->region);
  auto b = solve_buchi_game(sx, Player::MIN);

  RepairSolution sol;
  FiniteMemoryStrategy fs;
  fs.starts = choice.starts;
  fs.epsilon = epsilon;
  if (lv->vm.certified && positional_buchi_ok(sx, lv->vm.strategy_min, fs.starts)) {
    sol.threshold = make_threshold(Orientation::REPAIR, tau, Attainment::ATTAINED, MemoryClass::POSITIONAL);
    fs.modes.push_back({to_map(lv->vm.strategy_min, a, lv->region), {ExitKind::FOREVER, 0, -1}, -1});
  } else {
    sol.threshold =
        make_threshold(Orientation::REPAIR, tau, Attainment::INFIMUM_ONLY, MemoryClass::INFINITE_FOR_EXACT);
    std::int64_t nmin = 0;
    for (int v = 0; v < n; ++v) nmin += lv->region[v] && !a.max_owned[v];
    std::int64_t w = min_edge_max(sx);
    std::int64_t steps = 1;
    if (epsilon && w > 0) {
      BigInt c = (Rational(2 * nmin * w) / *epsilon).ceil();
      steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(c));
    }
    fs.k = steps;
    fs.modes.push_back({to_map(lv->vm.strategy_min, a, lv->region), {ExitKind::AFTER_STEPS, steps, -1}, 1});
    fs.modes.push_back({to_map(b.min_strategy, a, lv->region), {ExitKind::AFTER_ACCEPTING_VISIT, 0, -1}, 0});
  }
  sol.strategy = fs;
  return sol;
}

} // namespace

RepairSolution solve_repair(const GameArena& a, const Aggregator& agg, const std::optional<Rational>& epsilon) {
  if (epsilon && *epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  auto b = solve_buchi_game(a, Player::MIN);
  for (const auto& g : start_groups(a)) {
    bool any = false;
    for (int v : g) any = any || b.min_winning[v];
    if (!any) return infeasible(Orientation::REPAIR);
  }
  if (a.initial.empty()) return infeasible(Orientation::REPAIR);
  switch (agg.kind) {
  case AggKind::DSUM:
    if (!agg.lambda) throw Error(ErrorCode::BAD_AGGREGATOR, "DSUM needs a discount factor");
    return solve_dsum(a, *agg.lambda, b.min_winning, b, epsilon);
  case AggKind::MEAN: return solve_mean(a, b.min_winning, epsilon);
  case AggKind::SUP:
  case AggKind::LIMSUP: return solve_sup_like(a, agg.kind, b.min_winning);
  }
  throw Error(ErrorCode::BAD_AGGREGATOR, "unknown aggregator");
}

ThresholdResult repair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                                 const ProductOptions& opt) {
  auto g = build_product(k, t, b, opt);
  auto a = build_arena(g);
  return solve_repair(a, t.agg).threshold;
}

ThresholdResult sup_threshold_by_edge_removal(const GameArena& a, AggKind mode) {
  if (mode != AggKind::SUP && mode != AggKind::LIMSUP)
    throw Error(ErrorCode::BAD_AGGREGATOR, "edge removal applies to SUP and LIMSUP");
  auto b = solve_buchi_game(a, Player::MIN);
  for (const auto& g : start_groups(a)) {
    bool any = false;
    for (int v : g) any = any || b.min_winning[v];
    if (!any) throw Error(ErrorCode::INFEASIBLE, "Min does not win the Buchi game from every initial state");
  }
  return solve_sup_like(a, mode, b.min_winning).threshold;
}

FiniteMemoryStrategy repair_strategy(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                                     const Rational& epsilon, const ProductOptions& opt) {
  if (epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  auto g = build_product(k, t, b, opt);
  auto a = build_arena(g);
  auto sol = solve_repair(a, t.agg, epsilon);
  if (!sol.strategy) throw Error(ErrorCode::INFEASIBLE, "no repair exists at any threshold");
  return *sol.strategy;
}

StrategyPlay play_strategy(const GameArena& a, const FiniteMemoryStrategy& s,
                           const std::vector<int>& max_strategy, int start) {
  std::map<int, std::int64_t> weight; // key: src * size + dst for Min edges
  const auto sz = static_cast<std::int64_t>(a.size());
  for (const auto& e : a.edges)
    if (!a.max_owned[e.src]) weight[e.src * sz + e.dst] = e.weight;

  using State = std::tuple<int, int, std::int64_t>; // vertex, mode, counter
  std::map<State, std::size_t> seen;
  std::vector<int> verts;
  std::vector<std::int64_t> costs;
  int v = start, mode = 0;
  std::int64_t count = 0;
  for (;;) {
    for (std::size_t guard = 0; guard <= s.modes.size(); ++guard) {
      const auto& m = s.modes[mode];
      bool leave = false;
      switch (m.exit.kind) {
      case ExitKind::AFTER_STEPS: leave = count >= m.exit.n; break;
      case ExitKind::AFTER_ANCHOR_HITS: leave = count >= m.exit.n; break;
      case ExitKind::AFTER_ACCEPTING_VISIT: leave = a.final[v]; break;
      case ExitKind::FOREVER: break;
      }
      if (!leave) break;
      mode = m.next;
      count = 0;
    }
    State st{v, mode, count};
    if (auto it = seen.find(st); it != seen.end()) {
      StrategyPlay p;
      std::size_t at = it->second;
      p.vertices.prefix.assign(verts.begin(), verts.begin() + static_cast<long>(at));
      p.vertices.cycle.assign(verts.begin() + static_cast<long>(at), verts.end());
      p.costs.prefix.assign(costs.begin(), costs.begin() + static_cast<long>(at));
      p.costs.cycle.assign(costs.begin() + static_cast<long>(at), costs.end());
      for (int x : p.vertices.cycle) p.accepting = p.accepting || a.final[x];
      return p;
    }
    seen[st] = verts.size();
    int m = s.successor(mode, v);
    if (m < 0) throw Error(ErrorCode::INTERNAL, "strategy undefined at vertex " + std::to_string(v));
    auto w = weight.find(v * sz + m);
    if (w == weight.end()) throw Error(ErrorCode::INTERNAL, "strategy uses a missing edge");
    verts.push_back(v);
    costs.push_back(w->second);
    int nx = max_strategy.at(m);
    if (nx < 0) throw Error(ErrorCode::INTERNAL, "Max strategy undefined at vertex " + std::to_string(m));
    const auto& rule = s.modes[mode].exit;
    if (rule.kind == ExitKind::AFTER_STEPS || (rule.kind == ExitKind::AFTER_ANCHOR_HITS && nx == rule.anchor))
      ++count;
    v = nx;
  }
}

} // namespace omegarepair
