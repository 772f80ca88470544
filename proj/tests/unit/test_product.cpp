#include "brute.hpp"

#include "omegarepair/error.hpp"
#include "omegarepair/impair.hpp"
#include "omegarepair/mask.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/product.hpp"

#include <doctest.h>

#include <map>

using namespace omegarepair;

namespace {

struct Printer {
  KripkeStructure k = brute::load("printer.kripke", parse_kripke);
  NBA b = brute::load("printer_spec.nba", parse_nba);
  RepairMachine t = brute::load("printer_mean.rm", parse_rm);
};

std::vector<int> syms(const NBA& b, const std::vector<std::string>& w) {
  std::vector<int> r;
  for (const auto& s : w) r.push_back(b.symbol_index(s));
  return r;
}

// Simple cycles of g as vertex lists (smallest vertex first).
std::vector<std::vector<int>> simple_cycles(const ProductGraph& g) {
  std::vector<std::vector<int>> out;
  auto adj = g.adjacency();
  std::vector<int> path;
  std::vector<bool> on(g.size(), false);
  std::function<void(int, int)> dfs = [&](int root, int v) {
    path.push_back(v);
    on[v] = true;
    for (int u : adj[v]) {
      if (u == root) out.push_back(path);
      else if (u > root && !on[u]) dfs(root, u);
    }
    on[v] = false;
    path.pop_back();
  };
  for (int r = 0; r < static_cast<int>(g.size()); ++r) dfs(r, r);
  return out;
}

const ProductEdge& edge_between(const ProductGraph& g, int u, int v) {
  for (const auto& e : g.edges)
    if (e.src == u && e.dst == v) return e;
  throw std::logic_error("missing edge");
}

} // namespace

TEST_CASE("extended moves on the printer spec automaton") {
  Printer p;
  auto m = extended_moves(p.b, p.b.index_of("p1"), syms(p.b, {"tr"}));
  REQUIRE(m.size() == 1);
  CHECK(m[0].to == p.b.index_of("p2"));
  CHECK_FALSE(m[0].visits_accepting);

  auto two = extended_moves(p.b, p.b.index_of("p2"), syms(p.b, {"sq", "tr"}));
  REQUIRE(two.size() == 1);
  CHECK(two[0].to == p.b.index_of("p1"));
  CHECK(two[0].visits_accepting);
  CHECK(two[0].path == std::vector<int>{p.b.index_of("p4"), p.b.index_of("p1")});

  auto eps = extended_moves(p.b, p.b.index_of("p4"), std::vector<int>{});
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].to == p.b.index_of("p4"));
  CHECK_FALSE(eps[0].visits_accepting);

  CHECK(extended_moves(p.b, p.b.index_of("p0"), syms(p.b, {"sq"})).empty());
  CHECK_THROWS_AS(extended_moves(p.b, 0, std::vector<int>{7}), Error);
}

TEST_CASE("identity rewrite of a one-letter system") {
  auto k = parse_kripke("KRIPKE\nSTATE s LABEL a INIT\nEDGE s s\n");
  auto t = parse_rm("RM SUP\nIN a\nOUT a\nSTATE q INIT ACC\nEDGE q a q a 0\n");
  auto b = parse_nba("NBA\nALPHABET a\nSTATE p INIT ACC\nEDGE p a p\n");
  auto g = build_product(k, t, b);
  CHECK(g.max_weight() == 0);
  CHECK_FALSE(accepting_lassos(g).empty());

  auto t0 = parse_rm("RM SUP\nIN a\nOUT a\nSTATE q INIT\nEDGE q a q a 0\n");
  CHECK(accepting_lassos(build_product(k, t0, b)).empty());
}

TEST_CASE("printer product holds the every-third-triangle rewrite") {
  Printer p;
  auto g = build_product(p.k, p.t, p.b);
  bool found = false;
  brute::min_over_walk_lassos(brute::from_product(g), 8, [&](const Lasso<std::int64_t>& c) {
    auto n = normalize_lasso(Lasso<std::int64_t>{{}, c.cycle});
    for (std::size_t r = 0; r < 3 && !found; ++r) {
      std::vector<std::int64_t> want{0, 0, 3};
      std::rotate(want.begin(), want.begin() + static_cast<std::ptrdiff_t>(r), want.end());
      found = n.cycle == want;
    }
    return Rational(0);
  });
  CHECK(found);
}

TEST_CASE("alphabet mismatches are rejected") {
  Printer p;
  auto k = parse_kripke("KRIPKE\nSTATE s LABEL zz INIT\nEDGE s s\n");
  CHECK_THROWS_AS(build_product(k, p.t, p.b), Error);
  auto b = parse_nba("NBA\nALPHABET bot\nSTATE p INIT ACC\nEDGE p bot p\n");
  CHECK_THROWS_AS(build_product(p.k, p.t, b), Error);
}

TEST_CASE("counter soundness and projection on random products") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    auto inst = random_instance(seed);
    auto g = build_product(inst.kripke, inst.rm, inst.nba);
    // Final vertices recur on a cycle iff the machine visits an accepting state
    // and the spec automaton run passes an accepting state on it.
    for (const auto& cyc : simple_cycles(g)) {
      bool fin = false, rm_acc = false, nba_acc = false;
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        int u = cyc[i], v = cyc[(i + 1) % cyc.size()];
        fin = fin || g.final[u];
        rm_acc = rm_acc || inst.rm.accepting[g.vertices[u].rm];
        nba_acc = nba_acc || edge_between(g, u, v).traversed_accepting;
      }
      CHECK(fin == (rm_acc && nba_acc));
    }
    // Accepting lassos project to a trace, an accepting machine run and an
    // output accepted by the spec automaton.
    NBA traces = kripke_to_nba(inst.kripke);
    for (const auto& run : accepting_lassos(g)) {
      auto w = make_witness(g, inst.kripke, inst.rm, run);
      CHECK(brute::accepts(traces, w.trace));
      CHECK(brute::accepts(inst.nba, w.rewrite));
      bool rm_acc = false;
      for (int v : run.cycle) rm_acc = rm_acc || inst.rm.accepting[g.vertices[v].rm];
      CHECK(rm_acc);
    }
  }
}

TEST_CASE("edge weights are minimal over all witnesses") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    auto inst = random_instance(seed);
    const auto& k = inst.kripke;
    const auto& t = inst.rm;
    const auto& b = inst.nba;
    auto g = build_product(k, t, b);
    std::map<std::pair<int, int>, std::int64_t> best;
    for (std::size_t ui = 0; ui < g.size(); ++ui) {
      const auto& u = g.vertices[ui];
      for (const auto& e : t.edges) {
        if (e.src != u.rm || t.in_alphabet[e.in] != k.label[u.kripke]) continue;
        for (const auto& m : extended_moves(b, u.nba, e.out)) {
          int c2 = (u.counter == 2 && !t.accepting[u.rm]) ? 2 : (m.visits_accepting ? 2 : 1);
          for (auto [s, s2] : k.edges) {
            if (s != u.kripke) continue;
            int vi = g.index_of({s2, e.dst, m.to, c2});
            REQUIRE(vi >= 0);
            auto key = std::make_pair(static_cast<int>(ui), vi);
            if (!best.count(key) || e.cost < best[key]) best[key] = e.cost;
          }
        }
      }
    }
    REQUIRE(best.size() == g.edges.size());
    for (const auto& e : g.edges) CHECK(best[{e.src, e.dst}] == e.weight);
  }
}

TEST_CASE("arena splits each product edge into a Min and a Max move") {
  Printer p;
  auto g = build_product(p.k, p.t, p.b);
  auto a = build_arena(g);
  CHECK(a.min_count == static_cast<int>(g.size()));
  auto out = a.out_edges();
  for (const auto& e : g.edges) {
    bool ok = false;
    for (int i : out[e.src]) {
      int m = a.edges[i].dst;
      if (a.edges[i].weight != e.weight) continue;
      for (int j : out[m]) ok = ok || (a.edges[j].dst == e.dst && a.edges[j].weight == 0);
    }
    CHECK(ok);
  }
  auto succ = p.k.successors();
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (!a.max_owned[m]) {
      for (int i : out[m]) CHECK(a.max_owned[a.edges[i].dst]);
      continue;
    }
    const auto& x = a.vertices[m];
    std::set<int> ks;
    for (int i : out[m]) {
      const auto& y = a.vertices[a.edges[i].dst];
      CHECK_FALSE(a.max_owned[a.edges[i].dst]);
      CHECK(a.edges[i].weight == 0);
      CHECK(y.rm == x.rm);
      CHECK(y.nba == x.nba);
      CHECK(y.counter == x.next_counter);
      ks.insert(y.kripke);
    }
    // Max picks exactly the Kripke successor.
    std::set<int> want(succ[x.kripke].begin(), succ[x.kripke].end());
    CHECK(ks == want);
  }
}

TEST_CASE("domain restriction to the printer traces") {
  Printer p;
  NBA traces = kripke_to_nba(p.k);
  auto tr = restrict_domain(p.t, traces);
  NBA dom = domain_nba(tr);
  for (const auto& w : brute::all_lassos(p.t.in_alphabet, 2, 3)) {
    CAPTURE(symbol_lasso_str(w));
    CHECK(brute::accepts(dom, w) == brute::accepts(traces, w));
  }
  NBA none = parse_nba("NBA\nALPHABET bot sq tr\nSTATE x INIT\nEDGE x bot x\n");
  CHECK(trim(restrict_domain(p.t, none)).states.empty());
  NBA wrong = parse_nba("NBA\nALPHABET zz\nSTATE x INIT ACC\nEDGE x zz x\n");
  CHECK_THROWS_AS(restrict_domain(p.t, wrong), Error);
}

TEST_CASE("output product keeps exactly the rewrites into the spec automaton") {
  Printer p;
  RepairMachine sup = brute::load("printer_sup.rm", parse_rm);
  auto op = trim(output_product(sup, p.b));
  op.agg = Aggregator::sup();
  // Every accepted rewrite of bot tr^w pays 3 somewhere; the zero-cost run is gone.
  CHECK(min_run_value(op, {{"bot"}, {"tr"}}) == ExtRational(Rational(3)));
  op.agg = Aggregator::mean();
  CHECK(min_run_value(op, {{"bot"}, {"tr", "tr", "tr"}}) == ExtRational(Rational(0)));

  // The bot (tr tr tr.sq)^w rewrite is a run of the product machine.
  auto g = machine_lasso_product(op, {{"bot"}, {"tr", "tr", "tr"}});
  bool pattern = false;
  brute::min_over_walk_lassos(brute::from_product(g), 9, [&](const Lasso<std::int64_t>& c) {
    auto n = normalize_lasso(Lasso<std::int64_t>{{}, c.cycle});
    std::vector<std::int64_t> cyc = n.cycle;
    for (std::size_t r = 0; r < cyc.size(); ++r) {
      pattern = pattern || cyc == std::vector<std::int64_t>{0, 0, 3};
      std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
    }
    return Rational(0);
  });
  CHECK(pattern);

  NBA empty = parse_nba("NBA\nALPHABET bot sq tr\nSTATE x INIT\nEDGE x bot x\n");
  CHECK(trim(output_product(sup, empty)).states.empty());
}

TEST_CASE("trimmed NBAs keep only useful states") {
  auto a = parse_nba("NBA\nALPHABET a\nSTATE i INIT\nSTATE acc ACC\nSTATE dead\nSTATE orphan ACC\n"
                     "EDGE i a acc\nEDGE acc a acc\nEDGE i a dead\nEDGE orphan a orphan\n");
  auto t = trim(a);
  CHECK(t.states == std::vector<std::string>{"i", "acc"});
  CHECK(lasso_membership(t, {{}, {"a"}}));
}
