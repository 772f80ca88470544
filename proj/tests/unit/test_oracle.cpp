#include "brute.hpp"

#include "omegarepair/error.hpp"
#include "omegarepair/mask.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/repair.hpp"

#include <doctest.h>

#include <set>

using namespace omegarepair;

namespace {

// Simple accepting lassos by a plain path search, as (prefix, cycle) pairs.
std::set<std::pair<std::vector<int>, std::vector<int>>> lassos_by_paths(const ProductGraph& g) {
  std::set<std::pair<std::vector<int>, std::vector<int>>> out;
  auto adj = g.adjacency();
  std::vector<int> path;
  std::function<void(int)> dfs = [&](int v) {
    path.push_back(v);
    for (int u : adj[v]) {
      auto it = std::find(path.begin(), path.end(), u);
      if (it == path.end()) {
        dfs(u);
        continue;
      }
      std::vector<int> pre(path.begin(), it), cyc(it, path.end());
      bool fin = false;
      for (int x : cyc) fin = fin || g.final[x];
      if (fin) out.insert({pre, cyc});
    }
    path.pop_back();
  };
  for (int s : g.initial) dfs(s);
  return out;
}

} // namespace

TEST_CASE("accepting lassos of the delayed-switch product") {
  auto k = brute::load("dsum_inf.kripke", parse_kripke);
  auto t = brute::load("dsum_inf.rm", parse_rm);
  auto b = brute::load("bad_eventually_b.nba", parse_nba);
  auto g = build_product(k, t, b);
  auto ls = accepting_lassos(g);
  REQUIRE_FALSE(ls.empty());
  std::set<std::pair<std::vector<int>, std::vector<int>>> got;
  for (const auto& l : ls) {
    CHECK(got.insert({l.prefix, l.cycle}).second);
    // Only the switched state recurs.
    for (int v : l.cycle) CHECK(t.states[g.vertices[v].rm] == "p2");
  }
  CHECK(got == lassos_by_paths(g));

  auto dead = parse_rm("RM DSUM 1/2\nIN a\nOUT a b\nSTATE p0 INIT\nEDGE p0 a p0 b 1\n");
  CHECK(accepting_lassos(build_product(k, dead, b)).empty());

  auto loop = parse_rm("RM SUP\nIN a\nOUT a\nSTATE q INIT ACC\nEDGE q a q a 0\n");
  auto all = parse_nba("NBA\nALPHABET a\nSTATE p INIT ACC\nEDGE p a p\n");
  auto one = accepting_lassos(build_product(k, loop, all));
  CHECK(one.size() == 1);
}

TEST_CASE("brute-force thresholds on the worked examples") {
  auto k = brute::load("dsum_inf.kripke", parse_kripke);
  auto t = brute::load("dsum_inf.rm", parse_rm);
  auto b = brute::load("bad_eventually_b.nba", parse_nba);
  auto g = build_product(k, t, b);
  CHECK(brute_impair_threshold(g, t.agg) == ExtRational(Rational(1)));
  auto inset = brute::load("inset.rm", parse_rm);
  CHECK(brute_impair_threshold(build_product(k, inset, b), Aggregator::mean()) == ExtRational(Rational(0)));

  auto pk = brute::load("printer.kripke", parse_kripke);
  auto pb = brute::load("printer_spec.nba", parse_nba);
  auto pt = brute::load("printer_mean.rm", parse_rm);
  OracleBudget big;
  big.max_strategies = 1 << 17;
  CHECK(brute_repair_threshold(pk, pt, pb, Aggregator::mean(), big) == ExtRational(Rational(0)));
  CHECK(brute_repair_threshold(pk, pt, pb, Aggregator::sup(), big) == ExtRational(Rational(3)));

  auto no_acc = parse_rm("RM SUP\nIN bot sq tr\nOUT bot sq tr\nSTATE q INIT\n"
                         "EDGE q bot q bot 0\nEDGE q sq q sq 0\nEDGE q tr q tr 0\n");
  CHECK_FALSE(brute_repair_threshold(pk, no_acc, pb, Aggregator::sup(), big));
}

TEST_CASE("bounded bad rewrites") {
  auto id = parse_rm("RM SUP\nIN a b\nOUT a b\nSTATE q INIT ACC\nEDGE q a q a 0\nEDGE q b q b 0\n");
  auto inf_b = brute::load("bad_eventually_b.nba", parse_nba);
  CHECK(bounded_bad_rewrite(id, inf_b, {{"a"}, {"b"}}, Rational(0), Aggregator::sup()));
  CHECK_FALSE(bounded_bad_rewrite(id, inf_b, {{"b"}, {"a"}}, Rational(0), Aggregator::sup()));
  auto only_a = parse_rm("RM SUP\nIN a b\nOUT a b\nSTATE q INIT ACC\nEDGE q a q a 0\n");
  CHECK_FALSE(bounded_bad_rewrite(only_a, inf_b, {{}, {"b"}}, Rational(5), Aggregator::sup()));

  auto k = brute::load("printer.kripke", parse_kripke);
  auto pb = brute::load("printer_spec.nba", parse_nba);
  auto pt = restrict_domain(brute::load("printer_sup.rm", parse_rm), kripke_to_nba(k));
  Lasso<Symbol> w{{"bot"}, {"tr"}};
  CHECK_FALSE(bounded_bad_rewrite(pt, pb, w, Rational(2), Aggregator::sup()));
  auto hit = bounded_bad_rewrite(pt, pb, w, Rational(3), Aggregator::sup());
  REQUIRE(hit);
  // The witness is an accepting lasso of the run graph within the bound.
  RepairMachine tpp = bad_rewrite_machine(pt, pb);
  tpp.agg = Aggregator::sup();
  auto g = machine_lasso_product(tpp, w);
  bool fin = false;
  for (int v : hit->cycle) fin = fin || g.final[v];
  CHECK(fin);
  CHECK(min_run_value(tpp, w) == ExtRational(Rational(3)));
  // Mean lets the cost-3 step be amortised.
  CHECK(bounded_bad_rewrite(pt, pb, {{"bot"}, {"tr", "tr", "tr"}}, Rational(1), Aggregator::mean()));
}

TEST_CASE("bounded bad rewrites against the DSum run values") {
  auto tq = parse_rm("RM DSUM 1/2\nIN a b\nOUT x y\nSTATE q INIT ACC\nEDGE q a q x 0\nEDGE q b q y 2\n");
  auto a = parse_nba("NBA\nALPHABET x y\nSTATE n INIT\nSTATE s ACC\nEDGE n x s\nEDGE n y n\nEDGE s x s\nEDGE s y n\n");
  RepairMachine tpp = bad_rewrite_machine(tq, a);
  tpp.agg = tq.agg;
  for (const auto& w : brute::all_lassos({"a", "b"}, 2, 3)) {
    CAPTURE(symbol_lasso_str(w));
    auto v = min_run_value(tpp, w);
    for (Rational tau : {Rational(0), Rational(1, 2), Rational(1), Rational(3)}) {
      bool cheap = v && *v <= tau;
      CHECK(static_cast<bool>(bounded_bad_rewrite(tq, a, w, tau, tq.agg)) == cheap);
    }
  }
}

TEST_CASE("instance generator") {
  auto a = random_instance(42);
  auto b = random_instance(42);
  CHECK(serialize_model(a.kripke) == serialize_model(b.kripke));
  CHECK(serialize_model(a.rm) == serialize_model(b.rm));
  CHECK(serialize_model(a.nba) == serialize_model(b.nba));
  CHECK(a.lambda == b.lambda);

  GeneratorConfig c;
  c.max_weight = 9;
  c.symbols = {"p", "q", "r"};
  auto text = generator_config_json(c);
  auto back = parse_generator_config(text);
  CHECK(generator_config_json(back) == text);
  CHECK(back.max_weight == 9);
  CHECK(parse_generator_config("{\"max_weight\": 2}").max_rm_states == GeneratorConfig{}.max_rm_states);
  CHECK_THROWS_AS(parse_generator_config("{not json"), Error);

  auto inst = random_instance(5, back);
  for (const auto& e : inst.rm.edges) CHECK(e.cost <= 9);
  for (const auto& s : inst.kripke.label) CHECK((s == "p" || s == "q" || s == "r"));
}

TEST_CASE("oracle report lines") {
  auto lines = run_oracle(7, 3);
  CHECK(lines.size() == 3 * 4 * 2);
  auto again = run_oracle(7, 3);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(lines[i].str() == again[i].str());
    CHECK(lines[i].ok());
  }
  OracleLine l;
  l.seed = 3;
  l.agg = AggKind::SUP;
  l.repair = true;
  l.solver = Rational(2);
  l.oracle = std::nullopt;
  CHECK(l.str() == "SEED 3 AGG SUP PROBLEM REPAIR SOLVER 2/1 ORACLE inf VERDICT MISMATCH");
}

TEST_CASE("oracle budgets") {
  auto k = brute::load("printer.kripke", parse_kripke);
  auto pb = brute::load("printer_spec.nba", parse_nba);
  auto pt = brute::load("printer_mean.rm", parse_rm);
  auto g = build_product(k, pt, pb);
  OracleBudget tiny;
  tiny.max_vertices = 2;
  CHECK_THROWS_AS(accepting_lassos(g, tiny), Error);
  CHECK_THROWS_AS(brute_impair_threshold(g, Aggregator::sup(), tiny), Error);
  OracleBudget few;
  few.max_strategies = 1;
  try {
    brute_repair_threshold(build_arena(g), Aggregator::sup(), few);
    FAIL("budget ignored");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BUDGET_EXCEEDED);
  }
  OracleBudget steps;
  steps.max_steps = 3;
  CHECK_THROWS_AS(brute_impair_threshold(g, Aggregator::sup(), steps), Error);
}
