#include "brute.hpp"

#include "omegarepair/error.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/repair.hpp"

#include <doctest.h>

#include <random>

using namespace omegarepair;

namespace {

struct Printer {
  KripkeStructure k = brute::load("printer.kripke", parse_kripke);
  NBA b = brute::load("printer_spec.nba", parse_nba);
  RepairMachine t = brute::load("printer_mean.rm", parse_rm);
  GameArena arena() const { return build_arena(build_product(k, t, b)); }
};

// Max vertices reachable from `start` when Min follows any mode of s.
std::vector<int> reachable_max(const GameArena& a, const FiniteMemoryStrategy& s, int start) {
  auto out = a.out_edges();
  std::vector<bool> seen(a.size(), false);
  std::vector<int> stack{start}, res;
  seen[start] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    std::vector<int> next;
    if (a.max_owned[v]) {
      res.push_back(v);
      for (int i : out[v]) next.push_back(a.edges[i].dst);
    } else {
      for (std::size_t m = 0; m < s.modes.size(); ++m) {
        int x = s.successor(static_cast<int>(m), v);
        if (x >= 0) next.push_back(x);
      }
    }
    for (int x : next)
      if (!seen[x]) {
        seen[x] = true;
        stack.push_back(x);
      }
  }
  std::sort(res.begin(), res.end());
  return res;
}

// Worst value of s against Max's positional replies: exhaustive when there
// are at most `limit` of them, otherwise `limit` random ones. nullopt when
// some reply defeats the Buchi condition.
std::optional<Rational> worst_play(const GameArena& a, const FiniteMemoryStrategy& s, const Aggregator& agg,
                                   std::size_t limit = 20000) {
  auto out = a.out_edges();
  std::optional<Rational> worst;
  bool lost = false;
  std::mt19937_64 rng(99);
  for (int start : s.starts) {
    auto mv = reachable_max(a, s, start);
    std::size_t total = 1;
    bool exhaustive = true;
    for (int m : mv) {
      total *= std::max<std::size_t>(1, out[m].size());
      if (total > limit) {
        exhaustive = false;
        break;
      }
    }
    std::vector<int> reply(a.size(), -1);
    auto evaluate = [&] {
      auto p = play_strategy(a, s, reply, start);
      if (!p.accepting) lost = true;
      Rational v = eval_aggregator(agg, p.costs);
      if (!worst || v > *worst) worst = v;
    };
    if (exhaustive) {
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == mv.size()) return evaluate();
        for (int e : out[mv[i]]) {
          reply[mv[i]] = a.edges[e].dst;
          rec(i + 1);
        }
      };
      rec(0);
    } else {
      for (std::size_t it = 0; it < limit; ++it) {
        for (int m : mv) reply[m] = a.edges[out[m][rng() % out[m].size()]].dst;
        evaluate();
      }
    }
  }
  if (lost) return std::nullopt;
  return worst;
}

} // namespace

TEST_CASE("printer repair thresholds") {
  Printer p;
  auto a = p.arena();
  auto mean = solve_repair(a, Aggregator::mean(), Rational(1, 2));
  CHECK(mean.threshold.value == ExtRational(Rational(0)));
  CHECK(mean.threshold.attainment == Attainment::INFIMUM_ONLY);
  CHECK(mean.threshold.memory == MemoryClass::INFINITE_FOR_EXACT);
  auto sup = solve_repair(a, Aggregator::sup());
  CHECK(sup.threshold.value == ExtRational(Rational(3)));
  CHECK(sup.threshold.attainment == Attainment::ATTAINED);
  CHECK(sup.threshold.memory == MemoryClass::POSITIONAL);
  CHECK(sup_threshold_by_edge_removal(a, AggKind::SUP).value == ExtRational(Rational(3)));
  CHECK(solve_repair(a, Aggregator::limsup()).threshold.value == ExtRational(Rational(3)));
  OracleBudget big;
  big.max_strategies = 1 << 17;
  CHECK(brute_repair_threshold(a, Aggregator::mean(), big) == ExtRational(Rational(0)));
  CHECK(brute_repair_threshold(a, Aggregator::sup(), big) == ExtRational(Rational(3)));
  CHECK(brute_repair_threshold(a, Aggregator::limsup(), big) == ExtRational(Rational(3)));
  auto d = solve_repair(a, Aggregator::dsum(Rational(1, 2)), Rational(1, 8));
  CHECK(d.threshold.value == brute_repair_threshold(a, Aggregator::dsum(Rational(1, 2)), big));
}

TEST_CASE("printer arena: every initial vertex is winning for Min") {
  Printer p;
  auto a = p.arena();
  auto r = solve_buchi_game(a);
  for (int v : a.initial) CHECK(r.min_winning[v]);
}

TEST_CASE("printer strategies meet their guarantees against every reply") {
  Printer p;
  auto a = p.arena();
  auto mean = solve_repair(a, Aggregator::mean(), Rational(1, 2));
  REQUIRE(mean.strategy);
  auto w = worst_play(a, *mean.strategy, Aggregator::mean());
  REQUIRE(w);
  CHECK(*w <= Rational(1, 2));

  auto sup = solve_repair(a, Aggregator::sup());
  REQUIRE(sup.strategy);
  CHECK(sup.strategy->modes.size() == 1);
  CHECK(worst_play(a, *sup.strategy, Aggregator::sup()) == std::optional<Rational>(Rational(3)));
}

TEST_CASE("strategy text round-trips") {
  Printer p;
  auto a = p.arena();
  for (auto agg : {Aggregator::mean(), Aggregator::sup(), Aggregator::limsup(), Aggregator::dsum(Rational(1, 2))}) {
    auto s = solve_repair(a, agg, Rational(1, 4));
    REQUIRE(s.strategy);
    std::string text = s.strategy->serialize();
    CHECK(FiniteMemoryStrategy::parse(text) == *s.strategy);
    CHECK(FiniteMemoryStrategy::parse(text).serialize() == text);
  }
  CHECK_THROWS_AS(FiniteMemoryStrategy::parse("STRATEGY\nMAP 1 -> 2\n"), Error);
  CHECK_THROWS_AS(FiniteMemoryStrategy::parse("nonsense"), Error);
}

TEST_CASE("infeasible repair") {
  auto k = brute::load("dsum_inf.kripke", parse_kripke);
  auto t = brute::load("dsum_inf.rm", parse_rm);
  auto only_a = parse_nba("NBA\nALPHABET a b\nSTATE n0 INIT ACC\nEDGE n0 a n0\n");
  CHECK(repair_threshold(k, t, only_a).infinite());
  CHECK_THROWS_AS(repair_strategy(k, t, only_a, Rational(1, 2)), Error);
  CHECK_THROWS_AS(repair_strategy(k, t, only_a, Rational(0)), Error);
  auto a = build_arena(build_product(k, t, only_a));
  CHECK_THROWS_AS(sup_threshold_by_edge_removal(a, AggKind::SUP), Error);
  CHECK_THROWS_AS(sup_threshold_by_edge_removal(a, AggKind::MEAN), Error);
}

TEST_CASE("LimSup keeps cheap accepting cycles behind an expensive step") {
  // Min alone: 0 -5-> 1 (accepting), 1 loops at 0 and may return to 0 at 0.
  auto k = parse_kripke("KRIPKE\nSTATE s LABEL a INIT\nEDGE s s\n");
  auto t = parse_rm("RM LIMSUP\nIN a\nOUT a\nSTATE v0 INIT\nSTATE v1 ACC\n"
                    "EDGE v0 a v1 a 5\nEDGE v1 a v1 a 0\nEDGE v1 a v0 a 0\n");
  auto b = parse_nba("NBA\nALPHABET a\nSTATE p INIT ACC\nEDGE p a p\n");
  auto r = repair_threshold(k, t, b);
  CHECK(r.value == ExtRational(Rational(0)));
  auto a = build_arena(build_product(k, t, b));
  CHECK(brute_repair_threshold(a, Aggregator::limsup()) == ExtRational(Rational(0)));
  t.agg = Aggregator::sup();
  CHECK(repair_threshold(k, t, b).value == ExtRational(Rational(5)));
}

TEST_CASE("identity machine: DSum strategy within epsilon") {
  auto k = brute::load("printer.kripke", parse_kripke);
  auto t = parse_rm("RM DSUM 1/2\nIN bot sq tr\nOUT bot sq tr\nSTATE q INIT ACC\n"
                    "EDGE q bot q bot 1\nEDGE q sq q sq 2\nEDGE q tr q tr 0\n");
  auto b = parse_nba("NBA\nALPHABET bot sq tr\nSTATE p INIT ACC\nEDGE p bot p\nEDGE p sq p\nEDGE p tr p\n");
  auto a = build_arena(build_product(k, t, b));
  for (Rational eps : {Rational(1, 2), Rational(1, 10), Rational(1, 1000)}) {
    auto s = solve_repair(a, t.agg, eps);
    REQUIRE(s.strategy);
    CHECK(s.strategy->k > 0);
    auto tau = *s.threshold.value;
    CHECK(tau == brute_repair_threshold(a, t.agg));
    auto w = worst_play(a, *s.strategy, t.agg);
    REQUIRE(w);
    CHECK(*w <= tau + eps);
  }
}

TEST_CASE("strategies on random instances meet their guarantees") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    auto inst = random_instance(seed);
    auto a = build_arena(build_product(inst.kripke, inst.rm, inst.nba));
    for (auto agg : {Aggregator::dsum(inst.lambda), Aggregator::mean(), Aggregator::sup(), Aggregator::limsup()}) {
      CAPTURE(agg.str());
      Rational eps(1, 4);
      auto s = solve_repair(a, agg, eps);
      if (s.threshold.infinite()) {
        CHECK_FALSE(s.strategy);
        continue;
      }
      REQUIRE(s.strategy);
      auto w = worst_play(a, *s.strategy, agg, 4000);
      REQUIRE(w);
      if (agg.kind == AggKind::SUP || agg.kind == AggKind::LIMSUP) CHECK(*w <= *s.threshold.value);
      else CHECK(*w <= *s.threshold.value + eps);
    }
  }
}
