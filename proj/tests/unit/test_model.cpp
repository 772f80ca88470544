#include "brute.hpp"

#include "omegarepair/error.hpp"
#include "omegarepair/model.hpp"

#include <doctest.h>

#include <random>

using namespace omegarepair;

TEST_CASE("aggregators on the four-state example run") {
  Lasso<std::int64_t> c{{2, 0}, {1, 4}};
  CHECK(eval_aggregator(Aggregator::dsum(Rational(1, 2)), c) == Rational(3));
  CHECK(eval_aggregator(Aggregator::mean(), c) == Rational(5, 2));
  CHECK(eval_aggregator(Aggregator::sup(), c) == Rational(4));
  CHECK(eval_aggregator(Aggregator::limsup(), c) == Rational(4));
}

TEST_CASE("aggregators agree with unrolled evaluation") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    Lasso<std::int64_t> c;
    for (std::size_t i = rng() % 4; i > 0; --i) c.prefix.push_back(static_cast<std::int64_t>(rng() % 6));
    for (std::size_t i = 1 + rng() % 4; i > 0; --i) c.cycle.push_back(static_cast<std::int64_t>(rng() % 6));
    for (auto agg : {Aggregator::dsum(Rational(1, 3)), Aggregator::dsum(Rational(3, 4)), Aggregator::mean(),
                     Aggregator::sup(), Aggregator::limsup()}) {
      Rational v = eval_aggregator(agg, c);
      CHECK(v == brute::unrolled_value(agg, c));
      CHECK(std::abs(v.to_double() - brute::unrolled_double(agg, c, 4000)) < 1e-2);
    }
  }
}

TEST_CASE("cycle rotation and unrolling leave limit aggregators unchanged") {
  Lasso<std::int64_t> c{{5}, {1, 2, 3}};
  Lasso<std::int64_t> unrolled{{5, 1}, {2, 3, 1}};
  Lasso<std::int64_t> doubled{{5}, {1, 2, 3, 1, 2, 3}};
  for (auto agg : {Aggregator::dsum(Rational(1, 2)), Aggregator::mean(), Aggregator::sup(), Aggregator::limsup()}) {
    CHECK(eval_aggregator(agg, c) == eval_aggregator(agg, unrolled));
    CHECK(eval_aggregator(agg, c) == eval_aggregator(agg, doubled));
  }
}

TEST_CASE("DSUM needs a discount in (0,1)") {
  CHECK_THROWS_AS(eval_aggregator(Aggregator::dsum(Rational(1)), {{}, {1}}), Error);
  CHECK_THROWS_AS(eval_aggregator(Aggregator{AggKind::DSUM, std::nullopt}, {{}, {1}}), Error);
  CHECK_THROWS_AS(eval_aggregator(Aggregator::mean(), {{1}, {}}), Error);
}

TEST_CASE("validation catches malformed models") {
  KripkeStructure k;
  k.states = {"s"};
  k.label = {"a"};
  Diagnostics d = validate(k);
  CHECK_FALSE(d.ok()); // no initial state, no successor
  k.initial = {0};
  k.edges = {{0, 0}};
  CHECK(validate(k).ok());
  k.edges = {{0, 3}};
  CHECK_FALSE(validate(k).ok());
  CHECK_THROWS_AS(require_valid(k), Error);

  RepairMachine t = brute::load("eg1.rm", parse_rm);
  CHECK(validate(t).ok());
  t.edges.front().cost = -1;
  CHECK_FALSE(validate(t).ok());
}

TEST_CASE("lasso membership matches the closure-based oracle") {
  NBA b = brute::load("printer_spec.nba", parse_nba);
  for (const auto& w : brute::all_lassos(b.alphabet, 2, 3)) CHECK(lasso_membership(b, w) == brute::accepts(b, w));
  CHECK(lasso_membership(b, {{"bot"}, {"tr", "sq"}}));
  CHECK_FALSE(lasso_membership(b, {{"bot"}, {"tr"}}));
  CHECK_THROWS_AS(lasso_membership(b, {{}, {"zz"}}), Error);
}

TEST_CASE("kripke traces as an NBA") {
  KripkeStructure k = brute::load("printer.kripke", parse_kripke);
  NBA n = kripke_to_nba(k);
  CHECK(lasso_membership(n, {{"bot"}, {"tr"}}));
  CHECK(lasso_membership(n, {{}, {"bot", "sq", "tr"}}));
  CHECK_FALSE(lasso_membership(n, {{}, {"tr"}}));        // must start idle
  CHECK_FALSE(lasso_membership(n, {{"bot"}, {"bot"}})); // idle has no self-loop
  for (const auto& w : brute::trace_lassos(k)) CHECK(lasso_membership(n, w));
}

TEST_CASE("machine runs project to input, output and costs") {
  RepairMachine t = brute::load("eg1.rm", parse_rm);
  auto edge = [&](const std::string& s, const std::string& in, const std::string& d) {
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
      const auto& e = t.edges[i];
      if (t.states[e.src] == s && t.in_alphabet[e.in] == in && t.states[e.dst] == d) return static_cast<int>(i);
    }
    return -1;
  };
  Lasso<int> run{{edge("l0", "b", "l1"), edge("l1", "a", "l2")}, {edge("l2", "a", "l3"), edge("l3", "b", "l2")}};
  CHECK(is_run(t, run));
  CHECK(run_costs(t, run) == Lasso<std::int64_t>{{2, 0}, {1, 4}});
  CHECK(run_input(t, run) == Lasso<Symbol>{{"b", "a"}, {"a", "b"}});
  CHECK(run_output(t, run) == Lasso<Symbol>{{"c", "c"}, {"c", "c", "d"}});
  Lasso<int> eps_only{{edge("l0", "b", "l1"), edge("l1", "a", "l2"), edge("l2", "a", "l3")},
                      {edge("l3", "a", "l1"), edge("l1", "a", "l2"), edge("l2", "a", "l3")}};
  CHECK(is_run(t, eps_only));
  CHECK_FALSE(is_run(t, {{}, {edge("l1", "a", "l2")}}));
}

TEST_CASE("normalized lassos") {
  CHECK(normalize_lasso(Lasso<int>{{1, 2, 1, 2}, {1, 2, 1, 2}}) == Lasso<int>{{}, {1, 2}});
  CHECK(normalize_lasso(Lasso<int>{{3, 1}, {2, 1}}) == Lasso<int>{{3}, {1, 2}});
}
