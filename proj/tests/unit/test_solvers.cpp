#include "brute.hpp"

#include "omegarepair/error.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/solvers.hpp"

#include <doctest.h>

#include <random>
#include <tuple>

using namespace omegarepair;

namespace {

using E = std::tuple<int, int, std::int64_t>;

ProductGraph graph(int n, std::vector<E> edges, std::vector<int> init, std::vector<int> fin) {
  ProductGraph g;
  for (int v = 0; v < n; ++v) g.vertices.push_back({v, 0, 0, 1});
  std::sort(edges.begin(), edges.end());
  for (auto [s, d, w] : edges) g.edges.push_back({s, d, w, 0, {}, false});
  g.initial = init;
  g.final.assign(n, false);
  for (int f : fin) g.final[f] = true;
  return g;
}

// Arena from explicit owners; Min vertices must come first.
GameArena arena(std::vector<bool> max_owned, std::vector<E> edges, std::vector<int> init, std::vector<int> fin) {
  GameArena a;
  const int n = static_cast<int>(max_owned.size());
  for (int v = 0; v < n; ++v) a.vertices.push_back({v, 0, 0, max_owned[v] ? 3 : 1, 1});
  a.max_owned = max_owned;
  std::sort(edges.begin(), edges.end());
  for (auto [s, d, w] : edges) a.edges.push_back({s, d, w, 0});
  a.initial = init;
  a.final.assign(n, false);
  for (int f : fin) a.final[f] = true;
  a.min_count = 0;
  while (a.min_count < n && !max_owned[a.min_count]) ++a.min_count;
  return a;
}

// p0 -1-> p1, p1 loop 0, p1 -1-> p2, p2 loop 1 (accepting).
ProductGraph dsum_inf_graph() { return graph(3, {{0, 1, 1}, {1, 1, 0}, {1, 2, 1}, {2, 2, 1}}, {0}, {2}); }

// v0 loop 0, v0 <-> v1 weight 1, v1 loop 1; both final.
ProductGraph inset_graph() { return graph(2, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}, {0}, {0, 1}); }

ProductGraph random_graph(std::mt19937_64& rng, int n, int maxw) {
  std::vector<E> es;
  std::set<std::pair<int, int>> seen;
  for (int v = 0; v < n; ++v) {
    int deg = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < deg; ++i) {
      int d = static_cast<int>(rng() % n);
      if (seen.insert({v, d}).second) es.push_back({v, d, static_cast<std::int64_t>(rng() % (maxw + 1))});
    }
  }
  std::vector<int> fin;
  for (int v = 0; v < n; ++v)
    if (rng() % 3 == 0) fin.push_back(v);
  return graph(n, es, {0}, fin);
}

Rational dsum_of(const Rational& l, const Lasso<std::int64_t>& c) { return eval_aggregator(Aggregator::dsum(l), c); }

} // namespace

TEST_CASE("Buchi games: trivial cases") {
  auto loop = arena({false}, {{0, 0, 0}}, {0}, {0});
  CHECK(solve_buchi_game(loop).min_winning == std::vector<bool>{true});
  auto unreachable = arena({false, false}, {{0, 0, 0}, {1, 1, 0}}, {0}, {1});
  auto r = solve_buchi_game(unreachable);
  CHECK_FALSE(r.min_winning[0]);
  CHECK(r.max_winning[0]);
}

TEST_CASE("Buchi games: Max can avoid the accepting vertex") {
  // 0 (Min) -> 2 (Max); Max picks 0 or 1; 1 is accepting and returns to 0.
  auto a = arena({false, false, true}, {{0, 2, 0}, {2, 0, 0}, {2, 1, 0}, {1, 0, 0}}, {0}, {1});
  auto r = solve_buchi_game(a);
  CHECK_FALSE(r.min_winning[0]);
  CHECK(r.max_strategy[2] == 0);
  // If Min has a second option that forces the visit, she wins.
  auto b = arena({false, false, true}, {{0, 2, 0}, {0, 1, 0}, {2, 0, 0}, {1, 0, 0}}, {0}, {1});
  auto s = solve_buchi_game(b);
  CHECK(s.min_winning[0]);
  CHECK(s.min_strategy[0] == 1);
  // Max as the Buchi player of the same arena.
  auto m = solve_buchi_game(a, Player::MAX);
  CHECK(m.max_winning[0]);
}

TEST_CASE("Buchi regions partition the arena and strategies stay inside") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    const int nmin = 2 + static_cast<int>(rng() % 3), nmax = 1 + static_cast<int>(rng() % 3);
    std::vector<bool> own(nmin + nmax, false);
    for (int v = nmin; v < nmin + nmax; ++v) own[v] = true;
    std::vector<E> es;
    std::set<std::pair<int, int>> seen;
    for (int v = 0; v < nmin + nmax; ++v)
      for (int i = 0; i < 2; ++i) {
        int d = static_cast<int>(rng() % (nmin + nmax));
        if (seen.insert({v, d}).second) es.push_back({v, d, 0});
      }
    std::vector<int> fin;
    for (int v = 0; v < nmin + nmax; ++v)
      if (rng() % 3 == 0) fin.push_back(v);
    auto a = arena(own, es, {0}, fin);
    auto r = solve_buchi_game(a);
    for (int v = 0; v < nmin + nmax; ++v) {
      CHECK(r.min_winning[v] != r.max_winning[v]);
      if (!own[v] && r.min_winning[v]) CHECK(r.min_winning[r.min_strategy[v]]);
      if (own[v] && r.max_winning[v] && r.max_strategy[v] >= 0) CHECK(r.max_winning[r.max_strategy[v]]);
    }
    // Brute force over positional strategies of both players (Buchi games are
    // positionally determined).
    auto out = a.adjacency();
    std::vector<int> maxv, minv;
    for (int v = 0; v < nmin + nmax; ++v) (own[v] ? maxv : minv).push_back(v);
    auto wins = [&](int start, const std::vector<int>& smin, const std::vector<int>& smax) {
      std::vector<int> seen_at(nmin + nmax, -1), seq;
      int v = start;
      while (seen_at[v] < 0) {
        if ((own[v] ? smax[v] : smin[v]) < 0) return static_cast<bool>(own[v]); // dead end loses for its owner
        seen_at[v] = static_cast<int>(seq.size());
        seq.push_back(v);
        v = own[v] ? smax[v] : smin[v];
      }
      for (std::size_t i = seen_at[v]; i < seq.size(); ++i)
        if (a.final[seq[i]]) return true;
      return false;
    };
    for (int start = 0; start < nmin + nmax; ++start) {
      bool min_wins = false;
      std::vector<int> smin(nmin + nmax, -1), smax(nmin + nmax, -1);
      std::function<void(std::size_t)> pick_min = [&](std::size_t i) {
        if (min_wins) return;
        if (i == minv.size()) {
          bool all = true;
          std::function<void(std::size_t)> pick_max = [&](std::size_t j) {
            if (!all) return;
            if (j == maxv.size()) {
              all = wins(start, smin, smax);
              return;
            }
            if (out[maxv[j]].empty()) {
              smax[maxv[j]] = -1;
              pick_max(j + 1);
            }
            for (int d : out[maxv[j]]) {
              smax[maxv[j]] = d;
              pick_max(j + 1);
            }
          };
          pick_max(0);
          min_wins = all;
          return;
        }
        if (out[minv[i]].empty()) {
          smin[minv[i]] = -1;
          pick_min(i + 1);
        }
        for (int d : out[minv[i]]) {
          smin[minv[i]] = d;
          pick_min(i + 1);
        }
      };
      pick_min(0);
      CHECK(r.min_winning[start] == min_wins);
    }
  }
}

TEST_CASE("attractors rank by distance") {
  auto a = arena({false, false, false}, {{0, 1, 0}, {1, 2, 0}, {2, 2, 0}}, {0}, {});
  std::vector<int> rank;
  auto at = attractor(SubArena(a), {false, false, true}, Player::MIN, &rank);
  CHECK(at == std::vector<bool>{true, true, true});
  CHECK(rank == std::vector<int>{2, 1, 0});
}

TEST_CASE("pruning to accepting lassos") {
  auto g = dsum_inf_graph();
  CHECK(prune_to_accepting_lassos(g).size() == 3);
  auto none = graph(2, {{0, 1, 0}, {1, 1, 0}}, {0}, {0});
  CHECK(prune_to_accepting_lassos(none).size() == 0);
  auto branch = graph(4, {{0, 1, 0}, {1, 1, 0}, {0, 2, 0}, {2, 3, 0}, {3, 3, 0}}, {0}, {1});
  auto p = prune_to_accepting_lassos(branch);
  CHECK(p.size() == 2);
}

TEST_CASE("discounted single-player values") {
  auto loop = graph(1, {{0, 0, 3}}, {0}, {0});
  CHECK(min_dsum_single(loop, Rational(1, 2)).values[0] == Rational(6));
  auto v = min_dsum_single(dsum_inf_graph(), Rational(1, 2));
  CHECK(v.values[0] == Rational(1));
  CHECK(v.values[1] == Rational(0));
  CHECK(v.values[2] == Rational(2));
  auto dead = graph(2, {{0, 1, 1}}, {0}, {});
  CHECK_THROWS_AS(min_dsum_single(dead, Rational(1, 2)), Error);
}

TEST_CASE("discounted single-player values match lasso enumeration") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 150; ++it) {
    auto g = random_graph(rng, 4, 4);
    bool dead = false;
    auto adj = g.adjacency();
    for (const auto& s : adj) dead = dead || s.empty();
    if (dead) continue;
    g.final.assign(g.size(), true); // plain minimum over all lassos
    Rational l = it % 2 ? Rational(1, 2) : Rational(2, 3);
    auto v = min_dsum_single(g, l);
    auto b = brute::min_over_walk_lassos(brute::from_product(g), 8, [&](const Lasso<std::int64_t>& c) {
      return dsum_of(l, c);
    });
    REQUIRE(b);
    CHECK(v.values[0] == *b);
  }
}

TEST_CASE("discounted game values") {
  // Min vertex 0 -> Max 1; Max chooses loop weight 1 (via 2) or 3 (via 3).
  auto a = arena({false, false, false, true, true, true},
                 {{0, 3, 0}, {3, 1, 0}, {3, 2, 0}, {1, 4, 1}, {4, 1, 0}, {2, 5, 3}, {5, 2, 0}}, {0}, {1, 2});
  auto v = solve_dsum_game(a, Rational(1, 2));
  CHECK(v.values[0] == Rational(3));
  CHECK(v.values[2] == Rational(6));
  CHECK(v.values[1] == Rational(2));
  CHECK(v.certified);
  // Bellman residual is exactly zero.
  auto out = a.out_edges();
  for (std::size_t u = 0; u < a.size(); ++u) {
    if (a.max_owned[u]) continue;
    std::optional<Rational> best;
    for (int i : out[u]) {
      int m = a.edges[i].dst;
      std::optional<Rational> worst;
      for (int j : out[m])
        if (!worst || v.values[a.edges[j].dst] > *worst) worst = v.values[a.edges[j].dst];
      Rational x = Rational(a.edges[i].weight) + Rational(1, 2) * *worst;
      if (!best || x < *best) best = x;
    }
    CHECK(*best == v.values[u]);
  }
}

TEST_CASE("mean-payoff values") {
  auto loop = graph(1, {{0, 0, 7}}, {0}, {0});
  CHECK(solve_mean_game(loop).values[0] == Rational(7));
  CHECK(solve_mean_game(inset_graph()).values[0] == Rational(0));
  auto alt = graph(2, {{0, 1, 1}, {1, 0, 4}}, {0}, {0});
  CHECK(solve_mean_game(alt).values[0] == Rational(5, 2));

  // Max forces the heavier loop.
  auto a = arena({false, false, false, true, true, true},
                 {{0, 3, 0}, {3, 1, 0}, {3, 2, 0}, {1, 4, 1}, {4, 1, 0}, {2, 5, 3}, {5, 2, 0}}, {0}, {1, 2});
  auto v = solve_mean_game(a);
  CHECK(v.values[0] == Rational(3));
  CHECK(v.certified);
}

TEST_CASE("Karp minimum mean cycle") {
  CHECK(karp_min_mean_cycle(graph(1, {{0, 0, 7}}, {0}, {})).value == Rational(7));
  auto tri = graph(3, {{0, 1, 1}, {1, 2, 2}, {2, 0, 3}, {1, 1, 1}}, {0}, {});
  auto r = karp_min_mean_cycle(tri);
  CHECK(r.value == Rational(1));
  CHECK(r.cycle.cycle == std::vector<int>{1});
  auto in = karp_min_mean_cycle(inset_graph());
  CHECK(in.value == Rational(0));
  CHECK(in.cycle.cycle == std::vector<int>{0});
  CHECK_THROWS_AS(karp_min_mean_cycle(graph(2, {{0, 1, 1}}, {0}, {})), Error);
}

TEST_CASE("Karp agrees with simple-cycle enumeration") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 200; ++it) {
    auto g = random_graph(rng, 5, 6);
    g.final.assign(g.size(), true);
    auto b = brute::min_over_walk_lassos(brute::from_product(g), 6, [](const Lasso<std::int64_t>& c) {
      return eval_aggregator(Aggregator::mean(), c);
    });
    if (!b) {
      CHECK_THROWS_AS(karp_min_mean_cycle(g), Error);
      continue;
    }
    auto r = karp_min_mean_cycle(g);
    CHECK(r.value == *b);
    CHECK(r.value == Rational(r.d, r.n));
    CHECK(static_cast<std::int64_t>(r.cycle.cycle.size()) == r.n);
    CHECK(eval_aggregator(Aggregator::mean(), lasso_costs(g, r.cycle)) == r.value);
  }
}

TEST_CASE("Sup and LimSup lasso searches") {
  auto g = dsum_inf_graph();
  CHECK(minimax_lasso_sup(g).value == ExtRational(Rational(1)));
  CHECK(min_limsup_cycle(g).value == ExtRational(Rational(1)));
  auto flat = graph(2, {{0, 1, 5}, {1, 0, 5}}, {0}, {1});
  CHECK(minimax_lasso_sup(flat).value == ExtRational(Rational(5)));
  auto bridge = graph(2, {{0, 1, 100}, {1, 1, 0}}, {0}, {1});
  CHECK(min_limsup_cycle(bridge).value == ExtRational(Rational(0)));
  CHECK(minimax_lasso_sup(bridge).value == ExtRational(Rational(100)));
  auto none = graph(2, {{0, 1, 1}, {1, 1, 1}}, {0}, {0});
  CHECK(minimax_lasso_sup(none).infinite());
  CHECK(min_limsup_cycle(none).infinite());
}

TEST_CASE("Sup and LimSup searches agree with enumeration") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 200; ++it) {
    auto g = random_graph(rng, 5, 5);
    for (auto [agg, res] : {std::pair{Aggregator::sup(), minimax_lasso_sup(g)},
                            std::pair{Aggregator::limsup(), min_limsup_cycle(g)}}) {
      auto b = brute::min_over_walk_lassos(brute::from_product(g), 7, [&, a = agg](const Lasso<std::int64_t>& c) {
        return eval_aggregator(a, c);
      });
      CHECK(res.value == b);
      if (b) {
        REQUIRE(res.witness);
        CHECK(eval_aggregator(agg, lasso_costs(g, *res.witness)) == *b);
      }
    }
  }
}

TEST_CASE("positive scaling scales values and keeps choices") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 60; ++it) {
    auto g = random_graph(rng, 5, 4);
    bool dead = false;
    for (const auto& s : g.adjacency()) dead = dead || s.empty();
    if (dead) continue;
    auto scaled = g;
    for (auto& e : scaled.edges) e.weight *= 3;
    auto d1 = min_dsum_single(g, Rational(1, 2)), d3 = min_dsum_single(scaled, Rational(1, 2));
    auto m1 = solve_mean_game(g), m3 = solve_mean_game(scaled);
    for (std::size_t v = 0; v < g.size(); ++v) {
      CHECK(d3.values[v] == Rational(3) * d1.values[v]);
      CHECK(d3.strategy_min[v] == d1.strategy_min[v]);
      CHECK(m3.values[v] == Rational(3) * m1.values[v]);
    }
    auto s1 = minimax_lasso_sup(g), s3 = minimax_lasso_sup(scaled);
    CHECK(s1.infinite() == s3.infinite());
    if (!s1.infinite()) {
      CHECK(*s3.value == Rational(3) * *s1.value);
      CHECK(s3.witness == s1.witness);
    }
  }
}

TEST_CASE("threshold intervals follow the orientation") {
  auto r = make_threshold(Orientation::REPAIR, Rational(3), Attainment::ATTAINED, MemoryClass::POSITIONAL);
  REQUIRE(r.good.size() == 1);
  CHECK(r.good[0].str() == "[3/1,inf)");
  CHECK(r.bad[0].str() == "[0/1,3/1)");
  auto i = make_threshold(Orientation::IMPAIR, Rational(1), Attainment::INFIMUM_ONLY, MemoryClass::FINITE);
  CHECK(i.good[0].str() == "(0/1,1/1)");
  CHECK(i.bad[0].str() == "[1/1,inf)");
  auto inf = make_threshold(Orientation::REPAIR, std::nullopt, Attainment::ATTAINED, MemoryClass::POSITIONAL);
  CHECK(inf.good.empty());
  CHECK(inf.bad[0].str() == "[0/1,inf)");
}
