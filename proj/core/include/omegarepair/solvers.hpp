#pragma once

#include "omegarepair/product.hpp"
#include "omegarepair/rational.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace omegarepair {

enum class Player { MIN, MAX };

// A sub-arena: a vertex subset of an arena, optionally with Min edges above a
// weight bound removed. Edges leaving the subset are ignored.
class SubArena {
public:
  explicit SubArena(const GameArena& a);
  SubArena restrict_to(const std::vector<bool>& keep) const;
  SubArena with_bound(std::int64_t bound) const;

  const GameArena& arena() const { return *arena_; }
  bool contains(int v) const { return in_[v]; }
  const std::vector<bool>& vertices() const { return in_; }
  bool edge_ok(int e) const;
  // Edge indices leaving / entering v inside the sub-arena.
  std::vector<int> out(int v) const;
  std::vector<int> in(int v) const;
  std::optional<std::int64_t> bound() const { return bound_; }

private:
  const GameArena* arena_;
  std::vector<bool> in_;
  std::optional<std::int64_t> bound_;
  std::shared_ptr<const std::vector<std::vector<int>>> out_, in_edges_;
};

// Vertices from which player p forces a visit to `target`. Vertices with no
// successor inside the sub-arena are lost by their owner. `rank` receives the
// attractor distance (-1 outside).
std::vector<bool> attractor(const SubArena& s, const std::vector<bool>& target, Player p,
                            std::vector<int>* rank = nullptr);

struct BuchiGameResult {
  std::vector<bool> min_winning;
  std::vector<bool> max_winning;
  // Positional strategies: successor vertex for owned vertices, -1 elsewhere.
  std::vector<int> min_strategy;
  std::vector<int> max_strategy;
};

// Classical attractor fixpoint. `favored` owns the Buchi objective on the
// arena's final vertices.
BuchiGameResult solve_buchi_game(const GameArena& arena, Player favored = Player::MIN);
BuchiGameResult solve_buchi_game(const SubArena& s, Player favored = Player::MIN);

// Keep the vertices from which some accepting lasso starts.
ProductGraph prune_to_accepting_lassos(const ProductGraph& g);

struct ValueMap {
  std::vector<Rational> values;   // indexed by vertex; zero outside the solved region
  std::vector<int> strategy_min;  // successor vertex, -1 where undefined
  std::vector<int> strategy_max;
  bool certified = true;          // strategies proven optimal
};

// Round-granular discounted game: V(u) = min over Min edges (u, m) of
// W(u, m) + lambda * max over Max replies V(u'). Values of Max vertices are
// the max over their replies.
ValueMap solve_dsum_game(const GameArena& arena, const Rational& lambda);
ValueMap solve_dsum_game(const SubArena& s, const Rational& lambda);

// Single-player minimum discounted cost from every vertex of g.
ValueMap min_dsum_single(const ProductGraph& g, const Rational& lambda);

// Round-granular mean-payoff game values (Min minimizes).
ValueMap solve_mean_game(const GameArena& arena);
ValueMap solve_mean_game(const SubArena& s);
// Single-player minimum reachable cycle mean from every vertex of g.
ValueMap solve_mean_game(const ProductGraph& g);

struct WeightedDigraph {
  struct Edge {
    int src;
    int dst;
    std::int64_t w;
  };
  int n = 0;
  std::vector<Edge> edges;

  static WeightedDigraph from(const ProductGraph& g);
  Adjacency adjacency() const;
};

struct CycleResult {
  Rational value;
  Lasso<int> cycle; // prefix = access path from a source, cycle = simple cycle
  std::int64_t d = 0; // total weight of the cycle
  std::int64_t n = 0; // length of the cycle
};

// Minimum mean cycle among cycles reachable from `sources` (all vertices when
// empty). Throws Error(ACYCLIC) if there is none.
CycleResult karp_min_mean_cycle(const WeightedDigraph& g, const std::vector<int>& sources = {});
CycleResult karp_min_mean_cycle(const ProductGraph& g);

// Minimum mean cycle inside the strongly connected vertex set `scc` (edges
// leaving it are ignored). The witness passes through a vertex marked in
// `prefer` whenever some optimal cycle does. The prefix is empty.
CycleResult min_mean_cycle_within(const WeightedDigraph& g, const std::vector<int>& scc,
                                  const std::vector<bool>* prefer = nullptr);

// Per-vertex minimum mean over cycles reachable from that vertex; nullopt if
// no cycle is reachable. With maximize=true the maximum instead.
std::vector<std::optional<Rational>> reachable_cycle_mean(const WeightedDigraph& g, bool maximize);

enum class Attainment { ATTAINED, INFIMUM_ONLY };
enum class MemoryClass { POSITIONAL, FINITE, INFINITE_FOR_EXACT };
enum class Orientation { REPAIR, IMPAIR };

const char* to_string(Attainment a);
const char* to_string(MemoryClass m);
const char* to_string(Orientation o);

struct Interval {
  Rational lo;
  ExtRational hi; // nullopt = infinity
  bool lo_closed = true;
  bool hi_closed = false;
  std::string str() const;
};

struct ThresholdResult {
  ExtRational value; // nullopt = infinity
  Attainment attainment = Attainment::ATTAINED;
  MemoryClass memory = MemoryClass::POSITIONAL;
  Orientation orientation = Orientation::REPAIR;
  std::vector<Interval> good;
  std::vector<Interval> bad;
  std::optional<Lasso<int>> witness; // optimal lasso over product vertices, when known

  bool infinite() const { return !value.has_value(); }
};

// Fills in the good/bad interval description for the orientation.
ThresholdResult make_threshold(Orientation o, ExtRational value, Attainment a, MemoryClass m);

// Min over accepting lassos from the initial vertices of the max edge weight.
ThresholdResult minimax_lasso_sup(const ProductGraph& g);

// Min over reachable accepting cycles of the max edge weight on the cycle.
ThresholdResult min_limsup_cycle(const ProductGraph& g);

// Breadth-first path (vertex list, both ends included) from any source to a
// vertex satisfying `goal`, using only edges accepted by `edge_ok`. Lowest ids
// are explored first. Empty if unreachable.
std::vector<int> bfs_path(const ProductGraph& g, const std::vector<int>& sources,
                          const std::vector<bool>& goal, const std::vector<bool>* edge_ok = nullptr);

// Cost lasso of a vertex lasso in g (edge weights between consecutive vertices).
Lasso<std::int64_t> lasso_costs(const ProductGraph& g, const Lasso<int>& run);

} // namespace omegarepair
