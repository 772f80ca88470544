#pragma once

#include "omegarepair/graph.hpp"
#include "omegarepair/model.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace omegarepair {

// One way of reading a word in an NBA. `path` lists the states entered after
// `from`, so path.back() == to when the word is non-empty.
struct ExtendedMove {
  int from = 0;
  std::vector<int> word;
  int to = 0;
  bool visits_accepting = false; // some state in `path` is accepting
  std::vector<int> path;
};

// All distinct (to, visits_accepting) outcomes of reading `word` from `from`.
// The empty word yields exactly {(from, eps, from, false)}.
std::vector<ExtendedMove> extended_moves(const NBA& b, int from, const std::vector<int>& word);
std::vector<ExtendedMove> extended_moves(const NBA& b, int from, const Word& word);

struct ProductVertex {
  int kripke = 0;
  int rm = 0;
  int nba = 0;
  int counter = 1; // 1 or 2
  auto operator<=>(const ProductVertex&) const = default;
};

struct ProductEdge {
  int src = 0;
  int dst = 0;
  std::int64_t weight = 0;
  int rm_edge = 0;            // witnessing repair-machine edge (minimal cost)
  std::vector<int> nba_path;  // states entered while reading its output
  bool traversed_accepting = false;
};

struct ProductOptions {
  // Counter follows the endpoint-only rule: 1->2 on an accepting RM target,
  // 2->1 on an accepting NBA source, final = accepting NBA state at counter 2.
  // The default rule instead lets counter 1 wait for an NBA visit anywhere
  // inside the emitted word and counter 2 wait for an accepting RM state.
  bool literal_counter = false;
};

struct ProductGraph {
  std::vector<ProductVertex> vertices; // sorted, reachable from `initial`
  std::vector<ProductEdge> edges;      // sorted by (src, dst), one per pair
  std::vector<int> initial;
  std::vector<bool> final;

  std::size_t size() const { return vertices.size(); }
  int index_of(const ProductVertex& v) const; // -1 if absent
  Adjacency adjacency() const;
  std::vector<std::vector<int>> out_edges() const; // vertex -> edge indices
  std::int64_t max_weight() const;
  // Subgraph induced by `keep`; vertices are renumbered in order.
  ProductGraph induced(const std::vector<bool>& keep) const;
  // Same vertices, only edges with weight <= bound.
  ProductGraph with_max_weight(std::int64_t bound) const;
};

ProductGraph build_product(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                           const ProductOptions& opt = {});

// Vertex kinds: Min owns product vertices (counter 1, 2); Max owns the
// intermediate vertices (counter 3) where the Kripke successor is chosen.
struct ArenaVertex {
  int kripke = 0;
  int rm = 0;
  int nba = 0;
  int counter = 1;      // 1, 2 for Min; 3 for Max
  int next_counter = 0; // for Max vertices: the counter the round will end in
  auto operator<=>(const ArenaVertex&) const = default;
};

struct ArenaEdge {
  int src = 0;
  int dst = 0;
  std::int64_t weight = 0;
  int product_edge = -1; // a product edge realizing this arena edge
};

struct GameArena {
  std::vector<ArenaVertex> vertices; // Min vertices first, indexed like the product
  std::vector<bool> max_owned;
  std::vector<ArenaEdge> edges;
  std::vector<int> initial;
  std::vector<bool> final;
  int min_count = 0;

  std::size_t size() const { return vertices.size(); }
  Adjacency adjacency() const;
  std::vector<std::vector<int>> out_edges() const;
  std::int64_t max_weight() const;
};

// Every product edge e = (u, v) becomes u -> m (weight W(e)) and m -> v
// (weight 0) where m = (s, q', p', 3). Max vertices are shared by all product
// edges that only differ in the Kripke successor, so Min never picks it.
GameArena build_arena(const ProductGraph& g);

// Domain restriction T' with dom(T') = dom(T) intersected with L(n).
RepairMachine restrict_domain(const RepairMachine& t, const NBA& n);

// Machine whose accepting runs are the runs of t with output accepted by a.
RepairMachine output_product(const RepairMachine& t, const NBA& a);

// Drop states that are unreachable or cannot reach an accepting cycle.
RepairMachine trim(const RepairMachine& t);

// Input projection: NBA over the input alphabet (costs and outputs dropped).
NBA input_projection(const RepairMachine& t);

// Intersection of two NBAs over the same alphabet (two-flag product).
NBA intersect(const NBA& a, const NBA& b);

// Drop NBA states that are unreachable or cannot reach an accepting cycle.
NBA trim(const NBA& a);

} // namespace omegarepair
