#pragma once

#include "omegarepair/product.hpp"
#include "omegarepair/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace omegarepair {

enum class ExitKind { AFTER_STEPS, AFTER_ANCHOR_HITS, AFTER_ACCEPTING_VISIT, FOREVER };

struct ExitRule {
  ExitKind kind = ExitKind::FOREVER;
  std::int64_t n = 0; // steps or anchor hits
  int anchor = -1;
  bool operator==(const ExitRule&) const = default;
};

// One mode: a positional map over Min vertices of the arena (vertex -> Max
// vertex) plus the rule for leaving it. `next` is the mode entered on exit.
struct StrategyMode {
  std::vector<std::pair<int, int>> map; // sorted by vertex
  ExitRule exit;
  int next = -1;
  bool operator==(const StrategyMode&) const = default;
};

struct FiniteMemoryStrategy {
  std::vector<StrategyMode> modes;
  std::vector<int> starts; // chosen initial vertex per Kripke initial state
  std::optional<Rational> epsilon;
  std::int64_t k = 0; // step bound of the first mode, when relevant

  int successor(int mode, int v) const; // -1 if undefined
  std::string serialize() const;
  static FiniteMemoryStrategy parse(const std::string& text);
  bool operator==(const FiniteMemoryStrategy&) const = default;
};

const char* to_string(ExitKind k);

struct RepairSolution {
  ThresholdResult threshold;
  std::optional<FiniteMemoryStrategy> strategy; // absent when tau* is infinite
};

// Initial vertices of the arena grouped by Kripke initial state, in order.
std::vector<std::vector<int>> start_groups(const GameArena& a);

// Threshold and an (epsilon-)optimal strategy on a prepared arena. epsilon is
// only consulted for DSUM and MEAN.
RepairSolution solve_repair(const GameArena& a, const Aggregator& agg,
                            const std::optional<Rational>& epsilon = std::nullopt);

ThresholdResult repair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                                 const ProductOptions& opt = {});

// SUP / LIMSUP threshold on an arena where Min wins the Buchi game from every
// Kripke initial state (throws INFEASIBLE otherwise).
ThresholdResult sup_threshold_by_edge_removal(const GameArena& a, AggKind mode);

FiniteMemoryStrategy repair_strategy(const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                                     const Rational& epsilon, const ProductOptions& opt = {});

// Play of a finite-memory Min strategy against a positional Max strategy
// (Max vertex -> Min vertex) from `start`.
struct StrategyPlay {
  Lasso<int> vertices;             // Min vertices visited, one per round
  Lasso<std::int64_t> costs;       // round costs
  bool accepting = false;          // cycle visits a final vertex
};

StrategyPlay play_strategy(const GameArena& a, const FiniteMemoryStrategy& s,
                           const std::vector<int>& max_strategy, int start);

} // namespace omegarepair
