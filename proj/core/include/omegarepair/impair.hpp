#pragma once

#include "omegarepair/product.hpp"
#include "omegarepair/solvers.hpp"

#include <cstdint>
#include <string>

namespace omegarepair {

struct ImpairWitness {
  Lasso<Symbol> trace;
  Lasso<Symbol> rewrite;
  Lasso<ProductVertex> run;
  Lasso<int> run_ids;            // product vertex indices
  Lasso<std::int64_t> costs;
  Rational cost;

  // TRACE / REWRITE / COST lines; symbols joined by '.', prefix|cycle.
  std::string serialize() const;
};

// Threshold on an already built product (the NBA describes the bad language).
ThresholdResult impair_threshold(const ProductGraph& g, const Aggregator& agg);
ThresholdResult impair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& bad,
                                 const ProductOptions& opt = {});

// Accepting product lasso with cost <= tau* + epsilon (exactly tau* for SUP
// and LIMSUP). Throws INFEASIBLE when tau* is infinite.
Lasso<int> impair_witness_run(const ProductGraph& g, const Aggregator& agg, const Rational& epsilon);

ImpairWitness impair_witness(const KripkeStructure& k, const RepairMachine& t, const NBA& bad,
                             const Rational& epsilon, const ProductOptions& opt = {});

// Projects a product lasso to trace, rewrite and cost.
ImpairWitness make_witness(const ProductGraph& g, const KripkeStructure& k, const RepairMachine& t,
                           const Lasso<int>& run);

// Mean of i alternation rounds: sum_{j<=i} 2^j copies of a (d1, n1) cycle and
// i traversals of a (d2, n2) return walk.
Rational mean_round_value(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2, unsigned i);
// Same quantity accumulated round by round.
Rational mean_round_simulated(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2, unsigned i);
// Smallest i >= 1 with |a_i - d1/n1| <= epsilon.
unsigned mean_round_index(std::int64_t d1, std::int64_t n1, std::int64_t d2, std::int64_t n2,
                          const Rational& epsilon);

} // namespace omegarepair
