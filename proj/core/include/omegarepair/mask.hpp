#pragma once

#include "omegarepair/model.hpp"
#include "omegarepair/product.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace omegarepair {

// --- complementation -----------------------------------------------------

// Default bound on the number of (trimmed) input states accepted by
// complement_nba; OMEGAREPAIR_COMPLEMENT_LIMIT overrides it.
inline constexpr std::size_t kDefaultComplementLimit = 12;
std::size_t complement_limit();

// Rank-based complementation (subset phase, then tight level rankings with a
// breakpoint set). Throws SIZE_LIMIT when the input or the construction gets
// too large.
NBA complement_nba(const NBA& a);

bool is_deterministic(const NBA& a);

// --- machine x input lasso -----------------------------------------------

// Graph of the runs of t on `input`: vertices (position, state) encoded as
// ProductVertex{kripke = position, rm = state}; final = accepting state at a
// cycle position. Edges keep the cheapest transition.
ProductGraph machine_lasso_product(const RepairMachine& t, const Lasso<Symbol>& input);

// Infimum over accepting runs of t on `input` of the aggregated cost.
ExtRational min_run_value(const RepairMachine& t, const Lasso<Symbol>& input);

// Accepting runs of this machine are the bad rewrites: trim(output_product(tq, a)).
RepairMachine bad_rewrite_machine(const RepairMachine& tq, const NBA& a);

// Inputs with an accepting run of tq that emits infinitely many output letters.
NBA domain_nba(const RepairMachine& tq);

// --- DSum masks ----------------------------------------------------------

// B_m = lambda^m * W_max / (1 - lambda) for the bad-rewrite machine.
Rational dsum_tail_bound(const RepairMachine& tpp, std::int64_t m);
// Smallest m with B_m <= epsilon / 2.
std::int64_t dsum_mask_depth(const RepairMachine& tq, const NBA& a, const Rational& epsilon);

// A_n: words with a partial bad run of length n whose discounted cost is at
// most tau - B_n. With n absent the depth dsum_mask_depth is used.
NBA dsum_mask_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau, const Rational& epsilon,
                      std::optional<std::int64_t> n = std::nullopt);

struct ChainReport {
  std::int64_t n_star = 0;
  std::int64_t stable_at = 0;    // first depth after which sampled membership no longer changes
  bool chain_ok = true;          // membership is monotone in the depth
  std::vector<std::vector<bool>> membership; // [depth][sample]
  Diagnostics diagnostics;       // NOT_ISOLATED warnings
};

ChainReport dsum_mask_chain_check(const RepairMachine& tq, const NBA& a, const Rational& tau,
                                  const Rational& epsilon, std::int64_t upto,
                                  const std::vector<Lasso<Symbol>>& samples);

// --- Sup / LimSup masks --------------------------------------------------

// NBA with a weight per edge (parallel to nba.edges).
struct SupAutomaton {
  NBA nba;
  std::vector<std::int64_t> weight;
};

// Input projection of the bad-rewrite machine with its costs.
SupAutomaton sup_automaton(const RepairMachine& tpp);

// Two copies; copy 1 (entered on a weight above tau) is accepting. Requires a
// deterministic automaton (NONDET_INPUT otherwise).
NBA sup_gt_threshold_nba(const SupAutomaton& u, const Rational& tau);

// Words of dom(tq) that admit no bad rewrite of cost <= tau.
NBA sup_mask(const RepairMachine& tq, const NBA& a, const Rational& tau);
NBA limsup_mask(const RepairMachine& tq, const NBA& a, const Rational& tau);

// Bad-word automata used by the masks (before complementation).
NBA sup_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau);
NBA limsup_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau);

// Dispatch on tq's aggregator. MEAN throws UNDECIDABLE_MEAN_MASK.
NBA synthesize_mask(const RepairMachine& tq, const NBA& a, const Rational& tau,
                    const std::optional<Rational>& epsilon, std::optional<std::int64_t> depth);

} // namespace omegarepair
