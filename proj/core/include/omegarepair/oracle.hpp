#pragma once

#include "omegarepair/model.hpp"
#include "omegarepair/product.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace omegarepair {

// Limits for the exhaustive searches. Zero prefix/cycle bounds mean the
// defaults |V|^2 and |V|.
struct OracleBudget {
  std::size_t max_prefix = 0;
  std::size_t max_cycle = 0;
  std::size_t max_vertices = 64;
  std::size_t max_strategies = 1 << 14;
  std::size_t max_steps = 20'000'000; // DFS nodes
};

// Every lasso prefix.cycle^omega from the initial vertices whose path
// prefix+cycle is simple and whose cycle meets a final vertex. Each lasso is
// reported once. Throws BUDGET_EXCEEDED on oversized graphs.
void enumerate_accepting_lassos(const ProductGraph& g, const OracleBudget& b,
                                const std::function<void(const Lasso<int>&)>& fn);
std::vector<Lasso<int>> accepting_lassos(const ProductGraph& g, const OracleBudget& b = {});

ExtRational brute_impair_threshold(const ProductGraph& g, const Aggregator& agg, const OracleBudget& b = {});

// Enumerates Max's positional strategies on the arena; see brute_repair_threshold.
ExtRational brute_repair_threshold(const GameArena& a, const Aggregator& agg, const OracleBudget& b = {});
ExtRational brute_repair_threshold(const KripkeStructure& k, const RepairMachine& t, const NBA& spec,
                                   const Aggregator& agg, const OracleBudget& b = {});

// Lasso-shaped accepting run of trim(output_product(tq, a)) on `input` with
// aggregated cost <= tau: a prefix of at most max_prefix steps followed by a
// simple cycle. Vertices are those of machine_lasso_product.
std::optional<Lasso<int>> bounded_bad_rewrite(const RepairMachine& tq, const NBA& a, const Lasso<Symbol>& input,
                                              const Rational& tau, const Aggregator& agg,
                                              const OracleBudget& b = {});

// --- random instances ----------------------------------------------------

struct GeneratorConfig {
  int max_kripke_states = 3;
  int max_rm_states = 3;
  int max_nba_states = 3;
  int max_weight = 4;
  int max_output_length = 2;
  int extra_edge_percent = 30;
  int accepting_percent = 50;
  std::vector<std::string> symbols{"a", "b"};
  std::vector<std::string> lambdas{"1/2", "1/3", "2/3"};
  std::size_t max_strategies = 1 << 12;
  std::size_t max_product_vertices = 40;
  // Share of instances resampled until the brute-force repair threshold is
  // finite; the rest only need a finite impair threshold.
  int finite_repair_percent = 60;
};

GeneratorConfig parse_generator_config(const std::string& json_text);
std::string generator_config_json(const GeneratorConfig& c);

struct RandomInstance {
  KripkeStructure kripke;
  RepairMachine rm; // aggregator set per query
  NBA nba;
  Rational lambda;
};

// Deterministic in (seed, config). Instances whose arena would exceed the
// strategy budget are resampled from the same stream.
RandomInstance random_instance(std::uint64_t seed, const GeneratorConfig& c = {});

struct OracleLine {
  std::uint64_t seed = 0;
  AggKind agg = AggKind::MEAN;
  bool repair = false;
  ExtRational solver;
  ExtRational oracle;
  bool ok() const { return solver == oracle; }
  // SEED <n> AGG <a> PROBLEM <REPAIR|IMPAIR> SOLVER p/q ORACLE p/q VERDICT OK|MISMATCH
  std::string str() const;
};

// Solver vs brute force for every aggregator, repair and impair, on
// `count` instances starting at `seed`.
std::vector<OracleLine> run_oracle(std::uint64_t seed, std::size_t count, const GeneratorConfig& c = {},
                                   const OracleBudget& b = {});

} // namespace omegarepair
