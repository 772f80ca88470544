#pragma once

#include "omegarepair/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace omegarepair {

using Symbol = std::string;
using Word = std::vector<Symbol>;

// prefix . cycle^omega; cycle must be non-empty.
template <class T>
struct Lasso {
  std::vector<T> prefix;
  std::vector<T> cycle;

  std::size_t size() const { return prefix.size() + cycle.size(); }
  // Element at position i of the infinite unrolling.
  const T& at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : cycle[(i - prefix.size()) % cycle.size()];
  }
  bool operator==(const Lasso&) const = default;
};

struct Diagnostic {
  std::string code;
  std::string location;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
  bool ok() const { return errors.empty(); }
  bool has(const std::string& code) const;
  void error(std::string code, std::string loc, std::string msg) {
    errors.push_back({std::move(code), std::move(loc), std::move(msg)});
  }
  void warn(std::string code, std::string loc, std::string msg) {
    warnings.push_back({std::move(code), std::move(loc), std::move(msg)});
  }
};

struct KripkeStructure {
  std::vector<std::string> states;
  std::vector<Symbol> label;             // one symbol per state
  std::vector<std::pair<int, int>> edges;
  std::vector<int> initial;

  int index_of(const std::string& name) const;
  std::vector<Symbol> propositions() const; // sorted distinct labels
  std::vector<std::vector<int>> successors() const;
  bool operator==(const KripkeStructure&) const = default;
};

struct NbaEdge {
  int src;
  int sym;
  int dst;
  auto operator<=>(const NbaEdge&) const = default;
};

struct NBA {
  std::vector<std::string> states;
  std::vector<Symbol> alphabet;
  std::vector<int> initial;
  std::vector<bool> accepting;
  std::vector<NbaEdge> edges;

  int index_of(const std::string& name) const;
  int symbol_index(const Symbol& s) const;
  std::size_t size() const { return states.size(); }
  // succ[state][sym] -> destinations
  std::vector<std::vector<std::vector<int>>> delta() const;
  bool operator==(const NBA&) const = default;
};

enum class AggKind { DSUM, MEAN, SUP, LIMSUP };

const char* to_string(AggKind k);

struct Aggregator {
  AggKind kind = AggKind::MEAN;
  std::optional<Rational> lambda; // present iff kind == DSUM

  static Aggregator dsum(Rational l) { return {AggKind::DSUM, std::move(l)}; }
  static Aggregator mean() { return {AggKind::MEAN, std::nullopt}; }
  static Aggregator sup() { return {AggKind::SUP, std::nullopt}; }
  static Aggregator limsup() { return {AggKind::LIMSUP, std::nullopt}; }
  std::string str() const; // "DSUM 1/2", "MEAN", ...
  bool operator==(const Aggregator&) const = default;
};

struct RmEdge {
  int src;
  int in;               // index into in_alphabet
  int dst;
  std::vector<int> out; // indices into out_alphabet; empty = epsilon
  std::int64_t cost;
  auto operator<=>(const RmEdge&) const = default;
};

struct RepairMachine {
  std::vector<std::string> states;
  std::vector<Symbol> in_alphabet;
  std::vector<Symbol> out_alphabet;
  std::vector<int> initial;
  std::vector<bool> accepting;
  std::vector<RmEdge> edges;
  Aggregator agg;

  int index_of(const std::string& name) const;
  int in_index(const Symbol& s) const;
  int out_index(const Symbol& s) const;
  std::int64_t max_cost() const;
  bool operator==(const RepairMachine&) const = default;
};

// Exact value of the aggregator on prefix . cycle^omega.
Rational eval_aggregator(const Aggregator& agg, const Lasso<std::int64_t>& costs);

Diagnostics validate(const KripkeStructure& k);
Diagnostics validate(const NBA& a);
Diagnostics validate(const RepairMachine& t);

// Throws Error(INVALID_MODEL) carrying the first diagnostic.
void require_valid(const KripkeStructure& k);
void require_valid(const NBA& a);
void require_valid(const RepairMachine& t);

// Sort and deduplicate edges and initial sets so that equal models compare equal.
void canonicalize(KripkeStructure& k);
void canonicalize(NBA& a);
void canonicalize(RepairMachine& t);

// NBA whose language is the trace set of k. A fresh initial state is added.
NBA kripke_to_nba(const KripkeStructure& k);

bool lasso_membership(const NBA& a, const Lasso<Symbol>& w);

// Helpers for evaluating a fixed run of a repair machine given as a lasso of
// edge indices.
Lasso<std::int64_t> run_costs(const RepairMachine& t, const Lasso<int>& run);
Lasso<Symbol> run_input(const RepairMachine& t, const Lasso<int>& run);
// Throws Error(INFEASIBLE) when the cycle emits only epsilon.
Lasso<Symbol> run_output(const RepairMachine& t, const Lasso<int>& run);
// True when consecutive edges chain and the run starts in an initial state.
bool is_run(const RepairMachine& t, const Lasso<int>& run);

// Lasso with its cycle folded into the prefix where possible; used to compare
// lassos denoting the same omega-word.
template <class T>
Lasso<T> normalize_lasso(Lasso<T> l) {
  // shortest cycle period
  std::size_t n = l.cycle.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = l.cycle[i] == l.cycle[i - p];
    if (ok) {
      l.cycle.resize(p);
      break;
    }
  }
  // roll the cycle back into the prefix
  while (!l.prefix.empty() && l.prefix.back() == l.cycle.back()) {
    l.prefix.pop_back();
    std::rotate(l.cycle.rbegin(), l.cycle.rbegin() + 1, l.cycle.rend());
  }
  return l;
}

} // namespace omegarepair
