#include "omegarepair/model.hpp"
#include "omegarepair/error.hpp"
#include "omegarepair/graph.hpp"

#include <algorithm>
#include <set>

namespace omegarepair {

bool Diagnostics::has(const std::string& code) const {
  auto match = [&](const Diagnostic& d) { return d.code == code; };
  return std::any_of(errors.begin(), errors.end(), match) || std::any_of(warnings.begin(), warnings.end(), match);
}

const char* to_string(AggKind k) {
  switch (k) {
  case AggKind::DSUM: return "DSUM";
  case AggKind::MEAN: return "MEAN";
  case AggKind::SUP: return "SUP";
  case AggKind::LIMSUP: return "LIMSUP";
  }
  return "?";
}

std::string Aggregator::str() const {
  std::string s = to_string(kind);
  if (kind == AggKind::DSUM && lambda) s += " " + lambda->str();
  return s;
}

template <class V>
static int find_index(const V& v, const std::string& x) {
  auto it = std::find(v.begin(), v.end(), x);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

int KripkeStructure::index_of(const std::string& name) const { return find_index(states, name); }

std::vector<Symbol> KripkeStructure::propositions() const {
  std::vector<Symbol> p(label.begin(), label.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

std::vector<std::vector<int>> KripkeStructure::successors() const {
  std::vector<std::vector<int>> s(states.size());
  for (auto [a, b] : edges) s[a].push_back(b);
  return s;
}

int NBA::index_of(const std::string& name) const { return find_index(states, name); }
int NBA::symbol_index(const Symbol& s) const { return find_index(alphabet, s); }

std::vector<std::vector<std::vector<int>>> NBA::delta() const {
  std::vector<std::vector<std::vector<int>>> d(states.size(),
                                               std::vector<std::vector<int>>(alphabet.size()));
  for (const auto& e : edges) d[e.src][e.sym].push_back(e.dst);
  return d;
}

int RepairMachine::index_of(const std::string& name) const { return find_index(states, name); }
int RepairMachine::in_index(const Symbol& s) const { return find_index(in_alphabet, s); }
int RepairMachine::out_index(const Symbol& s) const { return find_index(out_alphabet, s); }

std::int64_t RepairMachine::max_cost() const {
  std::int64_t m = 0;
  for (const auto& e : edges) m = std::max(m, e.cost);
  return m;
}

// --- aggregators ---------------------------------------------------------

static Rational dsum_finite(const Rational& lambda, const std::vector<std::int64_t>& xs) {
  Rational s(0), w(1);
  for (auto x : xs) {
    s += w * Rational(x);
    w *= lambda;
  }
  return s;
}

Rational eval_aggregator(const Aggregator& agg, const Lasso<std::int64_t>& costs) {
  if (costs.cycle.empty()) throw Error(ErrorCode::INVALID_MODEL, "lasso cycle is empty");
  switch (agg.kind) {
  case AggKind::DSUM: {
    if (!agg.lambda || *agg.lambda <= Rational(0) || *agg.lambda >= Rational(1))
      throw Error(ErrorCode::BAD_AGGREGATOR, "DSUM needs 0 < lambda < 1");
    const Rational& l = *agg.lambda;
    Rational head = dsum_finite(l, costs.prefix);
    Rational loop = dsum_finite(l, costs.cycle) / (Rational(1) - l.pow(costs.cycle.size()));
    return head + l.pow(costs.prefix.size()) * loop;
  }
  case AggKind::MEAN: {
    Rational s(0);
    for (auto x : costs.cycle) s += Rational(x);
    return s / Rational(static_cast<std::int64_t>(costs.cycle.size()));
  }
  case AggKind::SUP: {
    std::int64_t m = *std::max_element(costs.cycle.begin(), costs.cycle.end());
    for (auto x : costs.prefix) m = std::max(m, x);
    return Rational(m);
  }
  case AggKind::LIMSUP:
    return Rational(*std::max_element(costs.cycle.begin(), costs.cycle.end()));
  }
  throw Error(ErrorCode::INTERNAL, "unknown aggregator");
}

// --- validation ----------------------------------------------------------

template <class Names>
static void check_names(const Names& names, const std::string& what, Diagnostics& d) {
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) d.error("DUPLICATE_STATE", what + " " + n, "state declared twice");
}

Diagnostics validate(const KripkeStructure& k) {
  Diagnostics d;
  const int n = static_cast<int>(k.states.size());
  check_names(k.states, "state", d);
  if (n == 0) d.error("EMPTY", "kripke", "no states");
  if (k.label.size() != k.states.size())
    d.error("BAD_LABEL", "kripke", "labeling must give one symbol per state");
  if (k.initial.empty()) d.error("BAD_INITIAL", "kripke", "no initial state");
  for (int i : k.initial)
    if (i < 0 || i >= n) d.error("BAD_INITIAL", "initial " + std::to_string(i), "not a state");
  std::vector<bool> has_succ(n, false);
  for (auto [a, b] : k.edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      d.error("BAD_EDGE", "edge " + std::to_string(a) + "->" + std::to_string(b), "endpoint not a state");
      continue;
    }
    has_succ[a] = true;
  }
  for (int s = 0; s < n; ++s)
    if (!has_succ[s]) d.error("DEAD_END", "state " + k.states[s], "no outgoing transition");
  return d;
}

Diagnostics validate(const NBA& a) {
  Diagnostics d;
  const int n = static_cast<int>(a.states.size());
  const int m = static_cast<int>(a.alphabet.size());
  check_names(a.states, "state", d);
  if (n == 0) d.error("EMPTY", "nba", "no states");
  if (a.accepting.size() != a.states.size())
    d.error("BAD_ACCEPTING", "nba", "accepting flags do not match the state count");
  for (int i : a.initial)
    if (i < 0 || i >= n) d.error("BAD_INITIAL", "initial " + std::to_string(i), "not a state");
  for (const auto& e : a.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      d.error("BAD_EDGE", "edge", "endpoint not a state");
    if (e.sym < 0 || e.sym >= m) d.error("BAD_SYMBOL", "edge", "symbol not in alphabet");
  }
  return d;
}

Diagnostics validate(const RepairMachine& t) {
  Diagnostics d;
  const int n = static_cast<int>(t.states.size());
  check_names(t.states, "state", d);
  if (n == 0) d.error("EMPTY", "rm", "no states");
  if (t.accepting.size() != t.states.size())
    d.error("BAD_ACCEPTING", "rm", "accepting flags do not match the state count");
  for (int i : t.initial)
    if (i < 0 || i >= n) d.error("BAD_INITIAL", "initial " + std::to_string(i), "not a state");
  if (t.agg.kind == AggKind::DSUM) {
    if (!t.agg.lambda || *t.agg.lambda <= Rational(0) || *t.agg.lambda >= Rational(1))
      d.error("BAD_LAMBDA", "aggregator", "DSUM needs 0 < lambda < 1");
  } else if (t.agg.lambda) {
    d.error("BAD_LAMBDA", "aggregator", "lambda only applies to DSUM");
  }
  for (const auto& e : t.edges) {
    std::string loc = "edge " + (e.src >= 0 && e.src < n ? t.states[e.src] : std::string("?"));
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) d.error("BAD_EDGE", loc, "endpoint not a state");
    if (e.in < 0 || e.in >= static_cast<int>(t.in_alphabet.size()))
      d.error("BAD_SYMBOL", loc, "input symbol not in IN alphabet");
    for (int o : e.out)
      if (o < 0 || o >= static_cast<int>(t.out_alphabet.size()))
        d.error("BAD_SYMBOL", loc, "output symbol not in OUT alphabet");
    if (e.cost < 0) d.error("NEGATIVE_COST", loc, "cost " + std::to_string(e.cost) + " is negative");
  }
  return d;
}

template <class M>
static void require_impl(const M& m, const char* what) {
  Diagnostics d = validate(m);
  if (!d.ok()) {
    const auto& e = d.errors.front();
    throw Error(ErrorCode::INVALID_MODEL,
                std::string(what) + ": " + e.code + " at " + e.location + ": " + e.message);
  }
}

void require_valid(const KripkeStructure& k) { require_impl(k, "kripke"); }
void require_valid(const NBA& a) { require_impl(a, "nba"); }
void require_valid(const RepairMachine& t) { require_impl(t, "rm"); }

template <class V>
static void sort_unique(V& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void canonicalize(KripkeStructure& k) {
  sort_unique(k.edges);
  sort_unique(k.initial);
}

void canonicalize(NBA& a) {
  sort_unique(a.edges);
  sort_unique(a.initial);
}

void canonicalize(RepairMachine& t) {
  sort_unique(t.edges);
  sort_unique(t.initial);
}

// --- kripke to NBA -------------------------------------------------------

NBA kripke_to_nba(const KripkeStructure& k) {
  require_valid(k);
  NBA a;
  a.alphabet = k.propositions();
  std::string init = "init";
  while (k.index_of(init) >= 0) init = "_" + init;
  a.states.push_back(init);
  for (const auto& s : k.states) a.states.push_back(s);
  a.initial = {0};
  a.accepting.assign(a.states.size(), true);
  for (int s0 : k.initial) a.edges.push_back({0, a.symbol_index(k.label[s0]), s0 + 1});
  for (auto [s, t] : k.edges) a.edges.push_back({s + 1, a.symbol_index(k.label[t]), t + 1});
  canonicalize(a);
  return a;
}

// --- lasso membership ----------------------------------------------------

bool lasso_membership(const NBA& a, const Lasso<Symbol>& w) {
  if (w.cycle.empty()) throw Error(ErrorCode::INVALID_MODEL, "lasso cycle is empty");
  std::vector<int> word;
  for (std::size_t i = 0; i < w.size(); ++i) {
    int s = a.symbol_index(w.at(i));
    if (s < 0) throw Error(ErrorCode::ALPHABET_MISMATCH, "symbol '" + w.at(i) + "' not in NBA alphabet");
    word.push_back(s);
  }
  const int n = static_cast<int>(a.states.size());
  const int len = static_cast<int>(word.size());
  const int loop = static_cast<int>(w.prefix.size());
  auto id = [&](int q, int pos) { return q * len + pos; };
  auto d = a.delta();
  Adjacency adj(static_cast<std::size_t>(n) * len);
  for (int q = 0; q < n; ++q)
    for (int pos = 0; pos < len; ++pos) {
      int next = pos + 1 < len ? pos + 1 : loop;
      for (int q2 : d[q][word[pos]]) adj[id(q, pos)].push_back(id(q2, next));
    }
  std::vector<int> src;
  for (int q0 : a.initial) src.push_back(id(q0, 0));
  auto reach = reachable_from(adj, src);
  auto scc = strongly_connected_components(adj);
  for (int q = 0; q < n; ++q) {
    if (!a.accepting[q]) continue;
    for (int pos = 0; pos < len; ++pos) {
      int v = id(q, pos);
      if (reach[v] && scc.nontrivial[scc.comp[v]]) return true;
    }
  }
  return false;
}

// --- runs ----------------------------------------------------------------

static void check_run_shape(const RepairMachine& t, const Lasso<int>& run) {
  if (run.cycle.empty()) throw Error(ErrorCode::INVALID_MODEL, "run cycle is empty");
  for (std::size_t i = 0; i < run.size(); ++i)
    if (run.at(i) < 0 || run.at(i) >= static_cast<int>(t.edges.size()))
      throw Error(ErrorCode::INVALID_MODEL, "run refers to a missing edge");
}

Lasso<std::int64_t> run_costs(const RepairMachine& t, const Lasso<int>& run) {
  check_run_shape(t, run);
  Lasso<std::int64_t> c;
  for (int e : run.prefix) c.prefix.push_back(t.edges[e].cost);
  for (int e : run.cycle) c.cycle.push_back(t.edges[e].cost);
  return c;
}

Lasso<Symbol> run_input(const RepairMachine& t, const Lasso<int>& run) {
  check_run_shape(t, run);
  Lasso<Symbol> w;
  for (int e : run.prefix) w.prefix.push_back(t.in_alphabet[t.edges[e].in]);
  for (int e : run.cycle) w.cycle.push_back(t.in_alphabet[t.edges[e].in]);
  return w;
}

Lasso<Symbol> run_output(const RepairMachine& t, const Lasso<int>& run) {
  check_run_shape(t, run);
  Lasso<Symbol> w;
  for (int e : run.prefix)
    for (int o : t.edges[e].out) w.prefix.push_back(t.out_alphabet[o]);
  for (int e : run.cycle)
    for (int o : t.edges[e].out) w.cycle.push_back(t.out_alphabet[o]);
  if (w.cycle.empty()) throw Error(ErrorCode::INFEASIBLE, "run emits a finite output word");
  return w;
}

bool is_run(const RepairMachine& t, const Lasso<int>& run) {
  check_run_shape(t, run);
  const auto& first = t.edges[run.at(0)];
  if (std::find(t.initial.begin(), t.initial.end(), first.src) == t.initial.end()) return false;
  for (std::size_t i = 0; i < run.size(); ++i)
    if (t.edges[run.at(i)].dst != t.edges[run.at(i + 1)].src) return false;
  return true;
}

} // namespace omegarepair
