#include "omegarepair/mask.hpp"
#include "omegarepair/error.hpp"
#include "omegarepair/impair.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace omegarepair {

ProductGraph machine_lasso_product(const RepairMachine& t, const Lasso<Symbol>& input) {
  if (input.cycle.empty()) throw Error(ErrorCode::INVALID_MODEL, "lasso cycle must be non-empty");
  const int len = static_cast<int>(input.size());
  const int pre = static_cast<int>(input.prefix.size());
  std::vector<int> sym(len);
  for (int i = 0; i < len; ++i) {
    sym[i] = t.in_index(input.at(i));
    if (sym[i] < 0) throw Error(ErrorCode::ALPHABET_MISMATCH, "symbol " + input.at(i) + " is not a machine input");
  }
  const int nq = static_cast<int>(t.states.size());
  ProductGraph g;
  for (int i = 0; i < len; ++i)
    for (int q = 0; q < nq; ++q) {
      g.vertices.push_back({i, q, 0, 1});
      g.final.push_back(i >= pre && t.accepting[q]);
    }
  auto vid = [&](int i, int q) { return i * nq + q; };
  for (int q : t.initial) g.initial.push_back(vid(0, q));
  std::sort(g.initial.begin(), g.initial.end());
  std::map<std::pair<int, int>, std::size_t> at;
  for (int i = 0; i < len; ++i) {
    int nx = i + 1 < len ? i + 1 : pre;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      const auto& te = t.edges[e];
      if (te.in != sym[i]) continue;
      std::pair<int, int> key{vid(i, te.src), vid(nx, te.dst)};
      auto it = at.find(key);
      if (it == at.end()) {
        at[key] = g.edges.size();
        g.edges.push_back({key.first, key.second, te.cost, static_cast<int>(e), {}, false});
      } else if (te.cost < g.edges[it->second].weight) {
        g.edges[it->second].weight = te.cost;
        g.edges[it->second].rm_edge = static_cast<int>(e);
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const ProductEdge& x, const ProductEdge& y) { return std::tie(x.src, x.dst) < std::tie(y.src, y.dst); });
  return g;
}

ExtRational min_run_value(const RepairMachine& t, const Lasso<Symbol>& input) {
  return impair_threshold(machine_lasso_product(t, input), t.agg).value;
}

RepairMachine bad_rewrite_machine(const RepairMachine& tq, const NBA& a) {
  return trim(output_product(tq, a));
}

NBA domain_nba(const RepairMachine& tq) {
  // A run only yields an omega-word when it emits output infinitely often.
  // Phase 0 waits for an accepting state, phase 1 for a non-empty output;
  // phase 2 marks a completed round and restarts like phase 0.
  RepairMachine t = trim(tq);
  const int n = static_cast<int>(t.states.size());
  NBA r;
  r.alphabet = t.in_alphabet;
  for (int c = 0; c < 3; ++c)
    for (int q = 0; q < n; ++q) {
      r.states.push_back(t.states[q] + "|" + std::to_string(c));
      r.accepting.push_back(c == 2);
    }
  r.initial = t.initial;
  for (const auto& e : t.edges)
    for (int c = 0; c < 3; ++c) {
      int next = c;
      if (c != 1) next = t.accepting[e.src] ? 1 : 0;
      if (next == 1 && !e.out.empty()) next = 2;
      r.edges.push_back({c * n + e.src, e.in, next * n + e.dst});
    }
  canonicalize(r);
  return trim(r);
}

static const Rational& need_lambda(const RepairMachine& t) {
  if (t.agg.kind != AggKind::DSUM || !t.agg.lambda)
    throw Error(ErrorCode::BAD_AGGREGATOR, "DSum mask needs a DSUM machine");
  return *t.agg.lambda;
}

Rational dsum_tail_bound(const RepairMachine& tpp, std::int64_t m) {
  const Rational& l = need_lambda(tpp);
  return l.pow(static_cast<unsigned>(m)) * Rational(tpp.max_cost()) / (Rational(1) - l);
}

std::int64_t dsum_mask_depth(const RepairMachine& tq, const NBA& a, const Rational& epsilon) {
  if (epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  need_lambda(tq);
  RepairMachine tpp = bad_rewrite_machine(tq, a);
  tpp.agg = tq.agg;
  const Rational half = epsilon / Rational(2);
  const Rational& l = *tq.agg.lambda;
  Rational b = dsum_tail_bound(tpp, 0);
  std::int64_t m = 0;
  while (b > half) {
    b *= l;
    ++m;
  }
  return m;
}

NBA dsum_mask_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau, const Rational& epsilon,
                      std::optional<std::int64_t> depth) {
  if (epsilon <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
  const Rational& lambda = need_lambda(tq);
  RepairMachine tpp = bad_rewrite_machine(tq, a);
  tpp.agg = tq.agg;
  const std::int64_t n = depth ? *depth : dsum_mask_depth(tq, a, epsilon);
  if (n < 0) throw Error(ErrorCode::INVALID_MODEL, "mask depth must be non-negative");
  const Rational danger = tau - dsum_tail_bound(tpp, n);

  NBA r;
  r.alphabet = tq.in_alphabet;
  const int nq = static_cast<int>(tpp.states.size());
  // States 0..nq-1: copy of the input projection of the bad-rewrite machine.
  for (int q = 0; q < nq; ++q) {
    r.states.push_back("c:" + tpp.states[q]);
    r.accepting.push_back(tpp.accepting[q]);
  }
  for (const auto& e : tpp.edges) r.edges.push_back({e.src, e.in, e.dst});

  using Key = std::tuple<std::int64_t, int, Rational>;
  std::map<Key, int> id;
  std::vector<Key> keys;
  std::deque<int> work;
  auto intern = [&](Key k) {
    auto [it, fresh] = id.emplace(k, static_cast<int>(r.states.size()));
    if (fresh) {
      auto& [d, q, c] = k;
      r.states.push_back("d" + std::to_string(d) + ":" + tpp.states[q] + ":" + c.str());
      r.accepting.push_back(false);
      keys.push_back(k);
      work.push_back(it->second);
    }
    return it->second;
  };
  for (int q : tpp.initial) r.initial.push_back(intern({0, q, Rational(0)}));
  while (!work.empty()) {
    int ui = work.front();
    work.pop_front();
    auto [d, q, c] = keys[ui - nq];
    if (d == n) {
      // Dangerous: continue as the bad-rewrite machine from q.
      if (c <= danger)
        for (const auto& e : tpp.edges)
          if (e.src == q) r.edges.push_back({ui, e.in, e.dst});
      continue;
    }
    Rational scale = lambda.pow(static_cast<unsigned>(d));
    for (const auto& e : tpp.edges) {
      if (e.src != q) continue;
      Rational nc = c + scale * Rational(e.cost);
      if (nc > tau) continue; // costs only grow
      r.edges.push_back({ui, e.in, intern({d + 1, e.dst, nc})});
    }
  }
  canonicalize(r);
  return trim(r);
}

ChainReport dsum_mask_chain_check(const RepairMachine& tq, const NBA& a, const Rational& tau,
                                  const Rational& epsilon, std::int64_t upto,
                                  const std::vector<Lasso<Symbol>>& samples) {
  ChainReport rep;
  rep.n_star = dsum_mask_depth(tq, a, epsilon);
  for (std::int64_t m = 0; m <= upto; ++m) {
    NBA am = dsum_mask_bad_nba(tq, a, tau, epsilon, m);
    std::vector<bool> row;
    for (const auto& w : samples) row.push_back(lasso_membership(am, w));
    rep.membership.push_back(row);
  }
  for (std::size_t m = 0; m + 1 < rep.membership.size(); ++m)
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (rep.membership[m][i] && !rep.membership[m + 1][i]) rep.chain_ok = false;
  rep.stable_at = upto;
  while (rep.stable_at > 0 && rep.membership[rep.stable_at - 1] == rep.membership.back()) --rep.stable_at;

  RepairMachine tpp = bad_rewrite_machine(tq, a);
  tpp.agg = tq.agg;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ExtRational v = min_run_value(tpp, samples[i]);
    if (v && *v > tau - epsilon && *v < tau + epsilon)
      rep.diagnostics.warn("NOT_ISOLATED", "sample " + std::to_string(i),
                           "a bad rewrite costs " + v->str() + ", within epsilon of the threshold");
  }
  return rep;
}

SupAutomaton sup_automaton(const RepairMachine& tpp) {
  SupAutomaton u;
  u.nba.states = tpp.states;
  u.nba.alphabet = tpp.in_alphabet;
  u.nba.initial = tpp.initial;
  u.nba.accepting = tpp.accepting;
  std::vector<std::pair<NbaEdge, std::int64_t>> es;
  for (const auto& e : tpp.edges) es.push_back({{e.src, e.in, e.dst}, e.cost});
  std::sort(es.begin(), es.end());
  // Parallel transitions keep the cheapest weight.
  for (const auto& [e, w] : es)
    if (u.nba.edges.empty() || !(u.nba.edges.back() == e)) {
      u.nba.edges.push_back(e);
      u.weight.push_back(w);
    }
  std::sort(u.nba.initial.begin(), u.nba.initial.end());
  return u;
}

NBA sup_gt_threshold_nba(const SupAutomaton& u, const Rational& tau) {
  if (!is_deterministic(u.nba))
    throw Error(ErrorCode::NONDET_INPUT, "threshold automaton needs a deterministic Sup automaton");
  NBA r;
  r.alphabet = u.nba.alphabet;
  const int n = static_cast<int>(u.nba.states.size());
  for (int c = 0; c < 2; ++c)
    for (int q = 0; q < n; ++q) {
      r.states.push_back(u.nba.states[q] + (c ? "|1" : "|0"));
      r.accepting.push_back(c == 1);
    }
  r.initial = u.nba.initial;
  for (std::size_t i = 0; i < u.nba.edges.size(); ++i) {
    const auto& e = u.nba.edges[i];
    bool heavy = Rational(u.weight[i]) > tau;
    r.edges.push_back({e.src, e.sym, (heavy ? n : 0) + e.dst});
    r.edges.push_back({n + e.src, e.sym, n + e.dst});
  }
  canonicalize(r);
  return r;
}

static void need_kind(const RepairMachine& t, AggKind k) {
  if (t.agg.kind != k)
    throw Error(ErrorCode::BAD_AGGREGATOR, std::string("expected a ") + to_string(k) + " machine");
}

NBA sup_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau) {
  auto u = sup_automaton(bad_rewrite_machine(tq, a));
  NBA b = u.nba;
  b.edges.clear();
  for (std::size_t i = 0; i < u.nba.edges.size(); ++i)
    if (Rational(u.weight[i]) <= tau) b.edges.push_back(u.nba.edges[i]);
  return trim(b);
}

NBA limsup_bad_nba(const RepairMachine& tq, const NBA& a, const Rational& tau) {
  auto u = sup_automaton(bad_rewrite_machine(tq, a));
  const int n = static_cast<int>(u.nba.states.size());
  NBA b;
  b.alphabet = u.nba.alphabet;
  for (int c = 0; c < 2; ++c)
    for (int q = 0; q < n; ++q) {
      b.states.push_back(u.nba.states[q] + (c ? "|1" : "|0"));
      b.accepting.push_back(c == 1 && u.nba.accepting[q]);
    }
  b.initial = u.nba.initial;
  for (std::size_t i = 0; i < u.nba.edges.size(); ++i) {
    const auto& e = u.nba.edges[i];
    b.edges.push_back({e.src, e.sym, e.dst});
    if (Rational(u.weight[i]) <= tau) {
      b.edges.push_back({e.src, e.sym, n + e.dst});
      b.edges.push_back({n + e.src, e.sym, n + e.dst});
    }
  }
  canonicalize(b);
  return trim(b);
}

static NBA domain_minus(const RepairMachine& tq, const NBA& bad) {
  return trim(intersect(domain_nba(tq), complement_nba(bad)));
}

NBA sup_mask(const RepairMachine& tq, const NBA& a, const Rational& tau) {
  need_kind(tq, AggKind::SUP);
  return domain_minus(tq, sup_bad_nba(tq, a, tau));
}

NBA limsup_mask(const RepairMachine& tq, const NBA& a, const Rational& tau) {
  need_kind(tq, AggKind::LIMSUP);
  return domain_minus(tq, limsup_bad_nba(tq, a, tau));
}

NBA synthesize_mask(const RepairMachine& tq, const NBA& a, const Rational& tau,
                    const std::optional<Rational>& epsilon, std::optional<std::int64_t> depth) {
  switch (tq.agg.kind) {
  case AggKind::MEAN:
    throw Error(ErrorCode::UNDECIDABLE_MEAN_MASK,
                "mask synthesis for MEAN is undecidable (already for finite words)");
  case AggKind::SUP: return sup_mask(tq, a, tau);
  case AggKind::LIMSUP: return limsup_mask(tq, a, tau);
  case AggKind::DSUM:
    if (!epsilon) throw Error(ErrorCode::BAD_EPSILON, "DSum masks need an isolation margin epsilon");
    return domain_minus(tq, dsum_mask_bad_nba(tq, a, tau, *epsilon, depth));
  }
  throw Error(ErrorCode::BAD_AGGREGATOR, "unknown aggregator");
}

} // namespace omegarepair
