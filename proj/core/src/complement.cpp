#include "omegarepair/error.hpp"
#include "omegarepair/mask.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <string>

namespace omegarepair {

std::size_t complement_limit() {
  if (const char* env = std::getenv("OMEGAREPAIR_COMPLEMENT_LIMIT")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return kDefaultComplementLimit;
}

bool is_deterministic(const NBA& a) {
  if (a.initial.size() > 1) return false;
  auto d = a.delta();
  for (const auto& row : d)
    for (const auto& succ : row)
      if (succ.size() > 1) return false;
  return true;
}

namespace {

constexpr std::size_t kMaxComplementStates = 200'000;
// Ranking search steps across one construction.
constexpr std::size_t kMaxRankingSteps = 20'000'000;
constexpr int kNone = -1;

// Key layout: [phase, ...]. Phase 0: [0, subset mask]. Phase 1: [1, rank per
// state (kNone outside the domain)..., breakpoint mask].
using Key = std::vector<int>;

bool tight(const std::vector<int>& f) {
  int top = -1;
  for (int r : f) top = std::max(top, r);
  if (top < 0) return true; // empty domain
  if (top % 2 == 0) return false;
  std::vector<bool> used(top + 1, false);
  for (int r : f)
    if (r >= 0) used[r] = true;
  for (int r = 1; r <= top; r += 2)
    if (!used[r]) return false;
  return true;
}

// All tight rankings over `dom` with f(q) <= bound[q], even on accepting states.
// TODO: prune prefixes that can no longer become tight instead of filtering at the leaves.
void rankings(const std::vector<int>& dom, const std::vector<int>& bound, const std::vector<bool>& acc,
              std::size_t n, std::vector<std::vector<int>>& out, std::size_t& steps) {
  std::vector<int> f(n, kNone);
  std::size_t produced = 0;
  auto rec = [&](auto& self, std::size_t i) -> void {
    if (++steps > kMaxRankingSteps)
      throw Error(ErrorCode::SIZE_LIMIT, "complementation exceeds the ranking search budget");
    if (i == dom.size()) {
      if (tight(f)) {
        out.push_back(f);
        if (++produced > kMaxComplementStates)
          throw Error(ErrorCode::SIZE_LIMIT, "complementation exceeds the state budget");
      }
      return;
    }
    int q = dom[i];
    for (int r = 0; r <= bound[q]; ++r) {
      if (acc[q] && r % 2 == 1) continue;
      f[q] = r;
      self(self, i + 1);
    }
    f[q] = kNone;
  };
  rec(rec, 0);
}

} // namespace

// Quotient by the coarsest forward bisimulation that respects acceptance.
// Language-preserving; shrinks the products fed to complementation.
static NBA bisimulation_quotient(const NBA& a) {
  const std::size_t n = a.states.size();
  std::vector<int> block(n);
  for (std::size_t q = 0; q < n; ++q) block[q] = a.accepting[q] ? 1 : 0;
  std::size_t count = 0;
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sig;
    std::vector<int> next(n);
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<std::pair<int, int>> moves;
      for (const auto& e : a.edges)
        if (e.src == static_cast<int>(q)) moves.push_back({e.sym, block[e.dst]});
      std::sort(moves.begin(), moves.end());
      moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
      auto [it, fresh] = sig.emplace(std::make_pair(block[q], std::move(moves)), static_cast<int>(sig.size()));
      next[q] = it->second;
    }
    block = next;
    if (sig.size() == count) break;
    count = sig.size();
  }
  NBA r;
  r.alphabet = a.alphabet;
  r.states.resize(count);
  r.accepting.assign(count, false);
  for (std::size_t q = 0; q < n; ++q) {
    if (r.states[block[q]].empty()) r.states[block[q]] = a.states[q];
    r.accepting[block[q]] = a.accepting[q];
  }
  for (int q : a.initial) r.initial.push_back(block[q]);
  for (const auto& e : a.edges) r.edges.push_back({block[e.src], e.sym, block[e.dst]});
  canonicalize(r);
  return r;
}

NBA complement_nba(const NBA& input) {
  NBA a = bisimulation_quotient(trim(input));
  NBA r;
  r.alphabet = input.alphabet;
  if (a.states.empty() || a.initial.empty()) {
    r.states = {"all"};
    r.initial = {0};
    r.accepting = {true};
    for (int s = 0; s < static_cast<int>(r.alphabet.size()); ++s) r.edges.push_back({0, s, 0});
    return r;
  }
  const std::size_t n = a.states.size();
  if (n > complement_limit())
    throw Error(ErrorCode::SIZE_LIMIT, "complementation input has " + std::to_string(n) + " states, limit is " +
                                           std::to_string(complement_limit()));
  if (n > 30) throw Error(ErrorCode::SIZE_LIMIT, "complementation supports at most 30 states");
  auto d = a.delta();
  int nonacc = 0;
  for (std::size_t q = 0; q < n; ++q) nonacc += !a.accepting[q];
  const int maxrank = 2 * nonacc;
  std::size_t steps = 0;

  std::map<Key, int> id;
  std::vector<Key> keys;
  std::deque<int> work;
  auto intern = [&](Key k) {
    auto [it, fresh] = id.emplace(std::move(k), static_cast<int>(keys.size()));
    if (fresh) {
      if (keys.size() >= kMaxComplementStates)
        throw Error(ErrorCode::SIZE_LIMIT, "complementation exceeds the state budget");
      keys.push_back(it->first);
      work.push_back(it->second);
    }
    return it->second;
  };
  int init = 0;
  for (int q : a.initial) init |= 1 << q;
  r.initial.push_back(intern({0, init}));

  auto ranked_key = [&](const std::vector<int>& f, int o) {
    Key k{1};
    k.insert(k.end(), f.begin(), f.end());
    k.push_back(o);
    return k;
  };

  while (!work.empty()) {
    int ui = work.front();
    work.pop_front();
    const Key u = keys[ui];
    for (int s = 0; s < static_cast<int>(a.alphabet.size()); ++s) {
      if (u[0] == 0) {
        int next = 0;
        for (std::size_t q = 0; q < n; ++q)
          if (u[1] >> q & 1)
            for (int x : d[q][s]) next |= 1 << x;
        r.edges.push_back({ui, s, intern({0, next})});
        std::vector<int> dom;
        for (std::size_t q = 0; q < n; ++q)
          if (next >> q & 1) dom.push_back(static_cast<int>(q));
        std::vector<std::vector<int>> fs;
        rankings(dom, std::vector<int>(n, maxrank), a.accepting, n, fs, steps);
        for (const auto& f : fs) r.edges.push_back({ui, s, intern(ranked_key(f, 0))});
      } else {
        std::vector<int> f(u.begin() + 1, u.begin() + 1 + static_cast<long>(n));
        int o = u.back();
        std::vector<int> bound(n, kNone);
        for (std::size_t q = 0; q < n; ++q) {
          if (f[q] == kNone) continue;
          for (int x : d[q][s]) bound[x] = bound[x] == kNone ? f[q] : std::min(bound[x], f[q]);
        }
        std::vector<int> dom;
        for (std::size_t q = 0; q < n; ++q)
          if (bound[q] != kNone) dom.push_back(static_cast<int>(q));
        std::vector<std::vector<int>> fs;
        rankings(dom, bound, a.accepting, n, fs, steps);
        int reach_o = 0;
        for (std::size_t q = 0; q < n; ++q)
          if (o >> q & 1)
            for (int x : d[q][s]) reach_o |= 1 << x;
        for (const auto& g : fs) {
          int even = 0;
          for (std::size_t q = 0; q < n; ++q)
            if (g[q] != kNone && g[q] % 2 == 0) even |= 1 << q;
          int no = o != 0 ? (reach_o & even) : even;
          r.edges.push_back({ui, s, intern(ranked_key(g, no))});
        }
      }
    }
  }

  for (const auto& k : keys) {
    std::string name;
    if (k[0] == 0) {
      name = "S{";
      bool first = true;
      for (std::size_t q = 0; q < n; ++q)
        if (k[1] >> q & 1) {
          name += (first ? "" : ",") + a.states[q];
          first = false;
        }
      name += "}";
      r.accepting.push_back(false);
    } else {
      name = "R{";
      bool first = true;
      for (std::size_t q = 0; q < n; ++q)
        if (k[1 + q] != kNone) {
          name += (first ? "" : ",") + a.states[q] + ":" + std::to_string(k[1 + q]);
          first = false;
        }
      name += "}O{";
      first = true;
      for (std::size_t q = 0; q < n; ++q)
        if (k.back() >> q & 1) {
          name += (first ? "" : ",") + a.states[q];
          first = false;
        }
      name += "}";
      r.accepting.push_back(k.back() == 0);
    }
    r.states.push_back(name);
  }
  canonicalize(r);
  return r;
}

} // namespace omegarepair
