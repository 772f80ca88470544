#include "omegarepair/dot.hpp"

#include <algorithm>
#include <sstream>

namespace omegarepair {

namespace {

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

std::string tuple(const KripkeStructure& k, const RepairMachine& t, const NBA& b, int s, int q, int p, int i) {
  return "(" + k.states[s] + "," + t.states[q] + "," + b.states[p] + "," + std::to_string(i) + ")";
}

} // namespace

std::string to_dot(const ProductGraph& g, const KripkeStructure& k, const RepairMachine& t, const NBA& b) {
  std::ostringstream os;
  os << "digraph product {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& x = g.vertices[v];
    os << "  v" << v << " [label=" << quote(tuple(k, t, b, x.kripke, x.rm, x.nba, x.counter))
       << (g.final[v] ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (int v : g.initial) os << "  init" << v << " [shape=point];\n  init" << v << " -> v" << v << ";\n";
  for (const auto& e : g.edges) os << "  v" << e.src << " -> v" << e.dst << " [label=\"" << e.weight << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const GameArena& a, const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                   const std::vector<std::pair<int, int>>& strategy) {
  std::ostringstream os;
  os << "digraph arena {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < a.size(); ++v) {
    const auto& x = a.vertices[v];
    std::string label = a.max_owned[v] ? "(" + k.states[x.kripke] + "," + t.states[x.rm] + "," + b.states[x.nba] +
                                             ",3->" + std::to_string(x.next_counter) + ")"
                                       : tuple(k, t, b, x.kripke, x.rm, x.nba, x.counter);
    os << "  v" << v << " [label=" << quote(label)
       << (a.max_owned[v] ? ", shape=box" : (a.final[v] ? ", shape=doublecircle" : ", shape=circle")) << "];\n";
  }
  for (int v : a.initial) os << "  init" << v << " [shape=point];\n  init" << v << " -> v" << v << ";\n";
  for (const auto& e : a.edges) {
    bool chosen = std::find(strategy.begin(), strategy.end(), std::make_pair(e.src, e.dst)) != strategy.end();
    os << "  v" << e.src << " -> v" << e.dst << " [label=\"" << e.weight << "\"" << (chosen ? ", style=bold" : "")
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const NBA& a) {
  std::ostringstream os;
  os << "digraph nba {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < a.states.size(); ++q)
    os << "  q" << q << " [label=" << quote(a.states[q])
       << (a.accepting[q] ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  for (int q : a.initial) os << "  init" << q << " [shape=point];\n  init" << q << " -> q" << q << ";\n";
  for (const auto& e : a.edges) os << "  q" << e.src << " -> q" << e.dst << " [label=" << quote(a.alphabet[e.sym]) << "];\n";
  os << "}\n";
  return os.str();
}

std::string lasso_dot(const ProductGraph& g, const Lasso<int>& run, const KripkeStructure& k,
                      const RepairMachine& t, const NBA& b) {
  std::ostringstream os;
  os << "digraph lasso {\n  rankdir=LR;\n";
  const std::size_t n = run.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = g.vertices[run.at(i)];
    os << "  n" << i << " [label=" << quote(tuple(k, t, b, x.kripke, x.rm, x.nba, x.counter))
       << (g.final[run.at(i)] ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (std::size_t i = 0; i + 1 < n; ++i) os << "  n" << i << " -> n" << i + 1 << ";\n";
  os << "  n" << n - 1 << " -> n" << run.prefix.size() << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace omegarepair
