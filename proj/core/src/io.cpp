#include "omegarepair/io.hpp"
#include "omegarepair/error.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace omegarepair {

namespace {

struct Token {
  std::string text;
  int line;
  int col;
};

using Line = std::vector<Token>;

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++lineno;
    Line toks;
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == '#') break;
      if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r' && raw[j] != '#') ++j;
      toks.push_back({std::string(raw.substr(i, j - i)), lineno, static_cast<int>(i) + 1});
      i = j;
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    pos = end + 1;
  }
  return lines;
}

[[noreturn]] void fail_at(int line, int col, const std::string& msg) {
  throw Error(ErrorCode::PARSE, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}
[[noreturn]] void fail_at(const Token& t, const std::string& msg) { fail_at(t.line, t.col, msg); }

void need(const Line& l, std::size_t lo, std::size_t hi, const char* what) {
  if (l.size() < lo || l.size() > hi) fail_at(l.front(), std::string("malformed ") + what + " line");
}

struct StateTable {
  std::map<std::string, int> id;
  std::vector<std::string> names;
  int declare(const Token& t) {
    if (id.count(t.text)) fail_at(t, "duplicate state '" + t.text + "'");
    id[t.text] = static_cast<int>(names.size());
    names.push_back(t.text);
    return id[t.text];
  }
  int lookup(const Token& t) const {
    auto it = id.find(t.text);
    if (it == id.end()) fail_at(t, "unknown state '" + t.text + "'");
    return it->second;
  }
};

int symbol_of(const std::vector<Symbol>& alphabet, const Token& t, const char* which) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == t.text) return static_cast<int>(i);
  fail_at(t, std::string("unknown ") + which + " symbol '" + t.text + "'");
}

std::vector<Symbol> symbol_list(const Line& l) {
  std::vector<Symbol> s;
  for (std::size_t i = 1; i < l.size(); ++i) {
    for (const auto& x : s)
      if (x == l[i].text) fail_at(l[i], "duplicate symbol '" + x + "'");
    s.push_back(l[i].text);
  }
  return s;
}

// Flags after position `from`: subset of {INIT, ACC}.
void flags(const Line& l, std::size_t from, bool allow_acc, bool& init, bool& acc) {
  init = acc = false;
  for (std::size_t i = from; i < l.size(); ++i) {
    if (l[i].text == "INIT" && !init) init = true;
    else if (allow_acc && l[i].text == "ACC" && !acc) acc = true;
    else fail_at(l[i], "unexpected '" + l[i].text + "'");
  }
}

std::int64_t integer(const Token& t) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail_at(t, "expected an integer, got '" + t.text + "'");
  }
}

const Line& header(const std::vector<Line>& lines, const char* kw) {
  if (lines.empty()) fail_at(1, 1, std::string("empty input, expected ") + kw);
  if (lines.front().front().text != kw) fail_at(lines.front().front(), std::string("expected header ") + kw);
  return lines.front();
}

KripkeStructure kripke_from(const std::vector<Line>& lines) {
  need(header(lines, "KRIPKE"), 1, 1, "KRIPKE");
  KripkeStructure k;
  StateTable st;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text != "STATE") continue;
    need(l, 4, 5, "STATE");
    if (l[2].text != "LABEL") fail_at(l[2], "expected LABEL");
    int s = st.declare(l[1]);
    k.label.push_back(l[3].text);
    bool init, acc;
    flags(l, 4, false, init, acc);
    if (init) k.initial.push_back(s);
  }
  k.states = st.names;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text == "STATE") continue;
    if (l[0].text != "EDGE") fail_at(l[0], "unknown keyword '" + l[0].text + "'");
    need(l, 3, 3, "EDGE");
    k.edges.push_back({st.lookup(l[1]), st.lookup(l[2])});
  }
  canonicalize(k);
  return k;
}

NBA nba_from(const std::vector<Line>& lines) {
  need(header(lines, "NBA"), 1, 1, "NBA");
  NBA a;
  StateTable st;
  bool have_alphabet = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text == "ALPHABET") {
      if (have_alphabet) fail_at(l[0], "ALPHABET given twice");
      a.alphabet = symbol_list(l);
      have_alphabet = true;
    } else if (l[0].text == "STATE") {
      need(l, 2, 4, "STATE");
      int s = st.declare(l[1]);
      bool init, acc;
      flags(l, 2, true, init, acc);
      if (init) a.initial.push_back(s);
      a.accepting.push_back(acc);
    }
  }
  if (!have_alphabet) fail_at(lines.front().front(), "missing ALPHABET line");
  a.states = st.names;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text == "ALPHABET" || l[0].text == "STATE") continue;
    if (l[0].text != "EDGE") fail_at(l[0], "unknown keyword '" + l[0].text + "'");
    need(l, 4, 4, "EDGE");
    a.edges.push_back({st.lookup(l[1]), symbol_of(a.alphabet, l[2], "alphabet"), st.lookup(l[3])});
  }
  canonicalize(a);
  return a;
}

RepairMachine rm_from(const std::vector<Line>& lines) {
  const auto& h = header(lines, "RM");
  RepairMachine t;
  if (h.size() < 2) fail_at(h[0], "RM header needs an aggregator");
  std::string agg;
  for (std::size_t i = 1; i < h.size(); ++i) agg += (i > 1 ? " " : "") + h[i].text;
  try {
    t.agg = parse_aggregator(agg);
  } catch (const Error& e) {
    fail_at(h[1], e.what());
  }
  StateTable st;
  bool have_in = false, have_out = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text == "IN") {
      if (have_in) fail_at(l[0], "IN given twice");
      t.in_alphabet = symbol_list(l);
      have_in = true;
    } else if (l[0].text == "OUT") {
      if (have_out) fail_at(l[0], "OUT given twice");
      t.out_alphabet = symbol_list(l);
      have_out = true;
    } else if (l[0].text == "STATE") {
      need(l, 2, 4, "STATE");
      int s = st.declare(l[1]);
      bool init, acc;
      flags(l, 2, true, init, acc);
      if (init) t.initial.push_back(s);
      t.accepting.push_back(acc);
    }
  }
  if (!have_in) fail_at(h[0], "missing IN line");
  if (!have_out) fail_at(h[0], "missing OUT line");
  t.states = st.names;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l[0].text == "IN" || l[0].text == "OUT" || l[0].text == "STATE") continue;
    if (l[0].text != "EDGE") fail_at(l[0], "unknown keyword '" + l[0].text + "'");
    need(l, 6, 6, "EDGE");
    RmEdge e{st.lookup(l[1]), symbol_of(t.in_alphabet, l[2], "input"), st.lookup(l[3]), {}, integer(l[5])};
    if (l[4].text != "-") {
      std::size_t p = 0;
      const std::string& w = l[4].text;
      while (p <= w.size()) {
        std::size_t q = w.find('.', p);
        if (q == std::string::npos) q = w.size();
        Token part{w.substr(p, q - p), l[4].line, l[4].col + static_cast<int>(p)};
        if (part.text.empty()) fail_at(part, "empty symbol in output word");
        e.out.push_back(symbol_of(t.out_alphabet, part, "output"));
        p = q + 1;
      }
    }
    if (e.cost < 0) fail_at(l[5], "cost must be non-negative");
    t.edges.push_back(e);
  }
  canonicalize(t);
  return t;
}

std::string flags_str(bool init, bool acc) {
  std::string s;
  if (init) s += " INIT";
  if (acc) s += " ACC";
  return s;
}

bool contains(const std::vector<int>& v, int x) {
  for (int y : v)
    if (y == x) return true;
  return false;
}

} // namespace

Aggregator parse_aggregator(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind, lam, extra;
  in >> kind;
  if (kind == "DSUM") {
    if (!(in >> lam)) throw Error(ErrorCode::BAD_AGGREGATOR, "DSUM needs a discount p/q");
    Rational l = Rational::parse(lam);
    if (l <= Rational(0) || l >= Rational(1)) throw Error(ErrorCode::BAD_AGGREGATOR, "discount must lie in (0,1)");
    if (in >> extra) throw Error(ErrorCode::BAD_AGGREGATOR, "trailing text after aggregator");
    return Aggregator::dsum(l);
  }
  if (in >> extra) throw Error(ErrorCode::BAD_AGGREGATOR, "trailing text after aggregator");
  if (kind == "MEAN") return Aggregator::mean();
  if (kind == "SUP") return Aggregator::sup();
  if (kind == "LIMSUP") return Aggregator::limsup();
  throw Error(ErrorCode::BAD_AGGREGATOR, "unknown aggregator '" + kind + "'");
}

KripkeStructure parse_kripke(std::string_view text) { return kripke_from(tokenize(text)); }
NBA parse_nba(std::string_view text) { return nba_from(tokenize(text)); }
RepairMachine parse_rm(std::string_view text) { return rm_from(tokenize(text)); }

Model parse_model(std::string_view text) {
  auto lines = tokenize(text);
  if (lines.empty()) fail_at(1, 1, "empty input");
  const auto& kw = lines.front().front().text;
  if (kw == "KRIPKE") return kripke_from(lines);
  if (kw == "NBA") return nba_from(lines);
  if (kw == "RM") return rm_from(lines);
  fail_at(lines.front().front(), "unknown model kind '" + kw + "'");
}

std::string serialize_model(const KripkeStructure& k) {
  std::ostringstream os;
  os << "KRIPKE\n";
  for (std::size_t s = 0; s < k.states.size(); ++s)
    os << "STATE " << k.states[s] << " LABEL " << k.label[s] << flags_str(contains(k.initial, static_cast<int>(s)), false)
       << "\n";
  KripkeStructure c = k;
  canonicalize(c);
  for (auto [a, b] : c.edges) os << "EDGE " << k.states[a] << " " << k.states[b] << "\n";
  return os.str();
}

std::string serialize_model(const NBA& a) {
  std::ostringstream os;
  os << "NBA\nALPHABET";
  for (const auto& s : a.alphabet) os << " " << s;
  os << "\n";
  for (std::size_t q = 0; q < a.states.size(); ++q)
    os << "STATE " << a.states[q] << flags_str(contains(a.initial, static_cast<int>(q)), a.accepting[q]) << "\n";
  NBA c = a;
  canonicalize(c);
  for (const auto& e : c.edges)
    os << "EDGE " << a.states[e.src] << " " << a.alphabet[e.sym] << " " << a.states[e.dst] << "\n";
  return os.str();
}

std::string serialize_model(const RepairMachine& t) {
  std::ostringstream os;
  os << "RM " << t.agg.str() << "\nIN";
  for (const auto& s : t.in_alphabet) os << " " << s;
  os << "\nOUT";
  for (const auto& s : t.out_alphabet) os << " " << s;
  os << "\n";
  for (std::size_t q = 0; q < t.states.size(); ++q)
    os << "STATE " << t.states[q] << flags_str(contains(t.initial, static_cast<int>(q)), t.accepting[q]) << "\n";
  RepairMachine c = t;
  canonicalize(c);
  for (const auto& e : c.edges) {
    os << "EDGE " << t.states[e.src] << " " << t.in_alphabet[e.in] << " " << t.states[e.dst] << " ";
    if (e.out.empty()) os << "-";
    for (std::size_t i = 0; i < e.out.size(); ++i) os << (i ? "." : "") << t.out_alphabet[e.out[i]];
    os << " " << e.cost << "\n";
  }
  return os.str();
}

std::string serialize_model(const Model& m) {
  return std::visit([](const auto& x) { return serialize_model(x); }, m);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PARSE, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::PARSE, "cannot write " + path);
  out << text;
}

namespace {

template <class T, class F>
Lasso<T> split_lasso(std::string_view text, char sep, F conv) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos || text.find('|', bar + 1) != std::string_view::npos)
    throw Error(ErrorCode::PARSE, "lasso must have the form prefix|cycle");
  auto items = [&](std::string_view part) {
    std::vector<T> r;
    if (part.empty()) return r;
    std::size_t p = 0;
    while (p <= part.size()) {
      std::size_t q = part.find(sep, p);
      if (q == std::string_view::npos) q = part.size();
      auto item = part.substr(p, q - p);
      if (item.empty()) throw Error(ErrorCode::PARSE, "empty lasso element");
      r.push_back(conv(std::string(item)));
      p = q + 1;
    }
    return r;
  };
  Lasso<T> l{items(text.substr(0, bar)), items(text.substr(bar + 1))};
  if (l.cycle.empty()) throw Error(ErrorCode::PARSE, "lasso cycle must be non-empty");
  return l;
}

} // namespace

Lasso<std::int64_t> parse_cost_lasso(std::string_view text) {
  return split_lasso<std::int64_t>(text, ',', [](const std::string& s) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size() || v < 0) throw std::invalid_argument(s);
      return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::PARSE, "bad cost '" + s + "'");
    }
  });
}

Lasso<Symbol> parse_symbol_lasso(std::string_view text) {
  return split_lasso<Symbol>(text, '.', [](const std::string& s) { return s; });
}

std::string symbol_lasso_str(const Lasso<Symbol>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.prefix.size(); ++i) s += (i ? "." : "") + w.prefix[i];
  s += "|";
  for (std::size_t i = 0; i < w.cycle.size(); ++i) s += (i ? "." : "") + w.cycle[i];
  return s;
}

} // namespace omegarepair
