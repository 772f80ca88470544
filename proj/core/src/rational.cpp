#include "omegarepair/rational.hpp"
#include "omegarepair/error.hpp"

#include <cmath>
#include <sstream>

namespace omegarepair {

const char* to_string(ErrorCode c) {
  switch (c) {
  case ErrorCode::PARSE: return "PARSE";
  case ErrorCode::ALPHABET_MISMATCH: return "ALPHABET_MISMATCH";
  case ErrorCode::INVALID_MODEL: return "INVALID_MODEL";
  case ErrorCode::NO_SUCCESSOR: return "NO_SUCCESSOR";
  case ErrorCode::ACYCLIC: return "ACYCLIC";
  case ErrorCode::INFEASIBLE: return "INFEASIBLE";
  case ErrorCode::BAD_EPSILON: return "BAD_EPSILON";
  case ErrorCode::BAD_AGGREGATOR: return "BAD_AGGREGATOR";
  case ErrorCode::NONDET_INPUT: return "NONDET_INPUT";
  case ErrorCode::SIZE_LIMIT: return "SIZE_LIMIT";
  case ErrorCode::UNDECIDABLE_MEAN_MASK: return "UNDECIDABLE_MEAN_MASK";
  case ErrorCode::BUDGET_EXCEEDED: return "BUDGET_EXCEEDED";
  case ErrorCode::INTERNAL: return "INTERNAL";
  }
  return "UNKNOWN";
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error(ErrorCode::PARSE, "zero denominator");
  BigInt bn(n), bd(d);
  if (bd < 0) {
    bn = -bn;
    bd = -bd;
  }
  v_ = Rep(bn, bd);
}

Rational::Rational(const BigInt& n, const BigInt& d) {
  if (d == 0) throw Error(ErrorCode::PARSE, "zero denominator");
  v_ = d < 0 ? Rep(BigInt(-n), BigInt(-d)) : Rep(n, d);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.v_ == 0) throw Error(ErrorCode::INTERNAL, "division by zero");
  return Rational(a.v_ / b.v_);
}

long double Rational::to_long_double() const {
  return v_.convert_to<long double>();
}

std::string Rational::str() const {
  return num().str() + "/" + den().str();
}

static bool parse_int(std::string_view s, BigInt& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? BigInt(-v) : v;
  return true;
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  BigInt n, d = 1;
  bool ok = slash == std::string_view::npos
                ? parse_int(text, n)
                : parse_int(text.substr(0, slash), n) && parse_int(text.substr(slash + 1), d);
  if (!ok || d == 0)
    throw Error(ErrorCode::PARSE, "malformed rational '" + std::string(text) + "'");
  return Rational(n, d);
}

BigInt Rational::floor() const {
  BigInt n = num(), d = den();
  BigInt q = n / d; // truncates toward zero
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

BigInt Rational::ceil() const {
  BigInt f = floor();
  return f * den() == num() ? f : BigInt(f + 1);
}

Rational Rational::pow(unsigned k) const {
  Rational r(1);
  Rational b = *this;
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1u;
  }
  return r;
}

Rational nearest_rational(long double x, std::int64_t maxden) {
  // Walk the continued fraction, then check the last semiconvergent.
  long double fl = std::floor(x);
  std::int64_t a0 = static_cast<std::int64_t>(fl);
  std::int64_t p0 = 1, q0 = 0, p1 = a0, q1 = 1;
  long double frac = x - fl;
  while (frac > 1e-18L) {
    long double inv = 1.0L / frac;
    long double ai_f = std::floor(inv);
    if (ai_f > 4.0e18L) break;
    std::int64_t ai = static_cast<std::int64_t>(ai_f);
    if (q1 != 0 && ai > (maxden - q0) / q1) {
      std::int64_t t = (maxden - q0) / q1;
      std::int64_t ps = p0 + t * p1, qs = q0 + t * q1;
      if (t > 0 && std::fabs(static_cast<long double>(ps) / qs - x) <
                       std::fabs(static_cast<long double>(p1) / q1 - x))
        return Rational(ps, qs);
      break;
    }
    std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    frac = inv - ai_f;
  }
  return Rational(p1, q1);
}

std::string ext_str(const ExtRational& v) {
  return v ? v->str() : std::string("inf");
}

bool ext_less(const ExtRational& a, const ExtRational& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

} // namespace omegarepair
