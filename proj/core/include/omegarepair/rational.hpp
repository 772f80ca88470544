#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace omegarepair {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational, always reduced with a positive denominator.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t n) : v_(n) {}
  Rational(std::int64_t n, std::int64_t d);
  Rational(const BigInt& n, const BigInt& d);

  BigInt num() const { return boost::multiprecision::numerator(v_); }
  BigInt den() const { return boost::multiprecision::denominator(v_); }

  bool is_zero() const { return v_ == 0; }
  bool is_integer() const { return den() == 1; }
  double to_double() const { return v_.convert_to<double>(); }
  long double to_long_double() const;

  // Always "p/q", also for integers.
  std::string str() const;

  // Accepts "p/q" or "p"; throws Error(PARSE) otherwise.
  static Rational parse(std::string_view text);

  // Smallest integer >= *this.
  BigInt ceil() const;
  BigInt floor() const;

  Rational pow(unsigned k) const;

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-v_); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
  using Rep = boost::multiprecision::cpp_rational;
  explicit Rational(Rep v) : v_(std::move(v)) {}
  Rep v_{0};
};

// Best rational approximation of x with denominator at most maxden
// (continued fractions). Used to snap value-iteration estimates.
Rational nearest_rational(long double x, std::int64_t maxden);

// Extended value: nullopt stands for +infinity.
using ExtRational = std::optional<Rational>;

std::string ext_str(const ExtRational& v);
bool ext_less(const ExtRational& a, const ExtRational& b);

} // namespace omegarepair
