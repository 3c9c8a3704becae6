// rational.hpp - exact rational arithmetic for chirp rates and window roll-off
//
// Chirp phases of the form exp(j*2*pi*c*k^2) are evaluated thousands of times
// per frame; c is kept as an exact ratio so the phase can be reduced mod 1 in
// integer arithmetic before any trigonometry happens. This keeps transmit and
// receive chirps exact inverses of each other and keeps alpha_W = D/M free of
// floating-point drift.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace afdm {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0 always

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }
  static Rational of(std::int64_t n) { return Rational(n, 1); }

  void reduce() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool is_zero() const { return num == 0; }

  Rational operator*(std::int64_t k) const {
    __int128 n = static_cast<__int128>(num) * k;
    const std::int64_t g = std::gcd(k < 0 ? -k : k, den);
    return Rational(static_cast<std::int64_t>(n / g), den / g);
  }

  Rational operator*(const Rational& o) const {
    Rational a(num, o.den);
    Rational b(o.num, den);
    __int128 n = static_cast<__int128>(a.num) * b.num;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational: product overflow");
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }

  Rational operator+(const Rational& o) const {
    __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
    __int128 d = static_cast<__int128>(den) * o.den;
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational: sum overflow");
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }

  Rational operator-(const Rational& o) const { return *this + Rational(-o.num, o.den); }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  // True iff this rational is an integer and that integer is odd.
  bool is_odd_integer() const { return den == 1 && (num % 2) != 0; }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// Fractional part of c * k in [0, 1), computed exactly in integer arithmetic.
// This is the workhorse behind every chirp exponential exp(j*2*pi*c*k).
inline double frac_times(const Rational& c, std::int64_t k) {
  __int128 n = static_cast<__int128>(c.num) * k;
  __int128 r = n % c.den;
  if (r < 0) r += c.den;
  return static_cast<double>(r) / static_cast<double>(c.den);
}

// Parses "p/q" or a plain integer "p".
inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s), 1);
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
}

}  // namespace afdm
