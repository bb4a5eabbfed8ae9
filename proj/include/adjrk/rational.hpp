#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace adjrk {

/// Exact rational number with 64-bit numerator/denominator.
///
/// Used to carry the exact coefficients of classical tableaus alongside their
/// double images, so condition checkers can report an algebraic residual of
/// exactly zero where double rounding alone would leave an ulp-sized remnant.
/// Operations throw std::overflow_error when a result does not fit; callers
/// that hold only approximate data should fall back to double arithmetic.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    normalize();
  }

  void normalize() {
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

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  [[nodiscard]] bool is_zero() const { return num == 0; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
};

namespace detail {
inline std::int64_t checked_narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}
}  // namespace detail

inline Rational operator*(const Rational& a, const Rational& b) {
  const __int128 n = static_cast<__int128>(a.num) * b.num;
  const __int128 d = static_cast<__int128>(a.den) * b.den;
  Rational r;
  r.num = detail::checked_narrow(n);
  r.den = detail::checked_narrow(d);
  r.normalize();
  return r;
}

inline Rational operator+(const Rational& a, const Rational& b) {
  const __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
  const __int128 d = static_cast<__int128>(a.den) * b.den;
  Rational r;
  r.num = detail::checked_narrow(n);
  r.den = detail::checked_narrow(d);
  r.normalize();
  return r;
}

inline Rational operator-(const Rational& a) {
  Rational r = a;
  r.num = -r.num;
  return r;
}

inline Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

inline Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::domain_error("rational division by zero");
  return a * Rational{b.den, b.num};
}

inline Rational abs(const Rational& a) { return a.num < 0 ? -a : a; }

}  // namespace adjrk
