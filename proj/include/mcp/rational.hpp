#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcp {

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Zero tests and conversions shared by the exact and floating-point paths.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& x, double /*tol*/ = 0.0) { return x == 0; }
  static double magnitude(const Rational& x) { return std::fabs(x.convert_to<double>()); }
  static Rational from(const Rational& x) { return x; }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static bool is_zero(double x, double tol) { return std::fabs(x) <= tol; }
  static double magnitude(double x) { return std::fabs(x); }
  static double from(const Rational& x) { return x.convert_to<double>(); }
  static double from(double x) { return x; }
};

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(Integer(num), Integer(den));
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses `p`, `-p`, `p/q` with decimal integers.
inline Rational parse_rational(std::string_view text) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) return false;
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits(num) || !digits(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  Integer d{std::string(den)};
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(Integer(n), d);
}

/// Best rational approximation of `x` by continued fractions, stopping once
/// within `tol` or when the denominator would exceed `max_den`.
inline Rational rationalize(double x, double tol = 1e-12, std::int64_t max_den = 1'000'000'000) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize non-finite value");
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rem = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(rem);
    Integer ai(static_cast<long long>(a));
    Integer p2 = ai * p1 + p0;
    Integer q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational approx(p1, q1);
    if (std::fabs(approx.convert_to<double>() - x) <= tol) break;
    double frac = rem - a;
    if (frac == 0.0) break;
    rem = 1.0 / frac;
  }
  return Rational(p1, q1);
}

inline Rational factorial(unsigned n) {
  Integer f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

inline Rational pow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

/// Exact square root when `r` is the square of a rational.
inline bool exact_sqrt(const Rational& r, Rational& out) {
  if (r < 0) return false;
  Integer n = boost::multiprecision::numerator(r);
  Integer d = boost::multiprecision::denominator(r);
  Integer sn = boost::multiprecision::sqrt(n);
  Integer sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return false;
  out = Rational(sn, sd);
  return true;
}

}  // namespace mcp
