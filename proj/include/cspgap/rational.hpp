#pragma once
// Exact rational arithmetic shared by every module. Values are GMP rationals,
// always held in canonical form (reduced, positive denominator).

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cspgap/error.hpp"

namespace cspgap {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Formats as "p/q"; integers keep the "/1" suffix so every value has one shape.
inline std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline bool is_canonical(const Rational& r) {
  const Integer& num = numerator(r);
  const Integer& den = denominator(r);
  return den >= 1 && gcd(abs(num), den) == 1;
}

namespace detail {
inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}
}  // namespace detail

/// Parses "p/q" (or a bare integer "p"). Decimal notation is rejected.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num_part = text.substr(0, slash);
  std::string_view den_part = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!detail::is_integer_literal(num_part) || !detail::is_integer_literal(den_part) || den_part[0] == '-')
    throw ParseError("malformed rational '" + std::string(text) + "' (expected p/q)");
  if (num_part[0] == '+') num_part.remove_prefix(1);
  if (den_part[0] == '+') den_part.remove_prefix(1);
  Integer num{std::string(num_part)};
  Integer den{std::string(den_part)};
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Nearest rational with the given denominator (round half up).
inline Rational snap(double x, std::int64_t denominator) {
  auto scaled = static_cast<std::int64_t>(std::floor(x * static_cast<double>(denominator) + 0.5));
  return Rational(Integer(scaled), Integer(denominator));
}

inline Rational sum(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

}  // namespace cspgap
