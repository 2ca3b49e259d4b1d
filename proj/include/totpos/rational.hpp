#ifndef TOTPOS_RATIONAL_HPP_
#define TOTPOS_RATIONAL_HPP_

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "totpos/error.hpp"

namespace totpos {

using Rational = mpq_class;

// Parses "7", "-3/4", "85.88", "1.5e-3" into an exact rational. Decimal
// notation is converted digit by digit, never through a double.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  if (s.empty()) throw invalid_input("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw invalid_input("zero denominator in '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    if (!exp_part.empty() && exp_part.front() == '+') exp_part.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
    if (ec != std::errc() || ptr != exp_part.data() + exp_part.size())
      throw invalid_input("bad exponent in '" + std::string(text) + "'");
    s = s.substr(0, e);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw invalid_input("bad rational literal '" + std::string(text) + "'");
    }
  }
  if (digits.empty()) throw invalid_input("bad rational literal '" + std::string(text) + "'");

  mpz_class mantissa(digits, 10);
  long scale = exponent - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  Rational q = scale >= 0 ? Rational(mantissa * pow10) : Rational(mantissa, pow10);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

// Exact rational of the shortest decimal that round-trips `value`
// (so 85.88 becomes 2147/25, not the binary expansion of the double).
inline Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw invalid_input("non-finite value");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw invalid_input("cannot format double");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

// num/den in canonical form (the two-argument mpq constructor does not reduce).
inline Rational ratio(long num, long den) {
  if (den == 0) throw invalid_input("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

}  // namespace totpos

#endif  // TOTPOS_RATIONAL_HPP_
