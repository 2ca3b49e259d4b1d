#ifndef TOTPOS_COMPARE_HPP_
#define TOTPOS_COMPARE_HPP_

#include <algorithm>
#include <cmath>

#include "totpos/rational.hpp"

namespace totpos {

// Comparison policy for table values. Rational comparisons are exact; the
// double policy accepts a <= b when the excess is within the tolerance.
template <class T>
struct Compare;

template <>
struct Compare<Rational> {
  static constexpr bool exact = true;
  bool leq(const Rational& a, const Rational& b) const { return a <= b; }
  bool eq(const Rational& a, const Rational& b) const { return a == b; }
  bool is_zero(const Rational& a) const { return sgn(a) == 0; }
};

template <>
struct Compare<double> {
  static constexpr bool exact = false;
  double rel_tol = 1e-12;
  double abs_tol = 0.0;

  bool leq(double a, double b) const {
    return a <= b + abs_tol + rel_tol * std::max(std::abs(a), std::abs(b));
  }
  bool eq(double a, double b) const { return leq(a, b) && leq(b, a); }
  bool is_zero(double a) const { return std::abs(a) <= abs_tol; }
};

}  // namespace totpos

#endif  // TOTPOS_COMPARE_HPP_
