#ifndef TOTPOS_MTP2_HPP_
#define TOTPOS_MTP2_HPP_

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "totpos/compare.hpp"
#include "totpos/error.hpp"
#include "totpos/table.hpp"

namespace totpos {

enum class Mtp2Method { full, pairwise, gamma, binary_interactions, potentials, cliques };

inline const char* to_string(Mtp2Method m) {
  switch (m) {
    case Mtp2Method::full: return "full";
    case Mtp2Method::pairwise: return "pairwise";
    case Mtp2Method::gamma: return "gamma";
    case Mtp2Method::binary_interactions: return "binary_interactions";
    case Mtp2Method::potentials: return "potentials";
    case Mtp2Method::cliques: return "cliques";
  }
  return "?";
}

// lhs = f(x) f(y), rhs = f(x^y) f(xvy); a certificate always has lhs > rhs.
template <class T>
struct Mtp2Certificate {
  Cell x, y;
  T lhs, rhs;
};

template <class T>
struct BasicMtp2Verdict {
  bool holds = true;
  std::optional<Mtp2Certificate<T>> certificate;
  Mtp2Method method = Mtp2Method::full;
};

using Mtp2Verdict = BasicMtp2Verdict<Rational>;

// f(x^y) f(xvy) - f(x) f(y).
template <class T>
T mtp2_gap(const BasicTable<T>& t, const Cell& x, const Cell& y) {
  auto [lo, hi] = meet_join(x, y);
  return t.at(lo) * t.at(hi) - t.at(x) * t.at(y);
}

namespace detail {

template <class T>
BasicMtp2Verdict<T> scan_pairs(const BasicTable<T>& t, const std::vector<LatticePair>& pairs,
                               const Compare<T>& cmp, Mtp2Method method) {
  BasicMtp2Verdict<T> v;
  v.method = method;
  for (const auto& p : pairs) {
    T lhs = t[p.x] * t[p.y];
    T rhs = t[p.meet] * t[p.join];
    if (!cmp.leq(lhs, rhs)) {
      v.holds = false;
      v.certificate = Mtp2Certificate<T>{t.lattice().cell_of(p.x), t.lattice().cell_of(p.y), lhs, rhs};
      return v;
    }
  }
  return v;
}

inline bool differs_in_two(const Lattice& lat, std::size_t i, std::size_t j) {
  int diff = 0;
  for (int v = 0; v < lat.rank(); ++v)
    if (lat.coordinate(i, v) != lat.coordinate(j, v) && ++diff > 2) return false;
  return diff == 2;
}

}  // namespace detail

// Exhaustive scan of f(x)f(y) <= f(x^y)f(xvy) over all cell pairs. The
// certificate is the first violating pair in (index(x), index(y)) order.
template <class T>
BasicMtp2Verdict<T> check_mtp2_full(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  return detail::scan_pairs(t, incomparable_pairs(t.lattice()), cmp, Mtp2Method::full);
}

// Fast path for repeated checks on one lattice (Monte Carlo): the pair list
// comes from incomparable_pairs().
inline bool mtp2_holds(std::span<const double> values, const std::vector<LatticePair>& pairs,
                       const Compare<double>& cmp = {}) {
  for (const auto& p : pairs)
    if (!cmp.leq(values[p.x] * values[p.y], values[p.meet] * values[p.join])) return false;
  return true;
}

// Pairs of cells differing in exactly two coordinates (other coordinates
// held fixed), incomparable, in lexicographic order.
inline std::vector<LatticePair> two_coordinate_pairs(const Lattice& lat) {
  std::vector<LatticePair> out;
  for (auto& p : incomparable_pairs(lat))
    if (detail::differs_in_two(lat, p.x, p.y)) out.push_back(p);
  return out;
}

// The pairwise TP2 conditions alone, without any support hypothesis.
template <class T>
BasicMtp2Verdict<T> check_pairwise_conditions(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  return detail::scan_pairs(t, two_coordinate_pairs(t.lattice()), cmp, Mtp2Method::pairwise);
}

// TP2 in every pair of arguments with the others fixed. Equivalent to the
// full check only under interval support, so other tables are rejected.
template <class T>
BasicMtp2Verdict<T> check_mtp2_pairwise(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  if (support_analysis(t).interval != Tri::yes)
    throw precondition_error("pairwise MTP2 check requires interval support; use the full check");
  return check_pairwise_conditions(t, cmp);
}

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
struct Tp2Verdict {
  bool holds = true;
  // Violating minor M[i][k]M[j][l] - M[i][l]M[j][k] < 0 with i<j, k<l.
  struct Minor {
    int i, j, k, l;
    T value;
  };
  std::optional<Minor> certificate;
};

// All 2x2 minors nonnegative. For strictly positive matrices adjacent minors
// suffice (products of adjacent ones telescope to any minor).
template <class T>
Tp2Verdict<T> check_tp2_matrix(const Matrix<T>& m, const Compare<T>& cmp = {}) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  bool positive = true;
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != cols) throw invalid_input("ragged matrix");
    for (const auto& e : row) {
      if (e < 0) throw invalid_input("TP2 matrix check needs nonnegative entries");
      if (!(e > 0)) positive = false;
    }
  }
  Tp2Verdict<T> v;
  auto at = [&](int r, int c) -> const T& { return m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; };
  for (int i = 0; i < rows; ++i)
    for (int j = i + 1; j < rows; ++j) {
      if (positive && j != i + 1) continue;
      for (int k = 0; k < cols; ++k)
        for (int l = k + 1; l < cols; ++l) {
          if (positive && l != k + 1) continue;
          T a = at(i, k) * at(j, l), b = at(i, l) * at(j, k);
          if (!cmp.leq(b, a)) {
            v.holds = false;
            v.certificate = typename Tp2Verdict<T>::Minor{i, j, k, l, T(a - b)};
            return v;
          }
        }
    }
  return v;
}

template <class T>
struct SupermodularVerdict {
  bool holds = true;
  // lhs = h(x) + h(y) > rhs = h(x^y) + h(xvy)
  struct Witness {
    Cell x, y;
    T lhs, rhs;
  };
  std::optional<Witness> certificate;
};

// h(x^y) + h(xvy) >= h(x) + h(y) on all pairs of `domain` (all cells when
// omitted). The domain must be closed under meet and join.
template <class T>
SupermodularVerdict<T> is_supermodular(const LatticeFunction<T>& h,
                                       const std::optional<std::vector<std::size_t>>& domain = std::nullopt,
                                       const Compare<T>& cmp = {}) {
  const Lattice& lat = h.lattice;
  SupermodularVerdict<T> v;
  auto test = [&](std::size_t i, std::size_t j, std::size_t lo, std::size_t hi) {
    T lhs = h[i] + h[j], rhs = h[lo] + h[hi];
    if (!cmp.leq(lhs, rhs)) {
      v.holds = false;
      v.certificate = typename SupermodularVerdict<T>::Witness{lat.cell_of(i), lat.cell_of(j), lhs, rhs};
    }
    return v.holds;
  };
  if (!domain) {
    for (const auto& p : incomparable_pairs(lat))
      if (!test(p.x, p.y, p.meet, p.join)) return v;
    return v;
  }
  std::vector<char> in(lat.size(), 0);
  for (auto i : *domain) {
    if (i >= lat.size()) throw invalid_input("domain cell out of range");
    in[i] = 1;
  }
  std::vector<std::size_t> dom(*domain);
  std::sort(dom.begin(), dom.end());
  dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  for (std::size_t a = 0; a < dom.size(); ++a)
    for (std::size_t b = a + 1; b < dom.size(); ++b) {
      auto [lo, hi] = lat.meet_join(dom[a], dom[b]);
      if (!in[lo] || !in[hi]) throw invalid_input("domain is not closed under meet and join");
    }
  for (std::size_t a = 0; a < dom.size(); ++a)
    for (std::size_t b = a + 1; b < dom.size(); ++b) {
      auto [lo, hi] = lat.meet_join(dom[a], dom[b]);
      if (lo == dom[a] || lo == dom[b]) continue;
      if (!test(dom[a], dom[b], lo, hi)) return v;
    }
  return v;
}

template <class T>
bool is_modular(const LatticeFunction<T>& h,
                const std::optional<std::vector<std::size_t>>& domain = std::nullopt,
                const Compare<T>& cmp = {}) {
  LatticeFunction<T> neg = h;
  for (auto& x : neg.values) x = -x;
  return is_supermodular(h, domain, cmp).holds && is_supermodular(neg, domain, cmp).holds;
}

}  // namespace totpos

#endif  // TOTPOS_MTP2_HPP_
