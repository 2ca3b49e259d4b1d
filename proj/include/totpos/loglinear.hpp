#ifndef TOTPOS_LOGLINEAR_HPP_
#define TOTPOS_LOGLINEAR_HPP_

// Interaction expansions h(x) = sum_D theta_D(x_D) with the zero-baseline
// convention (theta_D(x_D) = 0 whenever some x_d = 0), computed by Moebius
// inversion:
//
//   theta_D(x_D) = sum_{A subset of D} (-1)^{|D \ A|} h(x_A, 0_{V \ A}).
//
// Two value types are supported. `double` is the float path. `LogMonomial`
// keeps log p symbolically as an integer combination of log p(cell); any
// linear inequality in the thetas then becomes a comparison of two products
// of table entries, which is decided exactly in rational arithmetic.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "totpos/compare.hpp"
#include "totpos/error.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"

namespace totpos {

// sum_k e_k * log p(cell_k), with cells kept sorted and exponents nonzero.
class LogMonomial {
 public:
  LogMonomial() = default;
  static LogMonomial unit(std::size_t cell) {
    LogMonomial m;
    m.terms_.emplace_back(cell, 1);
    return m;
  }

  const std::vector<std::pair<std::size_t, int>>& terms() const { return terms_; }
  bool zero() const { return terms_.empty(); }

  LogMonomial& operator+=(const LogMonomial& o) { return merge(o, 1); }
  LogMonomial& operator-=(const LogMonomial& o) { return merge(o, -1); }
  friend LogMonomial operator+(LogMonomial a, const LogMonomial& b) { return a += b; }
  friend LogMonomial operator-(LogMonomial a, const LogMonomial& b) { return a -= b; }
  LogMonomial operator-() const {
    LogMonomial m = *this;
    for (auto& t : m.terms_) t.second = -t.second;
    return m;
  }
  friend bool operator==(const LogMonomial&, const LogMonomial&) = default;

 private:
  LogMonomial& merge(const LogMonomial& o, int sign) {
    std::vector<std::pair<std::size_t, int>> out;
    out.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
        out.push_back(terms_[i++]);
      } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
        out.emplace_back(o.terms_[j].first, sign * o.terms_[j].second);
        ++j;
      } else {
        int e = terms_[i].second + sign * o.terms_[j].second;
        if (e != 0) out.emplace_back(terms_[i].first, e);
        ++i, ++j;
      }
    }
    terms_ = std::move(out);
    return *this;
  }

  std::vector<std::pair<std::size_t, int>> terms_;
};

// Sign of a symbolic log-value against a strictly positive table: compares
// prod p^e over positive exponents with prod p^-e over negative ones.
struct SymbolicSign {
  const JointTable* table;
  int operator()(const LogMonomial& m) const {
    Rational num(1), den(1);
    for (auto [cell, e] : m.terms()) {
      const Rational& p = (*table)[cell];
      Rational& side = e > 0 ? num : den;
      for (int k = 0; k < std::abs(e); ++k) side *= p;
    }
    return cmp(num, den);
  }
};

struct FloatSign {
  double tol = 1e-9;
  int operator()(double x) const { return x > tol ? 1 : (x < -tol ? -1 : 0); }
};

template <class T>
double evaluate_log(const LogMonomial& m, const BasicTable<T>& t) {
  double s = 0.0;
  for (auto [cell, e] : m.terms()) s += e * std::log(to_double(t[cell]));
  return s;
}

// S(x): variables at a nonzero rank.
inline VarSet support_of(const Lattice& lat, std::size_t index) {
  VarSet s;
  for (int v = 0; v < lat.rank(); ++v)
    if (lat.coordinate(index, v) != 0) s.insert(v);
  return s;
}

template <class G>
struct Expansion {
  Lattice lattice;
  // terms[D.mask()] is theta_D tabulated over lattice.sub(D).
  std::vector<std::vector<G>> terms;
  // projections[D.mask()][i] = index of cell i's projection onto D.
  std::vector<std::vector<std::size_t>> projections;

  const G& theta(VarSet d, std::size_t full_index) const {
    return terms[d.mask()][projections[d.mask()][full_index]];
  }
  const std::vector<G>& term(VarSet d) const { return terms[d.mask()]; }
};

constexpr int kMaxExpansionRank = 12;

template <class G>
Expansion<G> mobius_expand(const Lattice& lat, const std::function<G(std::size_t)>& h) {
  if (lat.rank() > kMaxExpansionRank) throw size_guard_error("expansion limited to 12 variables");
  const std::uint32_t count = std::uint32_t{1} << lat.rank();
  Expansion<G> e;
  e.lattice = lat;
  e.terms.resize(count);
  e.projections.resize(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    VarSet d(mask);
    Lattice sub = lat.sub(d);
    std::vector<int> members = d.members();
    e.projections[mask] = lat.projection(d);
    std::vector<G> theta(sub.size());
    for (std::size_t y = 0; y < sub.size(); ++y) {
      G acc{};
      for (VarSet a : subsets_of(d)) {
        std::size_t full = 0;
        for (std::size_t k = 0; k < members.size(); ++k)
          if (a.contains(members[k]))
            full += static_cast<std::size_t>(sub.coordinate(y, static_cast<int>(k))) * lat.stride(members[k]);
        if ((d.size() - a.size()) % 2 == 0)
          acc += h(full);
        else
          acc -= h(full);
      }
      theta[y] = std::move(acc);
    }
    e.terms[mask] = std::move(theta);
  }
  return e;
}

// Symbolic expansion of log t. Requires every cell positive.
inline Expansion<LogMonomial> expand(const JointTable& t) {
  if (!t.strictly_positive()) throw precondition_error("log-linear expansion needs a strictly positive table");
  return mobius_expand<LogMonomial>(t.lattice(), [](std::size_t i) { return LogMonomial::unit(i); });
}

template <class T>
Expansion<double> expand_log(const BasicTable<T>& t) {
  if (!t.strictly_positive()) throw precondition_error("log-linear expansion needs a strictly positive table");
  return mobius_expand<double>(t.lattice(), [&](std::size_t i) { return std::log(to_double(t[i])); });
}

inline Expansion<double> expand_function(const LatticeFunction<double>& h) {
  return mobius_expand<double>(h.lattice, [&](std::size_t i) { return h[i]; });
}

// Numeric values of a symbolic expansion.
template <class T>
Expansion<double> evaluate(const Expansion<LogMonomial>& e, const BasicTable<T>& t) {
  Expansion<double> out;
  out.lattice = e.lattice;
  out.projections = e.projections;
  out.terms.resize(e.terms.size());
  for (std::size_t d = 0; d < e.terms.size(); ++d)
    for (const auto& m : e.terms[d]) out.terms[d].push_back(evaluate_log(m, t));
  return out;
}

// sum_{D subset of S(x)} theta_D(x_D) at every cell.
template <class G>
std::vector<G> reconstruct(const Expansion<G>& e) {
  std::vector<G> out(e.lattice.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    G acc{};
    for (VarSet d : subsets_of(support_of(e.lattice, i))) acc += e.theta(d, i);
    out[i] = std::move(acc);
  }
  return out;
}

template <class G>
struct GammaFunction {
  int u = 0, w = 0;
  std::vector<G> values;  // indexed by cell
};

// gamma_uw(x) = sum over D with {u,w} subset of D subset of S(x) of theta_D(x_D).
template <class G>
GammaFunction<G> gamma(const Expansion<G>& e, int u, int w) {
  const Lattice& lat = e.lattice;
  if (u == w) throw invalid_input("gamma needs two distinct variables");
  if (u < 0 || w < 0 || u >= lat.rank() || w >= lat.rank()) throw invalid_input("gamma: unknown variable");
  GammaFunction<G> g{u, w, std::vector<G>(lat.size())};
  VarSet uw = VarSet::single(u) | VarSet::single(w);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    VarSet s = support_of(lat, i);
    if (!uw.subset_of(s)) continue;
    G acc{};
    for (VarSet rest : subsets_of(s - uw)) acc += e.theta(rest | uw, i);
    g.values[i] = std::move(acc);
  }
  return g;
}

enum class GammaCondition { nonnegative, nondecreasing, supermodular };

inline const char* to_string(GammaCondition c) {
  switch (c) {
    case GammaCondition::nonnegative: return "nonnegative";
    case GammaCondition::nondecreasing: return "nondecreasing";
    default: return "supermodular";
  }
}

struct GammaVerdict {
  bool holds = true;
  Mtp2Method method = Mtp2Method::gamma;
  struct Failure {
    GammaCondition condition;
    int u, w;
    Cell x;  // lower corner of the failing step or square
    int direction = -1;  // variable stepped for nondecreasing failures
  };
  std::optional<Failure> failure;
};

// Interaction criterion for MTP2 of a strictly positive table. For every
// pair u < w and every cell x with x_u, x_w >= 1 (so S(x) = A contains u,w):
// gamma_uw(x) >= 0, gamma_uw is non-decreasing in x_u and in x_w, and
// gamma_uw is supermodular in (x_u, x_w) with the other coordinates fixed.
// This is the exact set of conditions equivalent to MTP2; requiring
// monotonicity or supermodularity in a third coordinate as well is
// sufficient but not necessary.
template <class G, class Sign>
GammaVerdict check_mtp2_via_gamma(const Expansion<G>& e, const Sign& sign) {
  const Lattice& lat = e.lattice;
  GammaVerdict verdict;
  for (int u = 0; u < lat.rank(); ++u)
    for (int w = u + 1; w < lat.rank(); ++w) {
      GammaFunction<G> g = gamma(e, u, w);
      for (std::size_t i = 0; i < lat.size(); ++i) {
        int xu = lat.coordinate(i, u), xw = lat.coordinate(i, w);
        if (xu == 0 || xw == 0) continue;
        auto fail = [&](GammaCondition c, int dir) {
          verdict.holds = false;
          verdict.failure = GammaVerdict::Failure{c, u, w, lat.cell_of(i), dir};
          return verdict;
        };
        if (sign(g.values[i]) < 0) return fail(GammaCondition::nonnegative, -1);
        bool up_u = xu + 1 < lat.levels(u), up_w = xw + 1 < lat.levels(w);
        std::size_t iu = i + lat.stride(u), iw = i + lat.stride(w);
        if (up_u && sign(g.values[iu] - g.values[i]) < 0) return fail(GammaCondition::nondecreasing, u);
        if (up_w && sign(g.values[iw] - g.values[i]) < 0) return fail(GammaCondition::nondecreasing, w);
        if (up_u && up_w) {
          std::size_t iuw = iu + lat.stride(w);
          G mixed = g.values[iuw] + g.values[i];
          mixed -= g.values[iu];
          mixed -= g.values[iw];
          if (sign(mixed) < 0) return fail(GammaCondition::supermodular, -1);
        }
      }
    }
  return verdict;
}

inline GammaVerdict check_mtp2_via_gamma(const Expansion<LogMonomial>& e, const JointTable& t) {
  return check_mtp2_via_gamma(e, SymbolicSign{&t});
}

// Binary tables: MTP2 iff sum_{ {u,w} subset D subset A } theta_D >= 0 for
// every A with |A| >= 2 and every pair {u,w} in A.
template <class G, class Sign>
GammaVerdict check_mtp2_binary_interactions(const Expansion<G>& e, const Sign& sign) {
  const Lattice& lat = e.lattice;
  for (int v = 0; v < lat.rank(); ++v)
    if (lat.levels(v) != 2) throw invalid_input("binary interaction criterion needs binary axes");
  GammaVerdict verdict;
  verdict.method = Mtp2Method::binary_interactions;
  for (VarSet a : subsets_by_size(lat.all())) {
    if (a.size() < 2) continue;
    // The all-ones cell on A (zero elsewhere) carries theta_D(1_D) for D in A.
    std::size_t ones = 0;
    for (int v : a.members()) ones += lat.stride(v);
    std::vector<int> m = a.members();
    for (std::size_t p = 0; p < m.size(); ++p)
      for (std::size_t q = p + 1; q < m.size(); ++q) {
        VarSet uw = VarSet::single(m[p]) | VarSet::single(m[q]);
        G acc{};
        for (VarSet rest : subsets_of(a - uw)) acc += e.theta(rest | uw, ones);
        if (sign(acc) < 0) {
          verdict.holds = false;
          verdict.failure = GammaVerdict::Failure{GammaCondition::nonnegative, m[p], m[q], lat.cell_of(ones), -1};
          return verdict;
        }
      }
  }
  return verdict;
}

// Causal betweenness of event B between A and C, for a table over three
// binary variables (A, B, C) where rank 1 means the event occurs.
struct BetweennessCondition {
  std::string name;
  std::optional<bool> holds;  // nullopt: a conditional probability is undefined
};

struct BetweennessReport {
  std::vector<BetweennessCondition> conditions;
  bool betweenness = false;
  bool strictly_positive = false;
  bool mtp2 = false;
  // Interaction relations theta_AB + theta_ABC > 0, theta_BC + theta_ABC > 0,
  // theta_AC + theta_ABC = 0; filled for strictly positive tables.
  std::optional<std::vector<bool>> theta_relations;
};

template <class T>
BetweennessReport check_causal_betweenness(const BasicTable<T>& table, const Compare<T>& cmp = {}) {
  const Lattice& lat = table.lattice();
  if (lat.rank() != 3 || lat.levels(0) != 2 || lat.levels(1) != 2 || lat.levels(2) != 2)
    throw invalid_input("causal betweenness needs three binary variables");
  BasicTable<T> t = table.normalize();
  auto p = [&](int a, int b, int c) -> const T& { return t.at(Cell{a, b, c}); };
  auto prob = [&](auto pred) {
    T s(0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          if (pred(a, b, c)) s += p(a, b, c);
    return s;
  };
  T pa = prob([](int a, int, int) { return a == 1; });
  T pb = prob([](int, int b, int) { return b == 1; });
  T pc = prob([](int, int, int c) { return c == 1; });
  T pac = prob([](int a, int, int c) { return a == 1 && c == 1; });
  T pab = prob([](int a, int b, int) { return a == 1 && b == 1; });
  T pbc = prob([](int, int b, int c) { return b == 1 && c == 1; });
  T pabc = p(1, 1, 1);
  T p_nota_b = prob([](int a, int b, int) { return a == 0 && b == 1; });
  T p_notc_b = prob([](int, int b, int c) { return c == 0 && b == 1; });

  auto greater = [&](const T& x, const T& y) { return !cmp.leq(x, y); };
  BetweennessReport r;
  r.conditions.push_back({"P(A and C) > P(A)P(C)", greater(pac, T(pa * pc))});
  if (pb > 0 && pc > 0)
    r.conditions.push_back({"P(A|B) > P(A|C)", greater(T(pab / pb), T(pac / pc))});
  else
    r.conditions.push_back({"P(A|B) > P(A|C)", std::nullopt});
  if (pb > 0 && pa > 0)
    r.conditions.push_back({"P(C|B) > P(C|A)", greater(T(pbc / pb), T(pac / pa))});
  else
    r.conditions.push_back({"P(C|B) > P(C|A)", std::nullopt});
  if (pb > 0)
    r.conditions.push_back({"P(A and C|B) = P(A|B)P(C|B)", cmp.eq(T(pabc / pb), T((pab / pb) * (pbc / pb)))});
  else
    r.conditions.push_back({"P(A and C|B) = P(A|B)P(C|B)", std::nullopt});
  r.conditions.push_back({"P(not A and B) > 0, P(not C and B) > 0", p_nota_b > 0 && p_notc_b > 0});

  r.betweenness = std::all_of(r.conditions.begin(), r.conditions.end(),
                              [](const BetweennessCondition& c) { return c.holds.value_or(false); });
  r.strictly_positive = t.strictly_positive();
  r.mtp2 = check_mtp2_full(t, cmp).holds;

  if (r.strictly_positive) {
    const VarSet A = VarSet::single(0), B = VarSet::single(1), C = VarSet::single(2);
    auto relations = [&](const auto& e, const auto& sign) {
      std::size_t all = lat.size() - 1;  // cell (1,1,1)
      auto th = [&](VarSet d) { return e.theta(d, all); };
      return std::vector<bool>{sign(th(A | B) + th(A | B | C)) > 0, sign(th(B | C) + th(A | B | C)) > 0,
                               sign(th(A | C) + th(A | B | C)) == 0};
    };
    if constexpr (Compare<T>::exact) {
      r.theta_relations = relations(expand(t), SymbolicSign{&t});
    } else {
      r.theta_relations = relations(expand_log(t), FloatSign{1e-9});
    }
    bool rel_ok = std::all_of(r.theta_relations->begin(), r.theta_relations->end(), [](bool b) { return b; });
    // Strictly positive + betweenness forces the relations and hence MTP2.
    if (r.betweenness && !(rel_ok && r.mtp2))
      throw internal_inconsistency("causal betweenness on a positive table did not yield MTP2");
  }
  return r;
}

}  // namespace totpos

#endif  // TOTPOS_LOGLINEAR_HPP_
