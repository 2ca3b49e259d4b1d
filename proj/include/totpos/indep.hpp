#ifndef TOTPOS_INDEP_HPP_
#define TOTPOS_INDEP_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "totpos/compare.hpp"
#include "totpos/error.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"
#include "totpos/varset.hpp"

namespace totpos {

namespace detail {

// Positions of `s` inside the ordered member list of `within`.
inline VarSet compress(VarSet s, VarSet within) {
  VarSet out;
  int k = 0;
  for (int v : within.members()) {
    if (s.contains(v)) out.insert(k);
    ++k;
  }
  return out;
}

inline void require_disjoint(VarSet a, VarSet b, VarSet c) {
  if (!a.disjoint(b) || !a.disjoint(c) || !b.disjoint(c))
    throw invalid_input("independence statement sets must be disjoint");
}

}  // namespace detail

// A _||_ B | C, checked as p(a,b,c) p(c) = p(a,c) p(b,c) on every cell.
// Statements with an empty side hold trivially.
template <class T>
bool ci_discrete(const BasicTable<T>& t, VarSet a, VarSet b, VarSet c, const Compare<T>& cmp = {}) {
  const Lattice& lat = t.lattice();
  lat.check_varset(a | b | c);
  detail::require_disjoint(a, b, c);
  if (a.empty() || b.empty()) return true;
  VarSet all = a | b | c;
  BasicTable<T> m = marginalize(t, all);
  const Lattice& sub = m.lattice();
  VarSet ac = detail::compress(a | c, all), bc = detail::compress(b | c, all), cc = detail::compress(c, all);
  BasicTable<T> m_ac = marginalize(m, ac), m_bc = marginalize(m, bc), m_c = marginalize(m, cc);
  auto p_ac = sub.projection(ac), p_bc = sub.projection(bc), p_c = sub.projection(cc);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!cmp.eq(m[i] * m_c[p_c[i]], m_ac[p_ac[i]] * m_bc[p_bc[i]])) return false;
  return true;
}

struct CITriple {
  VarSet a, b, c;
  friend bool operator==(const CITriple&, const CITriple&) = default;
};

inline std::string to_string(const CITriple& s, const std::vector<std::string>& names) {
  auto side = [&](VarSet x) {
    std::string out;
    for (int v : x.members()) {
      if (!out.empty()) out += ',';
      out += names.at(static_cast<std::size_t>(v));
    }
    return x.size() == 1 ? out : "{" + out + "}";
  };
  return "<" + side(s.a) + "," + side(s.b) + "|" + side(s.c) + ">";
}

constexpr int kMaxModelVars = 6;

enum class Provenance { derived, explicit_statements, graph_separation };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::derived: return "derived";
    case Provenance::graph_separation: return "graph";
    default: return "explicit";
  }
}

// Extensional set of statements over at most 6 variables. Statements with
// an empty side are implicit members and never stored.
class IndependenceModel {
 public:
  IndependenceModel() : IndependenceModel(std::vector<std::string>{}) {}
  explicit IndependenceModel(std::vector<std::string> names, Provenance p = Provenance::explicit_statements)
      : names_(std::move(names)), provenance_(p) {
    if (names_.size() > static_cast<std::size_t>(kMaxModelVars))
      throw size_guard_error("independence models limited to 6 variables");
    bits_.assign(std::size_t{1} << (3 * names_.size()), 0);
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  Provenance provenance() const { return provenance_; }
  VarSet all() const { return VarSet::all(size()); }

  bool contains(VarSet a, VarSet b, VarSet c) const {
    check(a, b, c);
    if (a.empty() || b.empty()) return true;
    return bits_[key(a, b, c)] != 0;
  }
  bool contains(const CITriple& s) const { return contains(s.a, s.b, s.c); }

  // Returns true when the statement was not yet present.
  bool insert(VarSet a, VarSet b, VarSet c) {
    check(a, b, c);
    if (a.empty() || b.empty()) return false;
    char& bit = bits_[key(a, b, c)];
    if (bit) return false;
    bit = 1;
    ++count_;
    return true;
  }
  bool insert(const CITriple& s) { return insert(s.a, s.b, s.c); }

  std::size_t count() const { return count_; }

  // Stored statements in normal form (a < b), ordered by (|C|, C, A, B).
  std::vector<CITriple> statements() const {
    std::vector<CITriple> out;
    for (VarSet c : subsets_by_size(all()))
      for (VarSet a : subsets_of(all() - c))
        for (VarSet b : subsets_of(all() - c - a))
          if (!a.empty() && !b.empty() && a < b && bits_[key(a, b, c)]) out.push_back({a, b, c});
    return out;
  }

  friend bool operator==(const IndependenceModel& x, const IndependenceModel& y) {
    return x.names_ == y.names_ && x.bits_ == y.bits_;
  }

 private:
  void check(VarSet a, VarSet b, VarSet c) const {
    if (!(a | b | c).subset_of(all())) throw invalid_input("statement refers to unknown variables");
    detail::require_disjoint(a, b, c);
  }
  std::size_t key(VarSet a, VarSet b, VarSet c) const {
    if (b < a) std::swap(a, b);
    const auto n = static_cast<unsigned>(size());
    return a.mask() | (std::size_t{b.mask()} << n) | (std::size_t{c.mask()} << (2 * n));
  }

  std::vector<std::string> names_;
  Provenance provenance_;
  std::vector<char> bits_;
  std::size_t count_ = 0;
};

// Enumerates disjoint (A, B, C) with A, B nonempty and A < B, in (|C|, C, A, B) order.
template <class F>
void for_each_triple(VarSet universe, F&& f) {
  for (VarSet c : subsets_by_size(universe))
    for (VarSet a : subsets_of(universe - c)) {
      if (a.empty()) continue;
      for (VarSet b : subsets_of(universe - c - a))
        if (!b.empty() && a < b) f(a, b, c);
    }
}

template <class T>
IndependenceModel derive_model(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  if (t.rank() > kMaxModelVars) throw size_guard_error("model derivation limited to 6 variables");
  IndependenceModel m(t.lattice().names(), Provenance::derived);
  for_each_triple(t.lattice().all(), [&](VarSet a, VarSet b, VarSet c) {
    if (ci_discrete(t, a, b, c, cmp)) m.insert(a, b, c);
  });
  return m;
}

enum class Axiom { S1 = 1, S2, S3, S4, S5, S6, S7, S8 };

inline std::string to_string(Axiom a) { return "S" + std::to_string(static_cast<int>(a)); }

inline Axiom parse_axiom(const std::string& s) {
  if (s.size() == 2 && (s[0] == 'S' || s[0] == 's') && s[1] >= '1' && s[1] <= '8') return static_cast<Axiom>(s[1] - '0');
  throw invalid_input("unknown axiom '" + s + "' (expected S1..S8)");
}

struct AxiomReport {
  Axiom axiom;
  bool holds = true;
  // Premises all in the model; none of the alternatives in `missing` is.
  struct Counterexample {
    std::vector<CITriple> premises;
    std::vector<CITriple> missing;
  };
  std::optional<Counterexample> counterexample;
};

// Exhaustive instantiation. Instances range over nonempty A, B, D (empty
// sides give trivially true instances), enumerated as C by (size, mask),
// then A, B, D by mask; the first failing instance is reported.
inline AxiomReport check_axiom(const IndependenceModel& m, Axiom axiom) {
  AxiomReport r{axiom, true, std::nullopt};
  const VarSet V = m.all();
  auto in = [&](VarSet a, VarSet b, VarSet c) { return m.contains(a, b, c); };
  auto fail = [&](std::vector<CITriple> premises, std::vector<CITriple> missing) {
    r.holds = false;
    r.counterexample = AxiomReport::Counterexample{std::move(premises), std::move(missing)};
    return r;
  };

  if (axiom == Axiom::S7) {
    for (VarSet c : subsets_by_size(V))
      for (int u : (V - c).members())
        for (int v : (V - c).members()) {
          if (v == u) continue;
          VarSet U = VarSet::single(u), W0 = VarSet::single(v);
          if (!in(U, W0, c)) continue;
          for (int w : (V - c - U - W0).members()) {
            VarSet W = VarSet::single(w);
            if (in(U, W0, c | W) && !in(U, W, c) && !in(W0, W, c)) {
              return fail({{U, W0, c}, {U, W0, c | W}}, {{U, W, c}, {W0, W, c}});
            }
          }
        }
    return r;
  }

  for (VarSet c : subsets_by_size(V))
    for (VarSet a : subsets_of(V - c)) {
      if (a.empty()) continue;
      for (VarSet b : subsets_of(V - c - a)) {
        if (b.empty()) continue;
        if (axiom == Axiom::S1) {
          if (in(a, b, c) != in(b, a, c)) {
            return fail({{a, b, c}}, {{b, a, c}});
          }
          continue;
        }
        if (axiom == Axiom::S8) {
          if (!in(a, b, c)) continue;
          for (VarSet d : subsets_of(V - a - b - c))
            if (!d.empty() && !in(a, b, c | d)) {
              return fail({{a, b, c}}, {{a, b, c | d}});
            }
          continue;
        }
        for (VarSet d : subsets_of(V - c - a - b)) {
          if (d.empty()) continue;
          switch (axiom) {
            case Axiom::S2:
              if (in(a, b | d, c)) {
                if (!in(a, b, c)) return fail({{a, b | d, c}}, {{a, b, c}});
                if (!in(a, d, c)) return fail({{a, b | d, c}}, {{a, d, c}});
              }
              break;
            case Axiom::S3:
              if (in(a, b | d, c)) {
                if (!in(a, b, c | d)) return fail({{a, b | d, c}}, {{a, b, c | d}});
                if (!in(a, d, c | b)) return fail({{a, b | d, c}}, {{a, d, c | b}});
              }
              break;
            case Axiom::S4:
              if (in(a, b, c | d) && in(a, d, c) && !in(a, b | d, c))
                return fail({{a, b, c | d}, {a, d, c}}, {{a, b | d, c}});
              if (in(a, b | d, c)) {
                if (!in(a, b, c | d)) return fail({{a, b | d, c}}, {{a, b, c | d}});
                if (!in(a, d, c)) return fail({{a, b | d, c}}, {{a, d, c}});
              }
              break;
            case Axiom::S5:
              if (in(a, b, c | d) && in(a, d, c | b) && !in(a, b | d, c))
                return fail({{a, b, c | d}, {a, d, c | b}}, {{a, b | d, c}});
              break;
            case Axiom::S6:
              if (in(a, b, c) && in(a, d, c) && !in(a, b | d, c))
                return fail({{a, b, c}, {a, d, c}}, {{a, b | d, c}});
              break;
            default:
              break;
          }
        }
      }
    }
  return r;
}

// The premises are in the model and no listed conclusion is.
inline bool recheck(const IndependenceModel& m, const AxiomReport::Counterexample& ce) {
  for (const auto& p : ce.premises)
    if (!m.contains(p)) return false;
  for (const auto& q : ce.missing)
    if (m.contains(q)) return false;
  return true;
}

// Least fixed point under the chosen inference rules. S1 is built into the
// representation; S4 is applied in both directions.
inline IndependenceModel semigraphoid_closure(const IndependenceModel& start, const std::vector<Axiom>& rules) {
  for (Axiom a : rules)
    if (a == Axiom::S5 || a == Axiom::S7) throw invalid_input("closure supports S1-S4, S6 and S8 only");
  auto uses = [&](Axiom a) { return std::find(rules.begin(), rules.end(), a) != rules.end(); };
  IndependenceModel m = start;
  const VarSet V = m.all();
  bool changed = true;
  while (changed) {
    changed = false;
    for (const CITriple& s : m.statements())
      for (int side = 0; side < 2; ++side) {
        VarSet a = side ? s.b : s.a, x = side ? s.a : s.b, c = s.c;
        // statement <a, x | c>
        if (uses(Axiom::S2) || uses(Axiom::S3) || uses(Axiom::S4))
          for (VarSet b : subsets_of(x)) {
            if (b.empty() || b == x) continue;
            if (uses(Axiom::S2) || uses(Axiom::S4)) changed |= m.insert(a, b, c);
            if (uses(Axiom::S3) || uses(Axiom::S4)) changed |= m.insert(a, b, c | (x - b));
          }
        if (uses(Axiom::S8))
          for (VarSet d : subsets_of(V - a - x - c))
            if (!d.empty()) changed |= m.insert(a, x, c | d);
        if (uses(Axiom::S6))
          for (VarSet d : subsets_of(V - a - x - c))
            if (!d.empty() && m.contains(a, d, c)) changed |= m.insert(a, x | d, c);
        if (uses(Axiom::S4))
          // <a, x | c> with c = c' u d and <a, d | c'> give <a, x u d | c'>
          for (VarSet d : subsets_of(c))
            if (!d.empty() && m.contains(a, d, c - d)) changed |= m.insert(a, x | d, c - d);
      }
  }
  return m;
}

// Partition of the variables into marginally independent blocks of an MTP2
// table, with the exact product factorization across blocks verified.
template <class T>
std::vector<VarSet> marginal_blocks(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  const Lattice& lat = t.lattice();
  if (!check_mtp2_full(t, cmp).holds) throw precondition_error("marginal blocks require an MTP2 table");
  for (int v = 0; v < lat.rank(); ++v) {
    auto m = marginalize(t, VarSet::single(v));
    int positive = 0;
    for (const auto& x : m.values()) positive += x > 0;
    if (positive < 2) throw precondition_error("variable '" + lat.axis(v).name + "' is degenerate");
  }
  const int n = lat.rank();
  std::vector<VarSet> dep(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!ci_discrete(t, VarSet::single(u), VarSet::single(v), VarSet{}, cmp)) {
        dep[static_cast<std::size_t>(u)].insert(v);
        dep[static_cast<std::size_t>(v)].insert(u);
      }
  std::vector<VarSet> blocks;
  VarSet left = lat.all();
  while (!left.empty()) {
    VarSet comp = VarSet::single(left.first()), frontier = comp;
    while (!frontier.empty()) {
      VarSet next;
      for (int v : frontier.members()) next = next | dep[static_cast<std::size_t>(v)];
      next = next - comp;
      comp = comp | next;
      frontier = next;
    }
    for (int u : comp.members())
      if (!(comp - VarSet::single(u)).subset_of(dep[static_cast<std::size_t>(u)]))
        throw internal_inconsistency("marginal dependence is not transitive on an MTP2 table");
    blocks.push_back(comp);
    left = left - comp;
  }
  // exact product factorization
  T total = t.total();
  std::vector<BasicTable<T>> margins;
  std::vector<std::vector<std::size_t>> proj;
  for (VarSet b : blocks) {
    margins.push_back(marginalize(t, b));
    proj.push_back(lat.projection(b));
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    T prod(1);
    for (std::size_t k = 0; k < blocks.size(); ++k) prod *= margins[k][proj[k][i]] / total;
    if (!cmp.eq(T(t[i] / total), prod)) throw internal_inconsistency("MTP2 table does not factor across marginal blocks");
  }
  return blocks;
}

}  // namespace totpos

#endif  // TOTPOS_INDEP_HPP_
