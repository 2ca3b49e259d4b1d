#ifndef TOTPOS_CONSTRUCT_HPP_
#define TOTPOS_CONSTRUCT_HPP_

// Constructors: Markov combination of consistent margins, pairwise / clique
// potential products, and decomposable assembly from clique marginals.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"
#include "totpos/ugraph.hpp"

namespace totpos {

// Shared marginals differ; `cell` indexes the shared variables in the order
// of the first table.
struct MarginMismatch {
  std::vector<std::string> shared;
  Cell cell;
  Rational left, right;
};

class inconsistent_margins_error : public invalid_input {
 public:
  explicit inconsistent_margins_error(MarginMismatch m)
      : invalid_input(describe(m)), mismatch_(std::move(m)) {}
  const MarginMismatch& mismatch() const { return mismatch_; }

 private:
  static std::string describe(const MarginMismatch& m) {
    std::string vars;
    for (const auto& s : m.shared) vars += (vars.empty() ? "" : ",") + s;
    return "margins over {" + vars + "} differ at " + m.cell.str() + ": " + to_string(m.left) + " vs " +
           to_string(m.right);
  }
  MarginMismatch mismatch_;
};

struct CombineOptions {
  // Accept shared margins within this absolute difference (float-ingested
  // data). Exact equality when unset.
  std::optional<double> tolerance;
};

// Variables are matched by name. The result lists the first table's
// variables, then the second's remaining ones in their own order.
inline JointTable markov_combination(const JointTable& first, const JointTable& second, const CombineOptions& opt = {}) {
  const Lattice& la = first.lattice();
  const Lattice& lb = second.lattice();
  std::vector<std::string> shared;
  std::vector<Axis> axes = la.axes();
  std::vector<int> shared_in_b;
  for (int v = 0; v < lb.rank(); ++v) {
    const Axis& ax = lb.axis(v);
    int u = la.find(ax.name);
    if (u < 0) {
      axes.push_back(ax);
      continue;
    }
    if (!(la.axis(u) == ax)) throw invalid_input("variable '" + ax.name + "' has different levels in the two tables");
  }
  for (int u = 0; u < la.rank(); ++u)
    if (lb.find(la.axis(u).name) >= 0) {
      shared.push_back(la.axis(u).name);
      shared_in_b.push_back(lb.index_of_name(la.axis(u).name));
    }

  JointTable pa = first.normalize(), pb = second.normalize();
  JointTable ha = marginalize(pa, la.varset(shared));
  // B's marginal with its axes in A's order
  JointTable hb_raw = marginalize(pb, lb.varset(shared));
  std::vector<int> order;
  {
    std::vector<int> sorted = shared_in_b;
    std::sort(sorted.begin(), sorted.end());
    for (int v : shared_in_b) order.push_back(static_cast<int>(std::find(sorted.begin(), sorted.end(), v) - sorted.begin()));
  }
  JointTable hb = reorder(hb_raw, order);
  for (std::size_t i = 0; i < ha.size(); ++i) {
    bool same = opt.tolerance ? std::abs(Rational(ha[i] - hb[i]).get_d()) <= *opt.tolerance : ha[i] == hb[i];
    if (!same) throw inconsistent_margins_error({shared, ha.lattice().cell_of(i), ha[i], hb[i]});
  }

  Lattice target(std::move(axes));
  // positions of B's variables in the target
  std::vector<int> b_pos;
  for (int v = 0; v < lb.rank(); ++v) b_pos.push_back(target.index_of_name(lb.axis(v).name));
  std::vector<int> s_pos;
  for (const auto& s : shared) s_pos.push_back(target.index_of_name(s));

  std::vector<Rational> out(target.size());
  std::vector<int> xa(static_cast<std::size_t>(la.rank())), xb(static_cast<std::size_t>(lb.rank())),
      xs(shared.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    Cell c = target.cell_of(i);
    for (int v = 0; v < la.rank(); ++v) xa[static_cast<std::size_t>(v)] = c[static_cast<std::size_t>(v)];
    for (int v = 0; v < lb.rank(); ++v)
      xb[static_cast<std::size_t>(v)] = c[static_cast<std::size_t>(b_pos[static_cast<std::size_t>(v)])];
    for (std::size_t k = 0; k < shared.size(); ++k) xs[k] = c[static_cast<std::size_t>(s_pos[k])];
    const Rational& h = ha.at(Cell(xs));
    out[i] = sgn(h) == 0 ? Rational(0) : Rational(pa.at(Cell(xa)) * pb.at(Cell(xb)) / h);
  }
  if (opt.tolerance) return JointTable::from_counts(std::move(target), std::move(out));
  return JointTable(std::move(target), std::move(out), true);
}

// A nonnegative function on the variables `scope` (graph node indices,
// increasing), values row-major over their axes.
struct Potential {
  std::vector<int> scope;
  std::vector<Rational> values;
};

struct PotentialSpec {
  UGraph graph;
  std::vector<Axis> axes;  // one per graph node, same order
  std::vector<Potential> potentials;

  // Binary axes named after the graph nodes.
  static std::vector<Axis> binary_axes(const UGraph& g) {
    std::vector<Axis> axes;
    for (const auto& n : g.nodes()) axes.push_back(Axis::ranked(n, 2));
    return axes;
  }
};

struct PotentialVerdict {
  std::vector<int> scope;
  Mtp2Verdict verdict;
};

struct PotentialProduct {
  JointTable table;
  Rational z;  // normalizing constant of the raw product
  Mtp2Verdict verdict;
  std::vector<PotentialVerdict> per_potential;
};

namespace detail {

inline Lattice potential_lattice(const PotentialSpec& spec, const Potential& p) {
  std::vector<Axis> axes;
  for (int v : p.scope) axes.push_back(spec.axes.at(static_cast<std::size_t>(v)));
  return Lattice(std::move(axes));
}

inline void validate_spec(const PotentialSpec& spec) {
  const UGraph& g = spec.graph;
  if (spec.axes.size() != static_cast<std::size_t>(g.size())) throw invalid_input("one axis per graph node required");
  for (int v = 0; v < g.size(); ++v)
    if (spec.axes[static_cast<std::size_t>(v)].name != g.nodes()[static_cast<std::size_t>(v)])
      throw invalid_input("axis names must follow the graph node order");
  std::vector<VarSet> scopes;
  for (const auto& p : spec.potentials) {
    if (p.scope.empty()) throw invalid_input("potential with an empty scope");
    if (!std::is_sorted(p.scope.begin(), p.scope.end()) ||
        std::adjacent_find(p.scope.begin(), p.scope.end()) != p.scope.end())
      throw invalid_input("potential scope must list distinct nodes in increasing order");
    VarSet s;
    for (int v : p.scope) {
      if (v < 0 || v >= g.size()) throw invalid_input("potential scope refers to an unknown node");
      s.insert(v);
    }
    if (!g.is_complete(s)) throw invalid_input("potential scope is not complete in the graph");
    Lattice lat = potential_lattice(spec, p);
    if (p.values.size() != lat.size()) throw invalid_input("potential has the wrong number of values");
    for (const auto& x : p.values)
      if (!(x > 0)) throw invalid_input("potentials must be strictly positive");
    for (VarSet t : scopes)
      if ((s & t).size() > 1) throw invalid_input("potential scopes may share at most one node");
    scopes.push_back(s);
  }
  for (auto [u, v] : g.edges()) {
    bool covered = std::any_of(scopes.begin(), scopes.end(), [&](VarSet s) { return s.contains(u) && s.contains(v); });
    if (!covered)
      throw invalid_input("edge " + g.nodes()[static_cast<std::size_t>(u)] + "-" +
                          g.nodes()[static_cast<std::size_t>(v)] + " has no potential");
  }
}

}  // namespace detail

// Product of the potentials normalized by Z. The MTP2 verdict is computed
// per potential and on the product; the two must agree.
inline PotentialProduct from_potentials(const PotentialSpec& spec) {
  detail::validate_spec(spec);
  Lattice lat(spec.axes);
  std::vector<Rational> raw(lat.size(), Rational(1));
  PotentialProduct out;
  bool all_mtp2 = true;
  for (const auto& p : spec.potentials) {
    Lattice pl = detail::potential_lattice(spec, p);
    VarSet scope;
    for (int v : p.scope) scope.insert(v);
    auto proj = lat.projection(scope);
    for (std::size_t i = 0; i < lat.size(); ++i) raw[i] *= p.values[proj[i]];
    Mtp2Verdict pv = check_mtp2_full(JointTable(pl, p.values));
    pv.method = Mtp2Method::potentials;
    all_mtp2 = all_mtp2 && pv.holds;
    out.per_potential.push_back({p.scope, std::move(pv)});
  }
  out.z = 0;
  for (const auto& x : raw) out.z += x;
  for (auto& x : raw) x /= out.z;
  out.table = JointTable(lat, std::move(raw), true);
  out.verdict = check_mtp2_full(out.table);
  out.verdict.method = Mtp2Method::potentials;
  if (out.verdict.holds != all_mtp2)
    throw internal_inconsistency("potential-wise and full MTP2 verdicts disagree");
  return out;
}

struct AssemblyResult {
  JointTable table;  // variables in graph node order
  Mtp2Verdict verdict;
  std::vector<VarSet> clique_order;  // order of combination
  std::vector<bool> clique_mtp2;     // per clique, in clique_order
};

// Iterated Markov combination of clique marginals along a running
// intersection order. Clique intersections must be empty or singletons.
inline AssemblyResult assemble_decomposable(const UGraph& g, const std::vector<JointTable>& marginals) {
  if (!is_decomposable(g)) throw precondition_error("graph is not decomposable");
  std::vector<VarSet> cl = cliques(g);
  for (std::size_t a = 0; a < cl.size(); ++a)
    for (std::size_t b = a + 1; b < cl.size(); ++b)
      if ((cl[a] & cl[b]).size() > 1)
        throw precondition_error("cliques share more than one node; combine the margins with markov_combination instead");

  // marginal for each clique
  std::vector<const JointTable*> of(cl.size(), nullptr);
  for (const auto& m : marginals) {
    VarSet s;
    for (const auto& a : m.axes()) s.insert(g.index_of(a.name));
    auto it = std::find(cl.begin(), cl.end(), s);
    if (it == cl.end()) throw invalid_input("marginal does not match a clique of the graph");
    auto& slot = of[static_cast<std::size_t>(it - cl.begin())];
    if (slot) throw invalid_input("two marginals for the same clique");
    slot = &m;
  }
  for (std::size_t k = 0; k < cl.size(); ++k)
    if (!of[k]) throw invalid_input("missing marginal for a clique");

  // greedy running intersection order
  AssemblyResult r;
  std::vector<bool> used(cl.size(), false);
  VarSet covered;
  std::optional<JointTable> acc;
  bool all_mtp2 = true;
  for (std::size_t step = 0; step < cl.size(); ++step) {
    std::size_t pick = cl.size();
    for (std::size_t k = 0; k < cl.size() && pick == cl.size(); ++k) {
      if (used[k]) continue;
      VarSet meet = cl[k] & covered;
      bool ok = meet.empty();
      for (std::size_t j = 0; j < cl.size() && !ok; ++j) ok = used[j] && meet.subset_of(cl[j]);
      if (ok) pick = k;
    }
    if (pick == cl.size()) throw internal_inconsistency("no running intersection order for a decomposable graph");
    used[pick] = true;
    covered = covered | cl[pick];
    const JointTable& m = *of[pick];
    bool ok = check_mtp2_full(m).holds;
    all_mtp2 = all_mtp2 && ok;
    r.clique_order.push_back(cl[pick]);
    r.clique_mtp2.push_back(ok);
    acc = acc ? markov_combination(*acc, m) : m.normalize();
  }

  std::vector<int> order;
  for (const auto& n : g.nodes()) order.push_back(acc->lattice().index_of_name(n));
  r.table = reorder(*acc, order);
  r.verdict = check_mtp2_full(r.table);
  r.verdict.method = Mtp2Method::cliques;
  if (r.verdict.holds != all_mtp2) throw internal_inconsistency("clique-wise and full MTP2 verdicts disagree");
  return r;
}

}  // namespace totpos

#endif  // TOTPOS_CONSTRUCT_HPP_
