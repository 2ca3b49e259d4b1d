#ifndef TOTPOS_MARKOV_HPP_
#define TOTPOS_MARKOV_HPP_

// Graphs derived from tables and the Markov / faithfulness relations
// between a table's independence model and graph separation.

#include <optional>
#include <string>

#include "totpos/indep.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/ugraph.hpp"

namespace totpos {

class not_mtp2_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

class not_graphoid_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

// Edge uv absent iff u _||_ v | rest.
template <class T>
UGraph pairwise_graph(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  const Lattice& lat = t.lattice();
  if (lat.rank() > kMaxModelVars) throw size_guard_error("pairwise graph limited to 6 variables");
  UGraph g(lat.names());
  for (int u = 0; u < lat.rank(); ++u)
    for (int v = u + 1; v < lat.rank(); ++v) {
      VarSet uv{u, v};
      if (!ci_discrete(t, VarSet::single(u), VarSet::single(v), lat.all() - uv, cmp)) g.add_edge(u, v);
    }
  return g;
}

// <A, B | S> iff S separates A from B.
inline IndependenceModel graph_model(const UGraph& g) {
  if (g.size() > kMaxModelVars) throw size_guard_error("graph models limited to 6 nodes");
  IndependenceModel m(g.nodes(), Provenance::graph_separation);
  for_each_triple(g.all(), [&](VarSet a, VarSet b, VarSet s) {
    if (separates(g, a, b, s)) m.insert(a, b, s);
  });
  return m;
}

// First statement (in (|C|, C, A, B) order) on which two models over the
// same variables differ; `in_first` tells which side contains it.
struct ModelDifference {
  CITriple statement;
  bool in_first;
};

inline std::optional<ModelDifference> first_difference(const IndependenceModel& x, const IndependenceModel& y) {
  if (x.names() != y.names()) throw invalid_input("models over different variables");
  std::optional<ModelDifference> out;
  for_each_triple(x.all(), [&](VarSet a, VarSet b, VarSet c) {
    if (out) return;
    bool in_x = x.contains(a, b, c), in_y = y.contains(a, b, c);
    if (in_x != in_y) out = ModelDifference{{a, b, c}, in_x};
  });
  return out;
}

struct MarkovVerdict {
  bool holds = true;
  std::optional<CITriple> counterexample;  // separated in G but not independent
};

template <class T>
MarkovVerdict check_global_markov(const BasicTable<T>& t, const UGraph& g, const Compare<T>& cmp = {}) {
  const Lattice& lat = t.lattice();
  if (lat.rank() > kMaxModelVars) throw size_guard_error("global Markov check limited to 6 variables");
  if (g.nodes() != lat.names()) throw invalid_input("graph nodes do not match the table variables");
  MarkovVerdict v;
  for_each_triple(lat.all(), [&](VarSet a, VarSet b, VarSet s) {
    if (!v.holds) return;
    if (separates(g, a, b, s) && !ci_discrete(t, a, b, s, cmp)) {
      v.holds = false;
      v.counterexample = CITriple{a, b, s};
    }
  });
  return v;
}

struct FaithfulnessVerdict {
  bool holds = true;
  UGraph graph;
  std::size_t statements = 0;  // size of the common model
};

// For an MTP2 table whose model is a graphoid, the model coincides with
// separation in the pairwise graph. Violations of the preconditions raise
// not_mtp2_error / not_graphoid_error; a mismatch under them raises
// internal_inconsistency.
template <class T>
FaithfulnessVerdict check_faithful(const BasicTable<T>& t, const Compare<T>& cmp = {}) {
  if (t.rank() > kMaxModelVars) throw size_guard_error("faithfulness check limited to 6 variables");
  if (!check_mtp2_full(t, cmp).holds) throw not_mtp2_error("table is not MTP2");
  IndependenceModel jp = derive_model(t, cmp);
  AxiomReport s5 = check_axiom(jp, Axiom::S5);
  if (!s5.holds)
    throw not_graphoid_error("independence model violates intersection: premises " +
                             to_string(s5.counterexample->premises[0], jp.names()) + ", " +
                             to_string(s5.counterexample->premises[1], jp.names()));
  FaithfulnessVerdict v;
  v.graph = pairwise_graph(t, cmp);
  IndependenceModel jg = graph_model(v.graph);
  if (auto diff = first_difference(jp, jg))
    throw internal_inconsistency("MTP2 graphoid not faithful to its pairwise graph at " +
                                 to_string(diff->statement, jp.names()));
  v.statements = jp.count();
  return v;
}

}  // namespace totpos

#endif  // TOTPOS_MARKOV_HPP_
