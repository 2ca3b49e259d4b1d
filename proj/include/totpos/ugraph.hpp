#ifndef TOTPOS_UGRAPH_HPP_
#define TOTPOS_UGRAPH_HPP_

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/varset.hpp"

namespace totpos {

// Simple undirected graph on at most 32 named nodes, stored as adjacency masks.
class UGraph {
 public:
  UGraph() = default;
  explicit UGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size()) {
    if (nodes_.size() > static_cast<std::size_t>(VarSet::kMaxVars)) throw size_guard_error("more than 32 graph nodes");
    std::set<std::string> seen(nodes_.begin(), nodes_.end());
    if (seen.size() != nodes_.size()) throw invalid_input("duplicate graph node name");
  }

  // Nodes named "1".."n".
  static UGraph numbered(int n) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back(std::to_string(i));
    return UGraph(std::move(names));
  }
  static UGraph complete(std::vector<std::string> nodes) {
    UGraph g(std::move(nodes));
    for (int u = 0; u < g.size(); ++u)
      for (int v = u + 1; v < g.size(); ++v) g.add_edge(u, v);
    return g;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  VarSet all() const { return VarSet::all(size()); }

  int find(const std::string& name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    return it == nodes_.end() ? -1 : static_cast<int>(it - nodes_.begin());
  }
  int index_of(const std::string& name) const {
    int v = find(name);
    if (v < 0) throw invalid_input("unknown graph node '" + name + "'");
    return v;
  }

  void add_edge(int u, int v) {
    check(u);
    check(v);
    if (u == v) throw invalid_input("self-loop on node '" + nodes_[static_cast<std::size_t>(u)] + "'");
    adj_[static_cast<std::size_t>(u)].insert(v);
    adj_[static_cast<std::size_t>(v)].insert(u);
  }
  void add_edge(const std::string& u, const std::string& v) { add_edge(index_of(u), index_of(v)); }
  void remove_edge(int u, int v) {
    check(u);
    check(v);
    adj_[static_cast<std::size_t>(u)].erase(v);
    adj_[static_cast<std::size_t>(v)].erase(u);
  }

  bool adjacent(int u, int v) const { return neighbors(u).contains(v); }
  VarSet neighbors(int v) const {
    check(v);
    return adj_[static_cast<std::size_t>(v)];
  }
  int degree(int v) const { return neighbors(v).size(); }
  int max_degree() const {
    int d = 0;
    for (int v = 0; v < size(); ++v) d = std::max(d, degree(v));
    return d;
  }

  // Edges (u, v) with u < v in lexicographic order.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < size(); ++u)
      for (int v : neighbors(u).members())
        if (u < v) out.emplace_back(u, v);
    return out;
  }
  std::size_t edge_count() const { return edges().size(); }

  bool is_complete(VarSet s) const {
    for (int v : s.members())
      if (!(s - VarSet::single(v)).subset_of(neighbors(v))) return false;
    return true;
  }

  // Subgraph induced on `keep`, nodes in their original order.
  UGraph induced(VarSet keep) const {
    std::vector<std::string> names;
    std::vector<int> members = keep.members();
    for (int v : members) names.push_back(nodes_.at(static_cast<std::size_t>(v)));
    UGraph g(std::move(names));
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (adjacent(members[a], members[b])) g.add_edge(static_cast<int>(a), static_cast<int>(b));
    return g;
  }

  friend bool operator==(const UGraph& a, const UGraph& b) { return a.nodes_ == b.nodes_ && a.adj_ == b.adj_; }

 private:
  void check(int v) const {
    if (v < 0 || v >= size()) throw invalid_input("graph node index out of range");
  }

  std::vector<std::string> nodes_;
  std::vector<VarSet> adj_;
};

// Nodes reachable from `from` without entering `blocked`.
inline VarSet reachable(const UGraph& g, VarSet from, VarSet blocked) {
  VarSet seen = from - blocked, frontier = seen;
  while (!frontier.empty()) {
    VarSet next;
    for (int v : frontier.members()) next = next | g.neighbors(v);
    next = next - blocked - seen;
    seen = seen | next;
    frontier = next;
  }
  return seen;
}

// Every path from A to B meets S.
inline bool separates(const UGraph& g, VarSet a, VarSet b, VarSet s) {
  if (!a.subset_of(g.all()) || !b.subset_of(g.all()) || !s.subset_of(g.all()))
    throw invalid_input("separation query refers to unknown nodes");
  if (a.empty() || b.empty()) throw invalid_input("separation needs nonempty A and B");
  if (!a.disjoint(b) || !a.disjoint(s) || !b.disjoint(s)) throw invalid_input("separation sets must be disjoint");
  return reachable(g, a, s).disjoint(b);
}

inline std::vector<VarSet> connected_components(const UGraph& g) {
  std::vector<VarSet> out;
  VarSet left = g.all();
  while (!left.empty()) {
    VarSet comp = reachable(g, VarSet::single(left.first()), VarSet{});
    out.push_back(comp);
    left = left - comp;
  }
  return out;
}

constexpr int kMaxCliqueNodes = 12;

namespace detail {

inline void bron_kerbosch(const UGraph& g, VarSet r, VarSet p, VarSet x, std::vector<VarSet>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  // pivot: the node of P u X with most neighbours in P
  int pivot = -1, best = -1;
  for (int u : (p | x).members()) {
    int c = (g.neighbors(u) & p).size();
    if (c > best) best = c, pivot = u;
  }
  for (int v : (p - g.neighbors(pivot)).members()) {
    VarSet nv = g.neighbors(v);
    bron_kerbosch(g, r | VarSet::single(v), p & nv, x & nv, out);
    p.erase(v);
    x.insert(v);
  }
}

inline bool members_less(VarSet a, VarSet b) { return a.members() < b.members(); }

}  // namespace detail

// All maximal cliques, ordered by their sorted member lists.
inline std::vector<VarSet> cliques(const UGraph& g) {
  if (g.size() > kMaxCliqueNodes) throw size_guard_error("clique enumeration limited to 12 nodes");
  std::vector<VarSet> out;
  if (g.size() == 0) return out;
  detail::bron_kerbosch(g, VarSet{}, g.all(), VarSet{}, out);
  std::sort(out.begin(), out.end(), detail::members_less);
  return out;
}

// Maximum cardinality search visit order, ties broken by smallest index.
inline std::vector<int> mcs_order(const UGraph& g) {
  std::vector<int> order, weight(static_cast<std::size_t>(g.size()), 0);
  VarSet left = g.all();
  while (!left.empty()) {
    int pick = -1;
    for (int v : left.members())
      if (pick < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(pick)]) pick = v;
    order.push_back(pick);
    left.erase(pick);
    for (int w : (g.neighbors(pick) & left).members()) ++weight[static_cast<std::size_t>(w)];
  }
  return order;
}

// Chordality: in an MCS order every vertex's earlier neighbours must be
// complete; the reversed order is then a perfect elimination ordering.
inline std::optional<std::vector<int>> perfect_elimination_order(const UGraph& g) {
  std::vector<int> order = mcs_order(g);
  VarSet earlier;
  for (int v : order) {
    if (!g.is_complete(g.neighbors(v) & earlier)) return std::nullopt;
    earlier.insert(v);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

inline bool is_decomposable(const UGraph& g) { return perfect_elimination_order(g).has_value(); }

inline std::string to_dot(const UGraph& g, const std::string& name = "G") {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (const auto& n : g.nodes()) os << "  \"" << n << "\";\n";
  for (auto [u, v] : g.edges())
    os << "  \"" << g.nodes()[static_cast<std::size_t>(u)] << "\" -- \"" << g.nodes()[static_cast<std::size_t>(v)] << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace totpos

#endif  // TOTPOS_UGRAPH_HPP_
