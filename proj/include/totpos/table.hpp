#ifndef TOTPOS_TABLE_HPP_
#define TOTPOS_TABLE_HPP_

// Discrete state spaces and joint tables over them.
//
// A Lattice is the product of finitely many totally ordered axes; cells are
// addressed by rank vectors or by their row-major index (last axis varies
// fastest). Tables attach nonnegative values to every cell. JointTable uses
// exact rationals, FloatTable doubles; every operation here is a template
// over the value type.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "totpos/compare.hpp"
#include "totpos/error.hpp"
#include "totpos/rational.hpp"
#include "totpos/varset.hpp"

namespace totpos {

struct Axis {
  std::string name;
  std::vector<std::string> levels;

  int size() const { return static_cast<int>(levels.size()); }

  // Axis with labels "0", "1", ..., "k-1".
  static Axis ranked(std::string name, int k) {
    Axis a{std::move(name), {}};
    for (int i = 0; i < k; ++i) a.levels.push_back(std::to_string(i));
    return a;
  }

  void validate() const {
    if (levels.empty()) throw invalid_input("axis '" + name + "' has no levels");
    std::set<std::string> seen(levels.begin(), levels.end());
    if (seen.size() != levels.size())
      throw invalid_input("axis '" + name + "' has duplicate level labels");
  }

  int rank_of(std::string_view label) const {
    for (int i = 0; i < size(); ++i)
      if (levels[static_cast<std::size_t>(i)] == label) return i;
    throw invalid_input("axis '" + name + "' has no level '" + std::string(label) + "'");
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

// A point of the state space: one rank per axis.
class Cell {
 public:
  Cell() = default;
  explicit Cell(std::vector<int> ranks) : ranks_(std::move(ranks)) {}
  Cell(std::initializer_list<int> ranks) : ranks_(ranks) {}

  std::size_t size() const { return ranks_.size(); }
  int operator[](std::size_t i) const { return ranks_[i]; }
  int& operator[](std::size_t i) { return ranks_[i]; }
  const std::vector<int>& ranks() const { return ranks_; }
  auto begin() const { return ranks_.begin(); }
  auto end() const { return ranks_.end(); }

  // Componentwise order (the lattice order, not the lexicographic one).
  bool below(const Cell& other) const {
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      if (ranks_[i] > other.ranks_[i]) return false;
    return true;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < ranks_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(ranks_[i]);
    }
    return s + ')';
  }

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;

 private:
  std::vector<int> ranks_;
};

// Coordinate-wise minimum and maximum.
inline std::pair<Cell, Cell> meet_join(const Cell& x, const Cell& y) {
  if (x.size() != y.size()) throw invalid_input("meet_join: cells over different axes");
  std::vector<int> lo(x.size()), hi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo[i] = std::min(x[i], y[i]);
    hi[i] = std::max(x[i], y[i]);
  }
  return {Cell(std::move(lo)), Cell(std::move(hi))};
}

class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.size() > static_cast<std::size_t>(VarSet::kMaxVars))
      throw size_guard_error("more than 32 axes");
    std::set<std::string> names;
    for (const auto& a : axes_) {
      a.validate();
      if (!names.insert(a.name).second)
        throw invalid_input("duplicate variable name '" + a.name + "'");
    }
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    for (std::size_t i = axes_.size(); i-- > 0;) {
      strides_[i] = size_;
      size_ *= static_cast<std::size_t>(axes_[i].size());
    }
  }

  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int v) const { return axes_.at(static_cast<std::size_t>(v)); }
  int rank() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  int levels(int v) const { return axis(v).size(); }
  std::size_t stride(int v) const { return strides_[static_cast<std::size_t>(v)]; }
  VarSet all() const { return VarSet::all(rank()); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& a : axes_) out.push_back(a.name);
    return out;
  }

  int find(std::string_view name) const {
    for (int i = 0; i < rank(); ++i)
      if (axes_[static_cast<std::size_t>(i)].name == name) return i;
    return -1;
  }
  int index_of_name(std::string_view name) const {
    int v = find(name);
    if (v < 0) throw invalid_input("unknown variable '" + std::string(name) + "'");
    return v;
  }
  VarSet varset(const std::vector<std::string>& names) const {
    VarSet s;
    for (const auto& n : names) s.insert(index_of_name(n));
    return s;
  }
  void check_varset(VarSet s) const {
    if (!s.subset_of(all())) throw invalid_input("variable set refers to unknown variables");
  }

  std::size_t index_of(const Cell& c) const {
    if (c.size() != axes_.size()) throw invalid_input("cell " + c.str() + " has wrong arity");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (c[i] < 0 || c[i] >= axes_[i].size())
        throw invalid_input("cell " + c.str() + " out of range on axis '" + axes_[i].name + "'");
      idx += static_cast<std::size_t>(c[i]) * strides_[i];
    }
    return idx;
  }

  Cell cell_of(std::size_t index) const {
    std::vector<int> r(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      r[i] = static_cast<int>(index / strides_[i]);
      index %= strides_[i];
    }
    return Cell(std::move(r));
  }

  int coordinate(std::size_t index, int v) const {
    return static_cast<int>((index / stride(v)) % static_cast<std::size_t>(levels(v)));
  }

  // Lattice over the axes in `keep`, in their original order.
  Lattice sub(VarSet keep) const {
    check_varset(keep);
    std::vector<Axis> ax;
    for (int v : keep.members()) ax.push_back(axis(v));
    return Lattice(std::move(ax));
  }

  // For each cell index, the index of its projection onto `keep`.
  std::vector<std::size_t> projection(VarSet keep) const {
    check_varset(keep);
    Lattice target = sub(keep);
    std::vector<int> members = keep.members();
    std::vector<std::size_t> out(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      std::size_t j = 0;
      for (std::size_t k = 0; k < members.size(); ++k)
        j += static_cast<std::size_t>(coordinate(i, members[k])) * target.strides_[k];
      out[i] = j;
    }
    return out;
  }

  std::pair<std::size_t, std::size_t> meet_join(std::size_t i, std::size_t j) const {
    std::size_t lo = 0, hi = 0;
    for (int v = 0; v < rank(); ++v) {
      int a = coordinate(i, v), b = coordinate(j, v);
      lo += static_cast<std::size_t>(std::min(a, b)) * stride(v);
      hi += static_cast<std::size_t>(std::max(a, b)) * stride(v);
    }
    return {lo, hi};
  }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

// Incomparable cell pairs (i < j) with their meet and join, in lexicographic
// (i, j) order. Comparable pairs satisfy every lattice inequality trivially
// and are skipped.
struct LatticePair {
  std::size_t x, y, meet, join;
};

inline std::vector<LatticePair> incomparable_pairs(const Lattice& lat) {
  std::vector<LatticePair> out;
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (std::size_t j = i + 1; j < lat.size(); ++j) {
      auto [lo, hi] = lat.meet_join(i, j);
      if (lo != i && lo != j) out.push_back({i, j, lo, hi});
    }
  return out;
}

// A real-valued (possibly negative) function on a lattice.
template <class T>
struct LatticeFunction {
  Lattice lattice;
  std::vector<T> values;

  LatticeFunction() = default;
  LatticeFunction(Lattice lat, std::vector<T> vals) : lattice(std::move(lat)), values(std::move(vals)) {
    if (values.size() != lattice.size()) throw invalid_input("function size does not match lattice");
  }
  const T& operator[](std::size_t i) const { return values[i]; }
  const T& at(const Cell& c) const { return values[lattice.index_of(c)]; }
};

template <class T>
class BasicTable {
 public:
  // Scalar table over the empty variable set, value 1.
  BasicTable() : values_{T(1)}, normalized_(true) {}

  BasicTable(Lattice lattice, std::vector<T> values, bool normalized = false)
      : lattice_(std::move(lattice)), values_(std::move(values)), normalized_(normalized) {
    if (values_.size() != lattice_.size())
      throw invalid_input("table has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(lattice_.size()));
    for (const auto& v : values_)
      if (v < 0) throw invalid_input("table values must be nonnegative");
    if (normalized_) {
      T s = total();
      if constexpr (Compare<T>::exact) {
        if (s != 1) throw invalid_input("table flagged normalized does not sum to 1");
      } else {
        if (std::abs(s - 1.0) > 1e-9) throw invalid_input("table flagged normalized does not sum to 1");
      }
    }
  }

  BasicTable(std::vector<Axis> axes, std::vector<T> values, bool normalized = false)
      : BasicTable(Lattice(std::move(axes)), std::move(values), normalized) {}

  // Nonnegative counts scaled to a probability table.
  static BasicTable from_counts(Lattice lattice, std::vector<T> counts) {
    return BasicTable(std::move(lattice), std::move(counts)).normalize();
  }

  const Lattice& lattice() const { return lattice_; }
  const std::vector<Axis>& axes() const { return lattice_.axes(); }
  int rank() const { return lattice_.rank(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<T>& values() const { return values_; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  const T& at(const Cell& c) const { return values_[lattice_.index_of(c)]; }
  bool normalized() const { return normalized_; }

  T total() const {
    T s(0);
    for (const auto& v : values_) s += v;
    return s;
  }

  BasicTable normalize() const {
    T s = total();
    if (s == 0) throw precondition_error("cannot normalize a table with zero total");
    std::vector<T> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / s;
    BasicTable t(lattice_, std::move(out));
    t.normalized_ = true;
    return t;
  }

  bool strictly_positive() const {
    return std::all_of(values_.begin(), values_.end(), [](const T& v) { return v > 0; });
  }

  friend bool operator==(const BasicTable& a, const BasicTable& b) {
    return a.lattice_ == b.lattice_ && a.values_ == b.values_;
  }

 private:
  Lattice lattice_;
  std::vector<T> values_;
  bool normalized_ = false;
};

using JointTable = BasicTable<Rational>;
using FloatTable = BasicTable<double>;

inline FloatTable to_float(const JointTable& t) {
  std::vector<double> v;
  v.reserve(t.size());
  for (const auto& q : t.values()) v.push_back(q.get_d());
  return FloatTable(t.lattice(), std::move(v));
}

// Sum over the variables outside `keep`. An empty `keep` gives the scalar
// table holding the total.
template <class T>
BasicTable<T> marginalize(const BasicTable<T>& t, VarSet keep) {
  t.lattice().check_varset(keep);
  Lattice target = t.lattice().sub(keep);
  std::vector<T> out(target.size(), T(0));
  auto proj = t.lattice().projection(keep);
  for (std::size_t i = 0; i < t.size(); ++i) out[proj[i]] += t[i];
  return BasicTable<T>(std::move(target), std::move(out), t.normalized());
}

template <class T>
BasicTable<T> marginalize(const BasicTable<T>& t, const std::vector<std::string>& names) {
  return marginalize(t, t.lattice().varset(names));
}

// Conditional table of the variables outside `given`, at the ranks `at`
// (listed in increasing variable order).
template <class T>
BasicTable<T> condition(const BasicTable<T>& t, VarSet given, const Cell& at) {
  const Lattice& lat = t.lattice();
  lat.check_varset(given);
  std::vector<int> gm = given.members();
  if (at.size() != gm.size()) throw invalid_input("conditioning cell has wrong arity");
  for (std::size_t k = 0; k < gm.size(); ++k)
    if (at[k] < 0 || at[k] >= lat.levels(gm[k])) throw invalid_input("conditioning rank out of range");

  VarSet rest = lat.all() - given;
  Lattice target = lat.sub(rest);
  auto proj = lat.projection(rest);
  std::vector<T> out(target.size(), T(0));
  T mass(0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < gm.size() && match; ++k) match = lat.coordinate(i, gm[k]) == at[k];
    if (!match) continue;
    out[proj[i]] += t[i];
    mass += t[i];
  }
  if (mass == 0) throw precondition_error("conditioning event " + at.str() + " has probability zero");
  for (auto& v : out) v /= mass;
  return BasicTable<T>(std::move(target), std::move(out), true);
}

// Monotone coarsening of axis `v`: `blocks` must list contiguous rank
// intervals, in order, covering 0..k-1.
template <class T>
BasicTable<T> coarsen(const BasicTable<T>& t, int v, const std::vector<std::vector<int>>& blocks) {
  const Lattice& lat = t.lattice();
  if (v < 0 || v >= lat.rank()) throw invalid_input("coarsen: unknown variable");
  const Axis& ax = lat.axis(v);
  std::vector<int> block_of(static_cast<std::size_t>(ax.size()), -1);
  int next = 0;
  Axis coarse{ax.name, {}};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw invalid_input("coarsen: empty block");
    std::string label;
    for (int r : blocks[b]) {
      if (r != next) throw invalid_input("coarsen: blocks are not contiguous, ordered and covering");
      block_of[static_cast<std::size_t>(r)] = static_cast<int>(b);
      if (!label.empty()) label += '+';
      label += ax.levels[static_cast<std::size_t>(r)];
      ++next;
      if (next > ax.size()) throw invalid_input("coarsen: rank out of range");
    }
    coarse.levels.push_back(label);
  }
  if (next != ax.size()) throw invalid_input("coarsen: blocks do not cover every level");

  std::vector<Axis> axes = lat.axes();
  axes[static_cast<std::size_t>(v)] = coarse;
  Lattice target(std::move(axes));
  std::vector<T> out(target.size(), T(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    Cell c = lat.cell_of(i);
    c[static_cast<std::size_t>(v)] = block_of[static_cast<std::size_t>(c[static_cast<std::size_t>(v)])];
    out[target.index_of(c)] += t[i];
  }
  return BasicTable<T>(std::move(target), std::move(out), t.normalized());
}

// Same table with axes permuted: axis k of the result is axis order[k] of t.
template <class T>
BasicTable<T> reorder(const BasicTable<T>& t, const std::vector<int>& order) {
  const Lattice& lat = t.lattice();
  if (order.size() != static_cast<std::size_t>(lat.rank())) throw invalid_input("reorder: wrong arity");
  std::vector<Axis> axes;
  VarSet seen;
  for (int v : order) {
    if (v < 0 || v >= lat.rank() || seen.contains(v)) throw invalid_input("reorder: not a permutation");
    seen.insert(v);
    axes.push_back(lat.axis(v));
  }
  Lattice target(std::move(axes));
  std::vector<T> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    Cell c = lat.cell_of(i);
    std::vector<int> r;
    for (int v : order) r.push_back(c[static_cast<std::size_t>(v)]);
    out[target.index_of(Cell(std::move(r)))] = t[i];
  }
  return BasicTable<T>(std::move(target), std::move(out), t.normalized());
}

enum class Tri { no, yes, unknown };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::no: return "no";
    case Tri::yes: return "yes";
    default: return "unknown";
  }
}

struct SupportSet {
  std::vector<std::size_t> cells;  // indices of positive cells, ascending
  Tri interval = Tri::unknown;
  Tri cw_connected = Tri::unknown;
};

// Interval support holds iff the support is a box (a product of rank
// intervals): a box is closed under [x^y, xvy], and closure of the support
// under those intervals forces it to contain the box spanned by its
// coordinate ranges. Connectivity uses unit steps along one axis, which is
// the same as joining cells by axis-parallel segments lying in the support.
// The empty support counts as yes/yes.
template <class T>
SupportSet support_analysis(const BasicTable<T>& t) {
  const Lattice& lat = t.lattice();
  SupportSet s;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > 0) s.cells.push_back(i);
  if (s.cells.empty()) {
    s.interval = Tri::yes;
    s.cw_connected = Tri::yes;
    return s;
  }

  std::vector<int> lo(static_cast<std::size_t>(lat.rank()), 1 << 30), hi(static_cast<std::size_t>(lat.rank()), -1);
  for (auto i : s.cells)
    for (int v = 0; v < lat.rank(); ++v) {
      lo[static_cast<std::size_t>(v)] = std::min(lo[static_cast<std::size_t>(v)], lat.coordinate(i, v));
      hi[static_cast<std::size_t>(v)] = std::max(hi[static_cast<std::size_t>(v)], lat.coordinate(i, v));
    }
  std::size_t box = 1;
  for (int v = 0; v < lat.rank(); ++v)
    box *= static_cast<std::size_t>(hi[static_cast<std::size_t>(v)] - lo[static_cast<std::size_t>(v)] + 1);
  s.interval = box == s.cells.size() ? Tri::yes : Tri::no;

  std::vector<char> in(t.size(), 0), seen(t.size(), 0);
  for (auto i : s.cells) in[i] = 1;
  std::vector<std::size_t> stack{s.cells.front()};
  seen[s.cells.front()] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    ++reached;
    for (int v = 0; v < lat.rank(); ++v) {
      int c = lat.coordinate(i, v);
      if (c > 0) {
        std::size_t j = i - lat.stride(v);
        if (in[j] && !seen[j]) seen[j] = 1, stack.push_back(j);
      }
      if (c + 1 < lat.levels(v)) {
        std::size_t j = i + lat.stride(v);
        if (in[j] && !seen[j]) seen[j] = 1, stack.push_back(j);
      }
    }
  }
  s.cw_connected = reached == s.cells.size() ? Tri::yes : Tri::no;
  return s;
}

}  // namespace totpos

#endif  // TOTPOS_TABLE_HPP_
