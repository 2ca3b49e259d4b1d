#ifndef TOTPOS_VARSET_HPP_
#define TOTPOS_VARSET_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "totpos/error.hpp"

namespace totpos {

// Subset of variable positions 0..31, stored as a bitmask. Ordering is by
// mask value, which is the "lexicographic" order used for reproducible
// enumeration everywhere in the library.
class VarSet {
 public:
  static constexpr int kMaxVars = 32;

  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint32_t mask) : mask_(mask) {}
  VarSet(std::initializer_list<int> members) {
    for (int v : members) insert(v);
  }

  static VarSet of(const std::vector<int>& members) {
    VarSet s;
    for (int v : members) s.insert(v);
    return s;
  }
  static constexpr VarSet single(int v) { return VarSet(std::uint32_t{1} << v); }
  static constexpr VarSet all(int n) {
    return VarSet(n >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1);
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(int v) const { return (mask_ >> v) & 1u; }
  constexpr bool subset_of(VarSet other) const { return (mask_ & ~other.mask_) == 0; }
  constexpr bool disjoint(VarSet other) const { return (mask_ & other.mask_) == 0; }

  void insert(int v) {
    if (v < 0 || v >= kMaxVars) throw invalid_input("variable index out of range");
    mask_ |= std::uint32_t{1} << v;
  }
  void erase(int v) { mask_ &= ~(std::uint32_t{1} << v); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }
  int first() const { return mask_ ? std::countr_zero(mask_) : -1; }

  friend constexpr VarSet operator|(VarSet a, VarSet b) { return VarSet(a.mask_ | b.mask_); }
  friend constexpr VarSet operator&(VarSet a, VarSet b) { return VarSet(a.mask_ & b.mask_); }
  friend constexpr VarSet operator-(VarSet a, VarSet b) { return VarSet(a.mask_ & ~b.mask_); }
  friend constexpr bool operator==(VarSet a, VarSet b) = default;
  friend constexpr auto operator<=>(VarSet a, VarSet b) { return a.mask_ <=> b.mask_; }

 private:
  std::uint32_t mask_ = 0;
};

// All subsets of `universe` in increasing mask order.
inline std::vector<VarSet> subsets_of(VarSet universe) {
  std::vector<VarSet> out;
  std::uint32_t u = universe.mask();
  std::uint32_t s = 0;
  do {
    out.emplace_back(s);
    s = (s - u) & u;
  } while (s != 0);
  return out;
}

// Subsets ordered by (size, mask).
inline std::vector<VarSet> subsets_by_size(VarSet universe) {
  auto out = subsets_of(universe);
  std::stable_sort(out.begin(), out.end(),
                   [](VarSet a, VarSet b) { return a.size() < b.size(); });
  return out;
}

}  // namespace totpos

#endif  // TOTPOS_VARSET_HPP_
