#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/tables.hpp"
#include "totpos/mtp2.hpp"

using namespace totpos;
using namespace totpos::testing;

namespace {

JointTable example_72() {
  return normalized({2, 2, 2, 2}, {1, 2, 2, 20, 2, 20, 20, 400, 2, 4, 20, 200, 20, 200, 400, 8000});
}

JointTable four_cycle() {
  long a[2][2] = {{6, 5}, {4, 3}}, b[2][2] = {{2, 1}, {1, 2}};
  std::vector<long> w;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) w.push_back(a[i][j] * b[j][k] * b[k][l] * b[i][l]);
  return normalized({2, 2, 2, 2}, w);
}

// First violating (i, j), i < j, straight from the definition.
std::optional<std::pair<std::size_t, std::size_t>> first_violation(const JointTable& t) {
  const Lattice& lat = t.lattice();
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      auto [lo, hi] = meet_join(lat.cell_of(i), lat.cell_of(j));
      if (t[i] * t[j] > t.at(lo) * t.at(hi)) return std::pair{i, j};
    }
  return std::nullopt;
}

}  // namespace

TEST(FullCheck, IntersectionExampleIsMtp2) {
  auto v = check_mtp2_full(normalized({2, 2, 2}, {1, 0, 0, 0, 0, 0, 0, 1}));
  EXPECT_TRUE(v.holds);
  EXPECT_FALSE(v.certificate.has_value());
  EXPECT_EQ(v.method, Mtp2Method::full);
}

TEST(FullCheck, MarkovCombinationExampleFails) {
  JointTable t = example_72();
  auto v = check_mtp2_full(t);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.certificate.has_value());
  EXPECT_EQ(v.certificate->x, (Cell{1, 0, 1, 1}));
  EXPECT_EQ(v.certificate->y, (Cell{1, 1, 0, 1}));
  EXPECT_EQ(v.certificate->rhs - v.certificate->lhs, ratio(-8000, 9313 * 9313));
  EXPECT_GT(v.certificate->lhs, v.certificate->rhs);
  EXPECT_EQ(mtp2_gap(t, Cell{1, 1, 0, 1}, Cell{1, 0, 1, 1}), ratio(-8000, 9313 * 9313));
}

TEST(FullCheck, FourCycleFails) {
  JointTable t = four_cycle();
  EXPECT_EQ(t[0], ratio(6 * 2 * 2 * 2, 243));
  auto v = check_mtp2_full(t);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.certificate->x, (Cell{0, 1, 0, 0}));
  EXPECT_EQ(v.certificate->y, (Cell{1, 0, 0, 0}));
  EXPECT_EQ(v.certificate->rhs - v.certificate->lhs, ratio(-32, 243 * 243));
  // The pair displayed with the example has the same gap.
  EXPECT_EQ(mtp2_gap(t, Cell{0, 1, 1, 1}, Cell{1, 0, 1, 1}), ratio(-32, 243 * 243));
}

TEST(FullCheck, CertificateIsLexicographicallyFirst) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto rng = seeded(seed);
    Lattice lat = random_lattice(rng, 2, 3, 3);
    JointTable t = random_mixed(rng, lat, false);
    auto v = check_mtp2_full(t);
    auto oracle = first_violation(t);
    ASSERT_EQ(v.holds, !oracle.has_value()) << "seed " << seed;
    if (oracle) {
      ++failures;
      EXPECT_EQ(lat.index_of(v.certificate->x), oracle->first);
      EXPECT_EQ(lat.index_of(v.certificate->y), oracle->second);
      EXPECT_GT(v.certificate->lhs, v.certificate->rhs);
    }
  }
  EXPECT_GT(failures, 50);
}

TEST(FloatCheck, ToleranceAcceptsRoundingOnly) {
  FloatTable t(lattice_of({2, 2}), {0.25, 0.25, 0.25, 0.25 * (1 - 1e-14)});
  EXPECT_TRUE(check_mtp2_full(t).holds);
  FloatTable u(lattice_of({2, 2}), {0.25, 0.25, 0.25, 0.2});
  EXPECT_FALSE(check_mtp2_full(u).holds);
  Compare<double> loose{1e-12, 0.02};
  EXPECT_TRUE(check_mtp2_full(u, loose).holds);
}

TEST(PairwiseCheck, EphIsMtp2) {
  // rows x1 = 0, 1; columns (x2,x3) = 00, 10, 01, 11 as printed
  JointTable eph = normalized({2, 2, 2}, {3299, 1012, 107, 58, 78, 65, 11, 19});
  auto v = check_mtp2_pairwise(eph);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.method, Mtp2Method::pairwise);
  EXPECT_TRUE(check_mtp2_full(eph).holds);
  // Binary: C(3,2) * 2^(3-2) = 6 inequalities.
  EXPECT_EQ(two_coordinate_pairs(eph.lattice()).size(), 6u);
  EXPECT_EQ(two_coordinate_pairs(binary_lattice(4)).size(), 6u * 4u);
}

TEST(PairwiseCheck, ProductTableHolds) {
  JointTable t = normalized({3, 2}, {2, 6, 1, 3, 4, 12});
  EXPECT_TRUE(check_mtp2_pairwise(t).holds);
}

TEST(PairwiseCheck, RejectsNonIntervalSupport) {
  JointTable t = normalized({2, 2, 2}, {1, 0, 0, 0, 0, 0, 0, 1});
  EXPECT_THROW(check_mtp2_pairwise(t), precondition_error);
  EXPECT_NO_THROW(check_pairwise_conditions(t));
}

TEST(PairwiseCheck, AgreesWithFullOnRandom333) {
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto rng = seeded(seed);
    JointTable t = random_mixed(rng, lattice_of({3, 3, 3}), true);
    bool full = check_mtp2_full(t).holds;
    EXPECT_EQ(check_mtp2_pairwise(t).holds, full) << "seed " << seed;
    holds += full;
  }
  EXPECT_GT(holds, 200);
  EXPECT_LT(holds, 800);
}

TEST(PairwiseCheck, AgreesWithFullOnPositiveTables) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto rng = seeded(seed + 5000);
    Lattice lat = random_lattice(rng, 2, 4, 3);
    JointTable t = random_mixed(rng, lat, true);
    auto p = check_mtp2_pairwise(t);
    auto f = check_mtp2_full(t);
    EXPECT_EQ(p.holds, f.holds) << "seed " << seed;
    if (!p.holds) {
      EXPECT_GT(p.certificate->lhs, p.certificate->rhs);
    }
  }
}

TEST(PairwiseCheck, ConnectedSupportInstanceTwoInequalities) {
  // Support misses (1,0,0) and (1,0,1); then MTP2 iff
  // p000 p011 >= p010 p001 and p010 p111 >= p110 p011.
  int agree = 0, holds = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto rng = seeded(seed);
    std::vector<long> w(8);
    for (auto& x : w) x = uniform_int(rng, 1, 6);
    w[4] = w[5] = 0;
    JointTable t = weights({2, 2, 2}, w);
    auto p = [&](int a, int b, int c) { return t.at(Cell{a, b, c}); };
    bool two = p(0, 0, 0) * p(0, 1, 1) >= p(0, 1, 0) * p(0, 0, 1) && p(0, 1, 0) * p(1, 1, 1) >= p(1, 1, 0) * p(0, 1, 1);
    bool full = check_mtp2_full(t).holds;
    EXPECT_EQ(two, full) << "seed " << seed;
    EXPECT_EQ(check_pairwise_conditions(t).holds, full) << "seed " << seed;
    agree += two == full;
    holds += full;
  }
  EXPECT_EQ(agree, 500);
  EXPECT_GT(holds, 20);
}

TEST(MonotoneTransform, NonDecreasingRelabelingPreservesMtp2) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto rng = seeded(seed);
    Lattice lat = random_lattice(rng, 2, 3, 4);
    JointTable t = random_mtp2(rng, lat, {true, 4});
    // map each axis through a random non-decreasing function into 0..m-1
    std::vector<std::vector<int>> maps;
    std::vector<int> sizes;
    for (int v = 0; v < lat.rank(); ++v) {
      int m = uniform_int(rng, 1, 4);
      std::vector<int> f;
      int cur = uniform_int(rng, 0, m - 1);
      for (int r = 0; r < lat.levels(v); ++r) {
        f.push_back(cur);
        cur = std::min(m - 1, cur + uniform_int(rng, 0, 2));
      }
      maps.push_back(f);
      sizes.push_back(m);
    }
    Lattice image = lattice_of(sizes);
    std::vector<Rational> out(image.size(), Rational(0));
    for (std::size_t i = 0; i < t.size(); ++i) {
      Cell c = lat.cell_of(i);
      std::vector<int> r;
      for (int v = 0; v < lat.rank(); ++v) r.push_back(maps[static_cast<std::size_t>(v)][static_cast<std::size_t>(c[static_cast<std::size_t>(v)])]);
      out[image.index_of(Cell(r))] += t[i];
    }
    EXPECT_TRUE(check_mtp2_full(JointTable(image, out)).holds) << "seed " << seed;
  }
}

TEST(Association, Mtp2ImpliesNonnegativeCovariances) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto rng = seeded(seed);
    Lattice lat = random_lattice(rng, 2, 4, 3);
    JointTable t = random_mtp2(rng, lat, {true, 4});
    for (int u = 0; u < lat.rank(); ++u)
      for (int w = u + 1; w < lat.rank(); ++w) {
        Rational eu(0), ew(0), euw(0);
        for (std::size_t i = 0; i < t.size(); ++i) {
          int a = lat.coordinate(i, u), b = lat.coordinate(i, w);
          eu += t[i] * a;
          ew += t[i] * b;
          euw += t[i] * a * b;
        }
        EXPECT_GE(euw - eu * ew, 0) << "seed " << seed;
      }
  }
}

TEST(Tp2Matrix, Examples) {
  EXPECT_TRUE(check_tp2_matrix<Rational>({{2, 1}, {1, 2}}).holds);
  auto v = check_tp2_matrix<Rational>({{6, 5}, {4, 3}});
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.certificate->value, -2);
  EXPECT_EQ(v.certificate->i, 0);
  EXPECT_EQ(v.certificate->l, 1);
  EXPECT_TRUE(check_tp2_matrix<Rational>({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}).holds);
  EXPECT_THROW(check_tp2_matrix<Rational>({{1, -1}, {0, 1}}), invalid_input);
  EXPECT_THROW(check_tp2_matrix<Rational>({{1, 1}, {0}}), invalid_input);
}

TEST(Tp2Matrix, AdjacentShortcutMatchesAllMinors) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto rng = seeded(seed);
    int r = uniform_int(rng, 2, 4), c = uniform_int(rng, 2, 4);
    bool zeros = uniform_int(rng, 0, 1);
    Matrix<Rational> m(static_cast<std::size_t>(r), std::vector<Rational>(static_cast<std::size_t>(c)));
    // log-supermodular base plus noise so both outcomes occur
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        Rational base(1);
        for (int k = 0; k < i * j; ++k) base *= 2;
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = base * uniform_int(rng, zeros ? 0 : 1, 3);
      }
    bool all = true;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        for (int k = 0; k < c; ++k)
          for (int l = k + 1; l < c; ++l) {
            auto& M = m;
            auto at = [&](int a, int b) { return M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
            if (at(i, k) * at(j, l) < at(i, l) * at(j, k)) all = false;
          }
    EXPECT_EQ(check_tp2_matrix(m).holds, all) << "seed " << seed;
  }
}

TEST(Supermodular, Examples) {
  Lattice lat = lattice_of({3, 3});
  std::vector<Rational> add, prod;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    add.emplace_back(lat.coordinate(i, 0) + lat.coordinate(i, 1));
    prod.emplace_back(lat.coordinate(i, 0) * lat.coordinate(i, 1));
  }
  EXPECT_TRUE(is_modular(LatticeFunction<Rational>(lat, add)));
  EXPECT_TRUE(is_supermodular(LatticeFunction<Rational>(lat, add)).holds);

  Lattice bin = lattice_of({2, 2});
  LatticeFunction<Rational> h(bin, {0, 0, 0, 1});
  EXPECT_TRUE(is_supermodular(h).holds);
  LatticeFunction<Rational> neg(bin, {0, 0, 0, -1});
  auto v = is_supermodular(neg);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.certificate->x, (Cell{0, 1}));
  EXPECT_EQ(v.certificate->y, (Cell{1, 0}));
  EXPECT_FALSE(is_modular(h));
}

TEST(Supermodular, LogOfMtp2TableMatchesFullCheck) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto rng = seeded(seed);
    Lattice lat = random_lattice(rng, 2, 3, 3);
    JointTable t = random_mixed(rng, lat, true);
    std::vector<double> h;
    for (const auto& p : t.values()) h.push_back(std::log(p.get_d()));
    EXPECT_EQ(is_supermodular(LatticeFunction<double>(lat, h), std::nullopt, Compare<double>{1e-12, 1e-12}).holds,
              check_mtp2_full(t).holds)
        << "seed " << seed;
  }
}

TEST(Supermodular, DomainMustBeLatticeClosed) {
  Lattice lat = lattice_of({2, 2});
  LatticeFunction<Rational> h(lat, {0, 0, 0, 1});
  EXPECT_THROW(is_supermodular(h, std::vector<std::size_t>{1, 2}), invalid_input);
  EXPECT_THROW(is_supermodular(h, std::vector<std::size_t>{9}), invalid_input);
  EXPECT_TRUE(is_supermodular(h, std::vector<std::size_t>{0, 1, 2, 3}).holds);
  EXPECT_TRUE(is_supermodular(h, std::vector<std::size_t>{1, 3}).holds);
}
