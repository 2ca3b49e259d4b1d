#include <gtest/gtest.h>

#include <cmath>

#include "support/cg_generators.hpp"
#include "support/generators.hpp"
#include "support/tables.hpp"
#include "totpos/cg.hpp"

using namespace totpos;
using namespace totpos::testing;

namespace {

std::vector<int> groups(const CgMtp2Verdict& v) {
  std::vector<int> out;
  for (int g = 1; g <= 3; ++g)
    if (v.fails(g)) out.push_back(g);
  return out;
}

MatrixXd mat2(double a, double b, double c) {
  MatrixXd m(2, 2);
  m << a, b, b, c;
  return m;
}

Lattice binary(int n) {
  std::vector<Axis> axes;
  for (int a = 0; a < n; ++a) axes.push_back(Axis::ranked("i" + std::to_string(a + 1), 2));
  return Lattice(axes);
}

}  // namespace

TEST(CgModelTest, ValidatesCharacteristics) {
  Lattice lat = binary(1);
  VectorXd h = VectorXd::Zero(2);
  EXPECT_NO_THROW(CGModel(lat, continuous_names(2), {0, 0}, {h, h}, {MatrixXd::Identity(2, 2)}));
  EXPECT_THROW(CGModel(lat, continuous_names(2), {0}, {h, h}, {MatrixXd::Identity(2, 2)}), invalid_input);
  EXPECT_THROW(CGModel(lat, continuous_names(2), {0, 0}, {h, VectorXd::Zero(1)}, {MatrixXd::Identity(2, 2)}),
               invalid_input);
  EXPECT_THROW(CGModel(lat, continuous_names(2), {0, 0}, {h, h}, {mat2(1, 2, 1)}), precondition_error);
  MatrixXd asym(2, 2);
  asym << 1, 0.1, 0, 1;
  EXPECT_THROW(CGModel(lat, continuous_names(2), {0, 0}, {h, h}, {asym}), invalid_input);
  EXPECT_THROW(CGModel(lat, continuous_names(2), {0, NAN}, {h, h}, {MatrixXd::Identity(2, 2)}), invalid_input);
}

TEST(CgMoments, PureGaussian) {
  MatrixXd k = mat2(2, -1, 2);
  VectorXd h(2);
  h << 1, 3;
  CGModel m(Lattice{}, continuous_names(2), {0.7}, {h}, {k});
  CGMoments mo = moment_from_canonical(m);
  ASSERT_EQ(mo.p.size(), 1u);
  EXPECT_DOUBLE_EQ(mo.p[0], 1.0);
  MatrixXd sigma = k.inverse();
  EXPECT_LT((mo.sigma[0] - sigma).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((mo.xi[0] - sigma * h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CgMoments, LinearMeanShift) {
  Lattice lat = binary(1);
  CGModel m(lat, continuous_names(2), {0, 0}, {VectorXd::Zero(2), VectorXd::Ones(2)}, {MatrixXd::Identity(2, 2)});
  CGMoments mo = moment_from_canonical(m);
  EXPECT_LT(mo.xi[0].cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((mo.xi[1] - VectorXd::Ones(2)).cwiseAbs().maxCoeff(), 1e-15);
  // p(1)/p(0) = exp(h'h/2) = e
  EXPECT_NEAR(mo.p[1] / mo.p[0], std::exp(1.0), 1e-12);
}

TEST(CgMoments, ProbabilitiesAgainstNumericalIntegration) {
  // one continuous coordinate, trapezoid rule on a wide grid
  Lattice lat = binary(1);
  VectorXd h0(1), h1(1);
  h0 << 0.3;
  h1 << -1.1;
  std::vector<MatrixXd> k{MatrixXd::Constant(1, 1, 0.8), MatrixXd::Constant(1, 1, 2.5)};
  CGModel m(lat, continuous_names(1), {0.2, -0.4}, {h0, h1}, k);
  std::vector<double> mass(2, 0.0);
  const double step = 1e-3;
  for (int i = 0; i < 2; ++i)
    for (double y = -20; y <= 20; y += step) {
      VectorXd v(1);
      v << y;
      mass[static_cast<std::size_t>(i)] += std::exp(m.log_density(static_cast<std::size_t>(i), v)) * step;
    }
  CGMoments mo = moment_from_canonical(m);
  EXPECT_NEAR(mo.p[0], mass[0] / (mass[0] + mass[1]), 1e-9);
  EXPECT_NEAR(mo.log_mass, std::log(mass[0] + mass[1]), 1e-9);
}

TEST(CgMoments, RoundTripIsIdentity) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = seeded(seed + 50000);
    CGModel m = random_cg(rng, {3, 3, 3});
    CGModel back = canonical_from_moment(moment_from_canonical(m));
    for (std::size_t i = 0; i < m.cells(); ++i) {
      ASSERT_NEAR(back.g()[i], m.g()[i], 1e-10) << "seed " << seed;
      ASSERT_LT((back.h()[i] - m.h()[i]).cwiseAbs().maxCoeff(), 1e-10);
      ASSERT_LT((back.k()[i] - m.k()[i]).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(CgMoments, RejectsBadMoments) {
  Lattice lat = binary(1);
  CGMoments mo{lat, continuous_names(1), {0.5, 0.5}, {VectorXd::Zero(1), VectorXd::Zero(1)},
               {MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1)}};
  EXPECT_NO_THROW(canonical_from_moment(mo));
  mo.p[0] = 0;
  EXPECT_THROW(canonical_from_moment(mo), invalid_input);
  mo.p[0] = 0.5;
  mo.sigma[1] = MatrixXd::Constant(1, 1, -1);
  EXPECT_THROW(canonical_from_moment(mo), precondition_error);
}

TEST(CgAdditive, Examples) {
  Lattice lat = binary(2);
  // alpha(i1) + beta(i2)
  EXPECT_TRUE(is_additive(LatticeFunction<double>(lat, {0.5, 2.5, 1.5, 3.5})).additive);
  AdditivityVerdict v = is_additive(LatticeFunction<double>(lat, {0, 0, 0, 1}));
  EXPECT_FALSE(v.additive);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->interaction, (VarSet{0, 1}));
  EXPECT_DOUBLE_EQ(v.witness->value, 1.0);
  EXPECT_EQ(v.witness->cell, (Cell{1, 1}));
  EXPECT_TRUE(is_additive(LatticeFunction<double>(Lattice{}, {4.0})).additive);
}

TEST(CgAdditive, InteractionRouteAgreesWithModularity) {
  int additive = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    Rng rng = seeded(seed + 51000);
    Lattice lat = random_lattice(rng, 1, 4, 3);
    std::vector<double> f = quarter_grid_function(rng, lat, uniform_int(rng, 0, 1) ? 0 : -2, uniform_int(rng, 0, 1) ? 0 : 2);
    // is_additive throws internal_inconsistency if the routes disagree
    AdditivityVerdict v;
    ASSERT_NO_THROW(v = is_additive(LatticeFunction<double>(lat, f))) << "seed " << seed;
    ASSERT_EQ(v.additive, is_modular(LatticeFunction<double>(lat, f))) << "seed " << seed;
    additive += v.additive;
  }
  EXPECT_GT(additive, 100);
  EXPECT_LT(additive, 500);
}

TEST(CgMtp2, PureGaussianReducesToMMatrix) {
  CGModel ok(Lattice{}, continuous_names(2), {0}, {VectorXd::Zero(2)}, {mat2(1, -0.5, 1)});
  EXPECT_TRUE(check_cg_mtp2(ok).holds);
  CGModel bad(Lattice{}, continuous_names(2), {0}, {VectorXd::Zero(2)}, {mat2(1, 0.5, 1)});
  CgMtp2Verdict v = check_cg_mtp2(bad);
  ASSERT_FALSE(v.holds);
  ASSERT_EQ(v.failures.size(), 1u);
  EXPECT_EQ(v.failures[0].condition, CgCondition::k_m_matrix);
  EXPECT_EQ(v.failures[0].row, 0);
  EXPECT_EQ(v.failures[0].col, 1);
  EXPECT_DOUBLE_EQ(v.failures[0].value, 0.5);
  EXPECT_TRUE(grid_supermodular(ok));
  EXPECT_FALSE(grid_supermodular(bad));
}

TEST(CgMtp2, LinearMeanWithSharedMMatrixHolds) {
  Lattice lat = binary(2);
  VectorXd c(2);
  c << 0.5, 1.0;
  std::vector<VectorXd> h;
  for (std::size_t i = 0; i < lat.size(); ++i) h.push_back(static_cast<double>(lat.coordinate(i, 0) + lat.coordinate(i, 1)) * c);
  CGModel m(lat, continuous_names(2), {0, 0.5, -0.25, 1.0}, h, {mat2(1.5, -0.4, 1.0)});
  EXPECT_TRUE(check_cg_mtp2(m).holds);
  EXPECT_TRUE(check_cg_mtp2_loglinear(m).holds);
  EXPECT_TRUE(grid_supermodular(m));
}

TEST(CgMtp2, NonConstantKIsCertified) {
  Lattice lat = binary(1);
  std::vector<MatrixXd> k{mat2(1, -0.5, 1), mat2(1, -0.25, 1)};
  CGModel m(lat, continuous_names(2), {0, 0}, {VectorXd::Zero(2), VectorXd::Zero(2)}, k);
  CgMtp2Verdict v = check_cg_mtp2(m);
  ASSERT_FALSE(v.holds);
  ASSERT_EQ(v.failures.size(), 1u);
  const CgFailure& f = v.failures[0];
  EXPECT_EQ(f.condition, CgCondition::k_constant);
  EXPECT_EQ(condition_group(f.condition), 3);
  EXPECT_EQ(*f.x, (Cell{0}));
  EXPECT_EQ(*f.y, (Cell{1}));
  EXPECT_EQ(f.row, 0);
  EXPECT_EQ(f.col, 1);
  EXPECT_DOUBLE_EQ(f.value, 0.25);
}

TEST(CgMtp2, EachConditionCertified) {
  Lattice lat = binary(2);
  std::vector<VectorXd> zero(4, VectorXd::Zero(1));
  MatrixXd one = MatrixXd::Identity(1, 1);

  CgMtp2Verdict g_bad = check_cg_mtp2(CGModel(lat, continuous_names(1), {0, 0, 0, -1}, zero, {one}));
  ASSERT_EQ(g_bad.failures.size(), 1u);
  EXPECT_EQ(g_bad.failures[0].condition, CgCondition::g_supermodular);
  EXPECT_DOUBLE_EQ(g_bad.failures[0].value, 1.0);

  std::vector<VectorXd> inter(4, VectorXd::Zero(1));
  inter[3](0) = 1;
  CgMtp2Verdict h_bad = check_cg_mtp2(CGModel(lat, continuous_names(1), {0, 0, 0, 0}, inter, {one}));
  ASSERT_EQ(h_bad.failures.size(), 1u);
  EXPECT_EQ(h_bad.failures[0].condition, CgCondition::h_additive);
  EXPECT_EQ(h_bad.failures[0].row, 0);

  std::vector<VectorXd> dec(4, VectorXd::Zero(1));
  dec[2](0) = dec[3](0) = -1;  // decreasing along axis 0
  CgMtp2Verdict m_bad = check_cg_mtp2(CGModel(lat, continuous_names(1), {0, 0, 0, 0}, dec, {one}));
  ASSERT_EQ(m_bad.failures.size(), 1u);
  EXPECT_EQ(m_bad.failures[0].condition, CgCondition::h_monotone);
  EXPECT_EQ(m_bad.failures[0].axis, 0);
  EXPECT_EQ(*m_bad.failures[0].x, (Cell{0, 0}));
  EXPECT_DOUBLE_EQ(m_bad.failures[0].value, -1.0);
}

TEST(CgMtp2, AdditiveGHasZeroGammaAndPasses) {
  Lattice lat = lattice_of({3, 2, 2});
  std::vector<double> g(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) g[i] = 0.5 * lat.coordinate(i, 0) - 2.0 * lat.coordinate(i, 1) + lat.coordinate(i, 2);
  Expansion<double> e = expand_function(LatticeFunction<double>(lat, g));
  for (int u = 0; u < 3; ++u)
    for (int w = u + 1; w < 3; ++w)
      for (double x : gamma(e, u, w).values) EXPECT_NEAR(x, 0.0, 1e-12);
  CGModel m(lat, continuous_names(1), g, std::vector<VectorXd>(lat.size(), VectorXd::Zero(1)), {MatrixXd::Identity(1, 1)});
  EXPECT_TRUE(check_cg_mtp2_loglinear(m).holds);
}

TEST(CgMtp2, BinaryConditionIsSumOfInteractions) {
  // binary discrete part: g supermodular iff for every A and u < w in A the
  // sum of lambda_D over {u,w} <= D <= A is nonnegative
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng = seeded(seed + 52000);
    Lattice lat = binary(uniform_int(rng, 2, 4));
    std::vector<double> g(lat.size());
    for (auto& x : g) x = 0.25 * uniform_int(rng, -6, 6);
    Expansion<double> e = expand_function(LatticeFunction<double>(lat, g));
    bool sums_ok = true;
    for (VarSet a : subsets_of(lat.all())) {
      std::size_t top = lat.index_of(Cell([&] {
        std::vector<int> x(static_cast<std::size_t>(lat.rank()), 0);
        for (int v : a.members()) x[static_cast<std::size_t>(v)] = 1;
        return x;
      }()));
      for (int u : a.members())
        for (int w : a.members()) {
          if (w <= u) continue;
          VarSet uw{u, w};
          double s = 0;
          for (VarSet rest : subsets_of(a - uw)) s += e.theta(rest | uw, top);
          sums_ok = sums_ok && s >= -1e-12;
        }
    }
    CGModel m(lat, continuous_names(1), g, std::vector<VectorXd>(lat.size(), VectorXd::Zero(1)), {MatrixXd::Identity(1, 1)});
    ASSERT_EQ(check_cg_mtp2(m).holds, sums_ok) << "seed " << seed;
    ASSERT_EQ(check_cg_mtp2_loglinear(m).holds, sums_ok) << "seed " << seed;
  }
}

TEST(CgMtp2, RoutesAgreeOnRandomModels) {
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    Rng rng = seeded(seed + 53000);
    CGModel m = random_cg(rng, {3, 3, 3});
    CgMtp2Verdict a = check_cg_mtp2(m);
    CgMtp2Verdict b = check_cg_mtp2_loglinear(m);
    ASSERT_EQ(a.holds, b.holds) << "seed " << seed;
    ASSERT_EQ(groups(a), groups(b)) << "seed " << seed;
    ASSERT_EQ(a.holds, a.failures.empty());
    holds += a.holds;
  }
  EXPECT_GT(holds, 60);
  EXPECT_LT(holds, 540);
}

TEST(CgMtp2, AgreesWithDensityGridScan) {
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng = seeded(seed + 54000);
    CGModel m = random_cg(rng);
    bool algebraic = check_cg_mtp2(m).holds;
    ASSERT_EQ(algebraic, grid_supermodular(m)) << "seed " << seed;
    holds += algebraic;
  }
  EXPECT_GT(holds, 50);
  EXPECT_LT(holds, 450);
}

TEST(CgMoments, CanonicalMtp2ImpliesMomentConditions) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 1500 && checked < 300; ++seed) {
    Rng rng = seeded(seed + 55000);
    CGModel m = random_cg(rng, {3, 3, 3});
    if (!check_cg_mtp2(m).holds) continue;
    ++checked;
    CgMomentReport r = check_cg_moment_necessary(m);
    ASSERT_TRUE(r.all()) << "seed " << seed;
  }
  EXPECT_EQ(checked, 300);
}

TEST(CgMoments, NegativeCovarianceFailsThirdCondition) {
  // positive off-diagonal concentration gives a negative covariance
  CGModel m(binary(1), continuous_names(2), {0, 0}, {VectorXd::Zero(2), VectorXd::Zero(2)}, {mat2(1, 0.5, 1)});
  CgMomentReport r = check_cg_moment_necessary(m);
  EXPECT_FALSE(r.sigma_nonnegative);
  EXPECT_TRUE(r.sigma_constant);
  EXPECT_TRUE(r.xi_additive);
  EXPECT_FALSE(check_cg_mtp2(m).holds);
}

TEST(CgMoments, MomentConditionsAreNotSufficient) {
  // search over binary discrete part, two continuous coordinates, shared K
  // from a small M-matrix family and mean steps on a coarse grid
  const std::vector<double> offdiag{-0.75, -0.5, -0.25, 0.0};
  const std::vector<double> steps{-1, -0.5, 0, 0.5, 1};
  int passing_moments_not_mtp2 = 0;
  int decreasing_mean_m_matrix = 0;
  for (double b : offdiag)
    for (double s1 : steps)
      for (double s2 : steps) {
        MatrixXd k = mat2(1, b, 1);
        VectorXd xi1(2);
        xi1 << s1, s2;
        CGMoments mo{binary(1), continuous_names(2), {0.5, 0.5}, {VectorXd::Zero(2), xi1}, {k.inverse(), k.inverse()}};
        CGModel m = canonical_from_moment(mo);
        CgMomentReport r = check_cg_moment_necessary(m);
        CgMtp2Verdict v = check_cg_mtp2(m);
        ASSERT_FALSE(v.fails(3));
        if (r.all() && !v.holds) {
          ++passing_moments_not_mtp2;
          EXPECT_TRUE(v.fails(2));
          EXPECT_FALSE(grid_supermodular(m));
        }
        if (!r.xi_monotone) {
          ++decreasing_mean_m_matrix;
          EXPECT_FALSE(v.holds);
        }
      }
  EXPECT_GT(passing_moments_not_mtp2, 0);
  EXPECT_GT(decreasing_mean_m_matrix, 0);

  // the smallest instance: K = [[1,-1/2],[-1/2,1]], mean step (1, 0)
  MatrixXd k = mat2(1, -0.5, 1);
  VectorXd xi1(2);
  xi1 << 1, 0;
  CGModel m = canonical_from_moment(
      {binary(1), continuous_names(2), {0.5, 0.5}, {VectorXd::Zero(2), xi1}, {k.inverse(), k.inverse()}});
  EXPECT_TRUE(check_cg_moment_necessary(m).all());
  CgMtp2Verdict v = check_cg_mtp2(m);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.failures[0].condition, CgCondition::h_monotone);
  EXPECT_EQ(v.failures[0].row, 1);
  EXPECT_NEAR(v.failures[0].value, -0.5, 1e-12);
}
