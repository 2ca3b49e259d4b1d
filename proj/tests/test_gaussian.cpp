#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "totpos/data.hpp"
#include "totpos/gaussian.hpp"

using namespace totpos;
using namespace totpos::testing;

namespace {

std::vector<std::string> names(int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Random M-matrix: random non-positive off-diagonal pattern made strictly
// diagonally dominant.
MatrixXd random_m_matrix(Rng& rng, int n, int density) {
  MatrixXd k = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform_int(rng, 0, 9) < density) k(i, j) = k(j, i) = -uniform(rng, 0.1, 1.0);
  for (int i = 0; i < n; ++i) k(i, i) = -k.row(i).sum() + uniform(rng, 0.1, 1.0);
  return k;
}

}  // namespace

TEST(MMatrix, Examples) {
  EXPECT_TRUE(is_m_matrix(MatrixXd::Identity(3, 3)).holds);
  MatrixXd k(2, 2);
  k << 1, -0.5, -0.5, 1;
  EXPECT_TRUE(is_m_matrix(k).holds);

  GaussianModel mm = mathmarks();
  auto v = is_m_matrix(mm.kappa());
  EXPECT_FALSE(v.holds);
  EXPECT_TRUE(v.positive_definite);
  ASSERT_EQ(v.off_diagonal.size(), 1u);
  EXPECT_EQ(mm.names()[static_cast<std::size_t>(v.off_diagonal[0].u)], "Mechanics");
  EXPECT_EQ(mm.names()[static_cast<std::size_t>(v.off_diagonal[0].v)], "Analysis");
  EXPECT_NEAR(v.off_diagonal[0].value * 1000, 0.01, 1e-12);
  EXPECT_TRUE(v.nonpositive_diagonal.empty());
}

TEST(MMatrix, NonPositiveDefiniteReportedSeparately) {
  MatrixXd k(2, 2);
  k << 1, -2, -2, 1;
  auto v = is_m_matrix(k);
  EXPECT_FALSE(v.holds);
  EXPECT_FALSE(v.positive_definite);
  EXPECT_TRUE(v.off_diagonal.empty());
  MatrixXd asym(2, 2);
  asym << 1, 0.1, 0, 1;
  EXPECT_THROW(is_m_matrix(asym), invalid_input);
  MatrixXd rect(2, 3);
  EXPECT_THROW(is_m_matrix(rect), invalid_input);
}

TEST(GaussianModel, Validates) {
  MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(GaussianModel::from_sigma(names(2), bad), precondition_error);
  EXPECT_THROW(GaussianModel::from_sigma(names(3), MatrixXd::Identity(2, 2)), invalid_input);
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  EXPECT_THROW(GaussianModel::from_kappa(names(2), asym), invalid_input);
  auto m = GaussianModel::from_sigma(names(2), MatrixXd::Identity(2, 2) * 2);
  EXPECT_NEAR(m.kappa()(0, 0), 0.5, 1e-15);
  EXPECT_EQ(m.mean().size(), 2);
}

TEST(GaussianMtp2, PathPrecision) {
  MatrixXd k = MatrixXd::Identity(3, 3);
  k(0, 1) = k(1, 0) = k(1, 2) = k(2, 1) = -0.2;
  MatrixXd sigma = k.inverse();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_GT(sigma(i, j), 0);
  auto v = check_gaussian_mtp2(GaussianModel::from_sigma(names(3), sigma));
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(v.negative_covariances.empty());
}

TEST(GaussianMtp2, NegativeCovarianceFails) {
  MatrixXd s(2, 2);
  s << 1, -0.3, -0.3, 1;
  auto v = check_gaussian_mtp2(GaussianModel::from_sigma(names(2), s));
  EXPECT_FALSE(v.holds);
  ASSERT_EQ(v.negative_covariances.size(), 1u);
  EXPECT_EQ(v.off_diagonal.size(), 1u);
}

TEST(GaussianMtp2, Equicorrelation) {
  const double rho = 0.5;
  MatrixXd s = MatrixXd::Constant(3, 3, rho);
  s.diagonal().setOnes();
  auto m = GaussianModel::from_sigma(names(3), s);
  EXPECT_TRUE(check_gaussian_mtp2(m).holds);
  EXPECT_NEAR(m.kappa()(0, 1), -rho / ((1 - rho) * (1 + 2 * rho)), 1e-12);
  EXPECT_TRUE(gaussian_mtp2_holds(s));
}

TEST(GaussianMtp2, ImpliesNonnegativeCovariances) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto rng = seeded(seed);
    int n = uniform_int(rng, 2, 5);
    auto m = GaussianModel::from_kappa(names(n), random_m_matrix(rng, n, 6));
    auto v = check_gaussian_mtp2(m);
    ASSERT_TRUE(v.holds) << "seed " << seed;
    EXPECT_GE(m.sigma().minCoeff(), -default_tolerance(m.sigma()));
    EXPECT_TRUE(gaussian_mtp2_holds(m.sigma()));
  }
}

TEST(PartialCorrelations, MathMarksMatchPrintedValues) {
  MatrixXd r = partial_correlations(mathmarks().kappa());
  MatrixXd printed = mathmarks_printed_partials();
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(r(i, i), 1.0);
    for (int j = 0; j < i; ++j) EXPECT_NEAR(r(i, j), printed(i, j), 0.005) << i << "," << j;
  }
  EXPECT_NEAR(r(1, 0), 0.33, 0.005);
  // the single sign violation is the (Mechanics, Analysis) entry
  EXPECT_LT(r(3, 0), 0);
}

TEST(PartialCorrelations, Examples) {
  MatrixXd d = MatrixXd::Identity(3, 3) * 2;
  MatrixXd r = partial_correlations(d);
  EXPECT_TRUE(r.isIdentity());
  MatrixXd k(2, 2);
  k << 1, -0.5, -0.5, 1;
  EXPECT_NEAR(partial_correlations(k)(0, 1), 0.5, 1e-15);
  MatrixXd z = MatrixXd::Zero(2, 2);
  EXPECT_THROW(partial_correlations(z), invalid_input);
}

TEST(ConcentrationGraph, Examples) {
  auto diag = GaussianModel::from_kappa(names(3), MatrixXd::Identity(3, 3));
  EXPECT_EQ(concentration_graph(diag).edge_count(), 0u);

  MatrixXd k = MatrixXd::Identity(4, 4) * 2;
  for (int i = 0; i + 1 < 4; ++i) k(i, i + 1) = k(i + 1, i) = -0.5;
  UGraph g = concentration_graph(GaussianModel::from_kappa(names(4), k));
  EXPECT_EQ(g.edges(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}}));
}

TEST(ConcentrationGraph, MathMarksThresholdScan) {
  GaussianModel mm = mathmarks();
  UGraph g = concentration_graph(mm, 0.02 / 1000);
  EXPECT_EQ(g.edge_count(), 9u);
  EXPECT_FALSE(g.adjacent(0, 3));
  // Oracle: every threshold strictly between the smallest and second
  // smallest |k_uv| drops exactly the (Mechanics, Analysis) edge.
  std::vector<double> mags;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) mags.push_back(std::abs(mm.kappa()(i, j)));
  std::sort(mags.begin(), mags.end());
  for (double t = mags[0] * 1.01; t < mags[1]; t *= 1.5) {
    UGraph h = concentration_graph(mm, t);
    EXPECT_EQ(h.edge_count(), 9u);
    EXPECT_FALSE(h.adjacent(0, 3));
  }
  EXPECT_EQ(concentration_graph(mm).edge_count(), 10u);
}

TEST(RealizeGraph, Examples) {
  EXPECT_TRUE(realize_graph(UGraph::numbered(3)).kappa().isIdentity());
  UGraph c4 = UGraph::numbered(4);
  for (int i = 0; i < 4; ++i) c4.add_edge(i, (i + 1) % 4);
  auto m = realize_graph(c4);
  EXPECT_NEAR(m.kappa()(0, 1), -0.3, 1e-15);
  EXPECT_TRUE(is_m_matrix(m.kappa()).holds);
  EXPECT_TRUE(concentration_graph(m) == c4);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.kappa());
  EXPECT_GT(es.eigenvalues().minCoeff(), 0);

  auto k5 = realize_graph(UGraph::complete(names(5)));
  EXPECT_NEAR(k5.kappa()(0, 4), -0.18, 1e-15);
  EXPECT_TRUE(is_m_matrix(k5.kappa()).holds);
  EXPECT_EQ(concentration_graph(k5).edge_count(), 10u);
}

TEST(RealizeGraph, AllGraphsUpToFiveNodes) {
  int count = 0;
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      UGraph g = UGraph::numbered(n);
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if (mask >> e & 1u) g.add_edge(pairs[e].first, pairs[e].second);
      auto m = realize_graph(g);
      ASSERT_TRUE(is_m_matrix(m.kappa()).holds);
      ASSERT_TRUE(check_gaussian_mtp2(m).holds);
      ASSERT_TRUE(concentration_graph(m) == g);
      ++count;
    }
  }
  EXPECT_EQ(count, 1 + 2 + 8 + 64 + 1024);
}

TEST(BlockDecomposition, Examples) {
  MatrixXd s = MatrixXd::Identity(4, 4);
  s(0, 1) = s(1, 0) = 0.5;
  s(2, 3) = s(3, 2) = 0.4;
  auto blocks = block_decomposition(GaussianModel::from_sigma(names(4), s));
  EXPECT_EQ(blocks, (std::vector<std::vector<int>>{{0, 1}, {2, 3}}));

  MatrixXd full = MatrixXd::Constant(3, 3, 0.3);
  full.diagonal().setOnes();
  EXPECT_EQ(block_decomposition(GaussianModel::from_sigma(names(3), full)).size(), 1u);

  MatrixXd neg(2, 2);
  neg << 1, -0.3, -0.3, 1;
  EXPECT_THROW(block_decomposition(GaussianModel::from_sigma(names(2), neg)), precondition_error);
}

TEST(BlockDecomposition, RecoversConstructionPartition) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto rng = seeded(seed);
    int n = uniform_int(rng, 2, 6);
    std::vector<int> label(static_cast<std::size_t>(n));
    for (auto& l : label) l = uniform_int(rng, 0, 2);
    // connected M-matrix per block (a path plus random extra edges)
    MatrixXd k = MatrixXd::Zero(n, n);
    for (int b = 0; b < 3; ++b) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (label[static_cast<std::size_t>(i)] == b) members.push_back(i);
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t c = a + 1; c < members.size(); ++c)
          if (c == a + 1 || uniform_int(rng, 0, 1)) k(members[a], members[c]) = k(members[c], members[a]) = -uniform(rng, 0.1, 1);
    }
    for (int i = 0; i < n; ++i) k(i, i) = -k.row(i).sum() + uniform(rng, 0.1, 1.0);
    auto blocks = block_decomposition(GaussianModel::from_kappa(names(n), k));
    std::vector<std::vector<int>> expect;
    std::vector<int> seen(3, -1);
    for (int i = 0; i < n; ++i) {
      int l = label[static_cast<std::size_t>(i)];
      if (seen[static_cast<std::size_t>(l)] < 0) {
        seen[static_cast<std::size_t>(l)] = static_cast<int>(expect.size());
        expect.emplace_back();
      }
      expect[static_cast<std::size_t>(seen[static_cast<std::size_t>(l)])].push_back(i);
    }
    EXPECT_EQ(blocks, expect) << "seed " << seed;
  }
}

TEST(GaussianFaithfulness, VanishingPartialCorrelationMeansSeparation) {
  int zeros = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto rng = seeded(seed);
    int n = uniform_int(rng, 2, 4);
    auto m = GaussianModel::from_kappa(names(n), random_m_matrix(rng, n, 5));
    UGraph g = concentration_graph(m);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        VarSet rest = g.all() - VarSet{u, v};
        for (VarSet c : subsets_of(rest)) {
          double r = partial_correlation(m.sigma(), u, v, c.members());
          bool sep = separates(g, VarSet::single(u), VarSet::single(v), c);
          EXPECT_EQ(std::abs(r) < 1e-9, sep) << "seed " << seed;
          EXPECT_GE(r, -1e-9);
          zeros += sep;
        }
      }
  }
  EXPECT_GT(zeros, 100);
}
