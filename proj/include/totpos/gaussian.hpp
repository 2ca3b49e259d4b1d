#ifndef TOTPOS_GAUSSIAN_HPP_
#define TOTPOS_GAUSSIAN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/ugraph.hpp"

namespace totpos {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double max_abs_entry(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Default tolerance: 1e-9 relative to the largest |entry|.
inline double default_tolerance(const MatrixXd& m) { return 1e-9 * max_abs_entry(m); }

inline void require_symmetric(const MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw invalid_input(std::string(what) + " is not square");
  double tol = 1e-12 * std::max(1.0, max_abs_entry(m));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) throw invalid_input(std::string(what) + " is not symmetric");
}

// Cholesky succeeds with strictly positive pivots.
inline bool is_positive_definite(const MatrixXd& m) {
  if (m.rows() == 0) return true;
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  return (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all();
}

class GaussianModel {
 public:
  GaussianModel() = default;

  static GaussianModel from_sigma(std::vector<std::string> names, MatrixXd sigma, std::optional<VectorXd> mean = {}) {
    GaussianModel m(std::move(names), sigma, "covariance", std::move(mean));
    m.sigma_ = std::move(sigma);
    m.kappa_ = m.sigma_.inverse();
    m.kappa_ = (m.kappa_ + m.kappa_.transpose()) / 2;
    return m;
  }
  static GaussianModel from_kappa(std::vector<std::string> names, MatrixXd kappa, std::optional<VectorXd> mean = {}) {
    GaussianModel m(std::move(names), kappa, "concentration matrix", std::move(mean));
    m.kappa_ = std::move(kappa);
    m.sigma_ = m.kappa_.inverse();
    m.sigma_ = (m.sigma_ + m.sigma_.transpose()) / 2;
    return m;
  }

  int dim() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const VectorXd& mean() const { return mean_; }
  const MatrixXd& sigma() const { return sigma_; }
  const MatrixXd& kappa() const { return kappa_; }

 private:
  GaussianModel(std::vector<std::string> names, const MatrixXd& m, const char* what, std::optional<VectorXd> mean)
      : names_(std::move(names)) {
    if (m.rows() != static_cast<Eigen::Index>(names_.size()))
      throw invalid_input(std::string(what) + " size does not match the variable list");
    require_symmetric(m, what);
    if (!is_positive_definite(m)) throw precondition_error(std::string(what) + " is not positive definite");
    mean_ = mean ? std::move(*mean) : VectorXd::Zero(m.rows());
    if (mean_.size() != m.rows()) throw invalid_input("mean vector has wrong length");
  }

  std::vector<std::string> names_;
  VectorXd mean_;
  MatrixXd sigma_, kappa_;
};

struct EntryViolation {
  int u, v;
  double value;
};

struct MMatrixVerdict {
  bool holds = true;
  bool positive_definite = true;
  double tol = 0.0;
  std::vector<EntryViolation> off_diagonal;  // u < v with k_uv > tol
  std::vector<int> nonpositive_diagonal;
  // Filled by check_gaussian_mtp2: covariances below -tol.
  std::vector<EntryViolation> negative_covariances;
};

// Positive definite, diagonal > tol, off-diagonal <= tol.
inline MMatrixVerdict is_m_matrix(const MatrixXd& k, std::optional<double> tol = std::nullopt) {
  require_symmetric(k, "matrix");
  MMatrixVerdict v;
  v.tol = tol.value_or(default_tolerance(k));
  v.positive_definite = is_positive_definite(k);
  for (int i = 0; i < k.rows(); ++i) {
    if (k(i, i) <= v.tol) v.nonpositive_diagonal.push_back(i);
    for (int j = i + 1; j < k.cols(); ++j)
      if (k(i, j) > v.tol) v.off_diagonal.push_back({i, j, k(i, j)});
  }
  v.holds = v.positive_definite && v.off_diagonal.empty() && v.nonpositive_diagonal.empty();
  return v;
}

// Gaussian MTP2 iff the concentration matrix is an M-matrix; the sign of
// the covariances is reported as a necessary-condition cross-check.
inline MMatrixVerdict check_gaussian_mtp2(const GaussianModel& m, std::optional<double> tol = std::nullopt) {
  MMatrixVerdict v = is_m_matrix(m.kappa(), tol);
  double stol = tol ? *tol : default_tolerance(m.sigma());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i + 1; j < m.dim(); ++j)
      if (m.sigma()(i, j) < -stol) v.negative_covariances.push_back({i, j, m.sigma()(i, j)});
  if (v.holds && !v.negative_covariances.empty())
    throw internal_inconsistency("M-matrix concentration with a negative covariance");
  return v;
}

// Fast check for Monte Carlo loops: sigma PD with an M-matrix inverse.
inline bool gaussian_mtp2_holds(const MatrixXd& sigma, double rel_tol = 1e-9) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) return false;
  MatrixXd k = llt.solve(MatrixXd::Identity(sigma.rows(), sigma.cols()));
  double tol = rel_tol * max_abs_entry(k);
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = i + 1; j < k.cols(); ++j)
      if (k(i, j) > tol) return false;
  return true;
}

// rho_{uv.rest} = -k_uv / sqrt(k_uu k_vv), unit diagonal.
inline MatrixXd partial_correlations(const MatrixXd& k) {
  if (k.rows() != k.cols()) throw invalid_input("matrix is not square");
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    if (!(k(i, i) > 0)) throw invalid_input("partial correlations need a positive diagonal");
  MatrixXd r(k.rows(), k.cols());
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      r(i, j) = i == j ? 1.0 : -k(i, j) / std::sqrt(k(i, i) * k(j, j));
  return r;
}

// Partial correlation of u and v given the variables in `given`, from a covariance matrix.
inline double partial_correlation(const MatrixXd& sigma, int u, int v, const std::vector<int>& given) {
  std::vector<int> idx{u, v};
  idx.insert(idx.end(), given.begin(), given.end());
  MatrixXd sub(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sigma(idx[a], idx[b]);
  MatrixXd p = sub.inverse();
  return -p(0, 1) / std::sqrt(p(0, 0) * p(1, 1));
}

// Edge uv iff |k_uv| > tol.
inline UGraph concentration_graph(const GaussianModel& m, std::optional<double> tol = std::nullopt) {
  double t = tol.value_or(default_tolerance(m.kappa()));
  UGraph g(m.names());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i + 1; j < m.dim(); ++j)
      if (std::abs(m.kappa()(i, j)) > t) g.add_edge(i, j);
  return g;
}

// K = I - eps A with eps = 0.9 / (1 + max degree): strictly diagonally
// dominant, hence positive definite, with the pattern of G.
inline GaussianModel realize_graph(const UGraph& g) {
  const int n = g.size();
  double eps = 0.9 / (1.0 + g.max_degree());
  MatrixXd k = MatrixXd::Identity(n, n);
  for (auto [u, v] : g.edges()) k(u, v) = k(v, u) = -eps;
  return GaussianModel::from_kappa(g.nodes(), k);
}

// Components of the graph with edges sigma_uv > tol. Requires MTP2; within
// each block every covariance is then positive.
inline std::vector<std::vector<int>> block_decomposition(const GaussianModel& m, std::optional<double> tol = std::nullopt) {
  if (!check_gaussian_mtp2(m, tol).holds) throw precondition_error("block decomposition requires an MTP2 Gaussian");
  double t = tol.value_or(default_tolerance(m.sigma()));
  UGraph g(m.names());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i + 1; j < m.dim(); ++j)
      if (m.sigma()(i, j) > t) g.add_edge(i, j);
  std::vector<std::vector<int>> blocks;
  for (VarSet c : connected_components(g)) {
    std::vector<int> b = c.members();
    for (std::size_t x = 0; x < b.size(); ++x)
      for (std::size_t y = x + 1; y < b.size(); ++y)
        if (!(m.sigma()(b[x], b[y]) > t))
          throw internal_inconsistency("MTP2 block with a vanishing covariance");
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace totpos

#endif  // TOTPOS_GAUSSIAN_HPP_
