#ifndef TOTPOS_CG_HPP_
#define TOTPOS_CG_HPP_

// Conditional Gaussian distributions: canonical characteristics (g, h, K)
// per discrete cell, conversion to and from moment characteristics
// (p, xi, Sigma), and the canonical / interaction-based MTP2 criteria.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/gaussian.hpp"
#include "totpos/loglinear.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"

namespace totpos {

// log f(y, i) = g(i) + h(i)'y - y'K(i)y / 2 for discrete cells i of
// `discrete` and y over the continuous variables.
class CGModel {
 public:
  CGModel() = default;

  CGModel(Lattice discrete, std::vector<std::string> continuous, std::vector<double> g, std::vector<VectorXd> h,
          std::vector<MatrixXd> k)
      : discrete_(std::move(discrete)), continuous_(std::move(continuous)), g_(std::move(g)), h_(std::move(h)),
        k_(std::move(k)) {
    const std::size_t cells = discrete_.size();
    const auto d = static_cast<Eigen::Index>(continuous_.size());
    if (k_.size() == 1 && cells > 1) k_.assign(cells, k_[0]);
    if (g_.size() != cells || h_.size() != cells || k_.size() != cells)
      throw invalid_input("CG characteristics need one entry per discrete cell");
    for (std::size_t i = 0; i < cells; ++i) {
      if (!std::isfinite(g_[i])) throw invalid_input("g must be finite");
      if (h_[i].size() != d) throw invalid_input("h has the wrong dimension");
      if (k_[i].rows() != d || k_[i].cols() != d) throw invalid_input("K has the wrong dimension");
      require_symmetric(k_[i], "K");
      if (!is_positive_definite(k_[i])) throw precondition_error("K at cell " + discrete_.cell_of(i).str() + " is not positive definite");
    }
  }

  const Lattice& discrete() const { return discrete_; }
  const std::vector<std::string>& continuous() const { return continuous_; }
  int dim() const { return static_cast<int>(continuous_.size()); }
  std::size_t cells() const { return discrete_.size(); }
  const std::vector<double>& g() const { return g_; }
  const std::vector<VectorXd>& h() const { return h_; }
  const std::vector<MatrixXd>& k() const { return k_; }

  double log_density(std::size_t i, const VectorXd& y) const {
    return g_[i] + h_[i].dot(y) - 0.5 * y.dot(k_[i] * y);
  }

 private:
  Lattice discrete_;
  std::vector<std::string> continuous_;
  std::vector<double> g_;
  std::vector<VectorXd> h_;
  std::vector<MatrixXd> k_;
};

struct CGMoments {
  Lattice discrete;
  std::vector<std::string> continuous;
  std::vector<double> p;  // sums to 1
  std::vector<VectorXd> xi;
  std::vector<MatrixXd> sigma;
  // log of the total mass of exp(g + h'y - y'Ky/2); 0 for a normalized model
  double log_mass = 0.0;
};

inline CGMoments moment_from_canonical(const CGModel& m) {
  CGMoments out{m.discrete(), m.continuous(), {}, {}, {}, 0.0};
  const double half_d_log_2pi = 0.5 * m.dim() * std::log(2 * std::numbers::pi);
  std::vector<double> logw(m.cells());
  for (std::size_t i = 0; i < m.cells(); ++i) {
    Eigen::LLT<MatrixXd> llt(m.k()[i]);
    if (llt.info() != Eigen::Success) throw precondition_error("singular K");
    MatrixXd sigma = llt.solve(MatrixXd::Identity(m.dim(), m.dim()));
    sigma = (sigma + sigma.transpose()) / 2;
    VectorXd xi = sigma * m.h()[i];
    double log_det_k = 2 * llt.matrixLLT().diagonal().array().log().sum();
    logw[i] = m.g()[i] + 0.5 * m.h()[i].dot(xi) - 0.5 * log_det_k + half_d_log_2pi;
    out.xi.push_back(std::move(xi));
    out.sigma.push_back(std::move(sigma));
  }
  double top = *std::max_element(logw.begin(), logw.end());
  double total = 0;
  for (double w : logw) total += std::exp(w - top);
  out.log_mass = top + std::log(total);
  for (double w : logw) out.p.push_back(std::exp(w - out.log_mass));
  return out;
}

inline CGModel canonical_from_moment(const CGMoments& mo) {
  const std::size_t cells = mo.discrete.size();
  const auto d = static_cast<Eigen::Index>(mo.continuous.size());
  if (mo.p.size() != cells || mo.xi.size() != cells || mo.sigma.size() != cells)
    throw invalid_input("moment characteristics need one entry per discrete cell");
  const double half_d_log_2pi = 0.5 * static_cast<double>(d) * std::log(2 * std::numbers::pi);
  std::vector<double> g;
  std::vector<VectorXd> h;
  std::vector<MatrixXd> k;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(mo.p[i] > 0)) throw invalid_input("p must be strictly positive");
    if (mo.xi[i].size() != d || mo.sigma[i].rows() != d || mo.sigma[i].cols() != d)
      throw invalid_input("moment characteristics have the wrong dimension");
    require_symmetric(mo.sigma[i], "Sigma");
    Eigen::LLT<MatrixXd> llt(mo.sigma[i]);
    if (llt.info() != Eigen::Success) throw precondition_error("Sigma is not positive definite");
    MatrixXd ki = llt.solve(MatrixXd::Identity(d, d));
    ki = (ki + ki.transpose()) / 2;
    VectorXd hi = ki * mo.xi[i];
    double log_det_sigma = 2 * llt.matrixLLT().diagonal().array().log().sum();
    g.push_back(std::log(mo.p[i]) + mo.log_mass - 0.5 * mo.xi[i].dot(hi) - 0.5 * log_det_sigma - half_d_log_2pi);
    h.push_back(std::move(hi));
    k.push_back(std::move(ki));
  }
  return CGModel(mo.discrete, mo.continuous, std::move(g), std::move(h), std::move(k));
}

// ---- additivity -------------------------------------------------------

struct AdditivityVerdict {
  bool additive = true;
  // First non-vanishing interaction: continuous coordinate, variable set, cell.
  struct Witness {
    int coordinate;
    VarSet interaction;
    Cell cell;
    double value;
  };
  std::optional<Witness> witness;
};

namespace detail {

inline double scaled_tol(const std::vector<double>& v, double rel) {
  double m = 1.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return rel * m;
}

inline LatticeFunction<double> coordinate_function(const Lattice& lat, const std::vector<VectorXd>& h, int v) {
  std::vector<double> vals;
  for (const auto& x : h) vals.push_back(x(v));
  return LatticeFunction<double>(lat, std::move(vals));
}

// Interaction route: all terms of order >= 2 vanish.
inline std::optional<AdditivityVerdict::Witness> first_interaction(const LatticeFunction<double>& f, int coordinate,
                                                                   double tol) {
  Expansion<double> e = expand_function(f);
  for (VarSet d : subsets_by_size(f.lattice.all())) {
    if (d.size() < 2) continue;
    const auto& term = e.term(d);
    Lattice sub = f.lattice.sub(d);
    for (std::size_t j = 0; j < term.size(); ++j)
      if (std::abs(term[j]) > tol) return AdditivityVerdict::Witness{coordinate, d, sub.cell_of(j), term[j]};
  }
  return std::nullopt;
}

}  // namespace detail

// Lemma: additive iff modular. Both routes are evaluated per coordinate and
// must agree.
inline AdditivityVerdict is_additive(const Lattice& lat, const std::vector<VectorXd>& h, double rel_tol = 1e-10) {
  if (h.size() != lat.size()) throw invalid_input("one vector per discrete cell required");
  AdditivityVerdict out;
  const Eigen::Index d = h.empty() ? 0 : h[0].size();
  for (const auto& x : h)
    if (x.size() != d) throw invalid_input("vectors of different lengths");
  for (int v = 0; v < d; ++v) {
    LatticeFunction<double> f = detail::coordinate_function(lat, h, v);
    double tol = detail::scaled_tol(f.values, rel_tol);
    auto w = detail::first_interaction(f, v, tol);
    bool modular = is_modular(f, std::nullopt, Compare<double>{0.0, 2 * tol});
    if (modular != !w.has_value())
      throw internal_inconsistency("interaction and modularity tests of additivity disagree");
    if (w && out.additive) {
      out.additive = false;
      out.witness = w;
    }
  }
  return out;
}

inline AdditivityVerdict is_additive(const LatticeFunction<double>& f, double rel_tol = 1e-10) {
  std::vector<VectorXd> h;
  for (double x : f.values) h.push_back(VectorXd::Constant(1, x));
  return is_additive(f.lattice, h, rel_tol);
}

// ---- MTP2 criteria ----------------------------------------------------

enum class CgCondition { g_supermodular = 1, h_additive, h_monotone, k_constant, k_m_matrix };

inline const char* to_string(CgCondition c) {
  switch (c) {
    case CgCondition::g_supermodular: return "g_supermodular";
    case CgCondition::h_additive: return "h_additive";
    case CgCondition::h_monotone: return "h_monotone";
    case CgCondition::k_constant: return "k_constant";
    default: return "k_m_matrix";
  }
}

// Which of the three numbered conditions a failure belongs to.
inline int condition_group(CgCondition c) {
  switch (c) {
    case CgCondition::g_supermodular: return 1;
    case CgCondition::h_additive:
    case CgCondition::h_monotone: return 2;
    default: return 3;
  }
}

struct CgFailure {
  CgCondition condition;
  std::optional<Cell> x, y;  // discrete cells (pair for supermodularity / constancy)
  int axis = -1;             // discrete variable stepped (monotonicity)
  int row = -1, col = -1;    // continuous coordinate or matrix entry
  double value = 0.0;
};

struct CgMtp2Verdict {
  bool holds = true;
  std::vector<CgFailure> failures;  // at most one per condition
  bool fails(int group) const {
    return std::any_of(failures.begin(), failures.end(), [&](const CgFailure& f) { return condition_group(f.condition) == group; });
  }
};

namespace detail {

constexpr double kCgTol = 1e-10;

inline void check_k(const CGModel& m, CgMtp2Verdict& v) {
  const MatrixXd& k0 = m.k()[0];
  double scale = std::max(1.0, max_abs_entry(k0));
  for (std::size_t i = 1; i < m.cells(); ++i)
    for (int r = 0; r < m.dim(); ++r)
      for (int c = 0; c < m.dim(); ++c)
        if (std::abs(m.k()[i](r, c) - k0(r, c)) > kCgTol * scale) {
          v.failures.push_back({CgCondition::k_constant, m.discrete().cell_of(0), m.discrete().cell_of(i), -1, r, c,
                                m.k()[i](r, c) - k0(r, c)});
          return;
        }
  MMatrixVerdict mm = is_m_matrix(k0, kCgTol * scale);
  if (!mm.holds) {
    CgFailure f{CgCondition::k_m_matrix, std::nullopt, std::nullopt, -1, -1, -1, 0.0};
    if (!mm.off_diagonal.empty()) f.row = mm.off_diagonal[0].u, f.col = mm.off_diagonal[0].v, f.value = mm.off_diagonal[0].value;
    v.failures.push_back(f);
  }
}

inline void finish(CgMtp2Verdict& v) {
  std::stable_sort(v.failures.begin(), v.failures.end(),
                   [](const CgFailure& a, const CgFailure& b) { return a.condition < b.condition; });
  v.holds = v.failures.empty();
}

}  // namespace detail

// Canonical criterion: g supermodular; h additive and non-decreasing
// (componentwise); K constant and an M-matrix.
inline CgMtp2Verdict check_cg_mtp2(const CGModel& m) {
  CgMtp2Verdict v;
  const Lattice& lat = m.discrete();
  LatticeFunction<double> g(lat, m.g());
  auto sm = is_supermodular(g, std::nullopt, Compare<double>{0.0, detail::scaled_tol(m.g(), detail::kCgTol)});
  if (!sm.holds)
    v.failures.push_back({CgCondition::g_supermodular, sm.certificate->x, sm.certificate->y, -1, -1, -1,
                          sm.certificate->lhs - sm.certificate->rhs});

  bool additive_reported = false, monotone_reported = false;
  for (int c = 0; c < m.dim(); ++c) {
    LatticeFunction<double> f = detail::coordinate_function(lat, m.h(), c);
    double tol = detail::scaled_tol(f.values, detail::kCgTol);
    if (!additive_reported) {
      auto up = is_supermodular(f, std::nullopt, Compare<double>{0.0, 2 * tol});
      LatticeFunction<double> neg = f;
      for (auto& x : neg.values) x = -x;
      auto down = is_supermodular(neg, std::nullopt, Compare<double>{0.0, 2 * tol});
      const auto* cert = !up.holds ? &up.certificate : (!down.holds ? &down.certificate : nullptr);
      if (cert) {
        v.failures.push_back({CgCondition::h_additive, (*cert)->x, (*cert)->y, -1, c, -1, (*cert)->lhs - (*cert)->rhs});
        additive_reported = true;
      }
    }
    for (std::size_t i = 0; i < lat.size() && !monotone_reported; ++i)
      for (int a = 0; a < lat.rank(); ++a) {
        if (lat.coordinate(i, a) + 1 >= lat.levels(a)) continue;
        double step = f[i + lat.stride(a)] - f[i];
        if (step < -tol) {
          v.failures.push_back({CgCondition::h_monotone, lat.cell_of(i), std::nullopt, a, c, -1, step});
          monotone_reported = true;
          break;
        }
      }
  }
  detail::check_k(m, v);
  detail::finish(v);
  return v;
}

// Interaction criterion: gamma functions of g's expansion on each support
// class, main effects of h's expansion non-decreasing with no higher
// interactions, K as above. Must agree with check_cg_mtp2.
inline CgMtp2Verdict check_cg_mtp2_loglinear(const CGModel& m) {
  CgMtp2Verdict v;
  const Lattice& lat = m.discrete();
  Expansion<double> eg = expand_function(LatticeFunction<double>(lat, m.g()));
  GammaVerdict gv = check_mtp2_via_gamma(eg, FloatSign{detail::scaled_tol(m.g(), detail::kCgTol)});
  if (!gv.holds) {
    const auto& f = *gv.failure;
    v.failures.push_back({CgCondition::g_supermodular, f.x, std::nullopt, f.direction, f.u, f.w, 0.0});
  }

  bool additive_reported = false, monotone_reported = false;
  for (int c = 0; c < m.dim(); ++c) {
    LatticeFunction<double> f = detail::coordinate_function(lat, m.h(), c);
    double tol = detail::scaled_tol(f.values, detail::kCgTol);
    if (!additive_reported)
      if (auto w = detail::first_interaction(f, c, tol)) {
        v.failures.push_back({CgCondition::h_additive, w->cell, std::nullopt, -1, c, -1, w->value});
        additive_reported = true;
      }
    if (monotone_reported) continue;
    Expansion<double> e = expand_function(f);
    for (int a = 0; a < lat.rank() && !monotone_reported; ++a) {
      const auto& main = e.term(VarSet::single(a));
      for (int r = 0; r + 1 < lat.levels(a); ++r) {
        double step = main[static_cast<std::size_t>(r + 1)] - main[static_cast<std::size_t>(r)];
        if (step < -tol) {
          std::vector<int> x(static_cast<std::size_t>(lat.rank()), 0);
          x[static_cast<std::size_t>(a)] = r;
          v.failures.push_back({CgCondition::h_monotone, Cell(std::move(x)), std::nullopt, a, c, -1, step});
          monotone_reported = true;
          break;
        }
      }
    }
  }
  detail::check_k(m, v);
  detail::finish(v);
  return v;
}

// Necessary moment conditions of an MTP2 CG distribution. Not sufficient.
struct CgMomentReport {
  bool p_mtp2 = true;
  bool xi_additive = true;
  bool xi_monotone = true;
  bool sigma_constant = true;
  bool sigma_nonnegative = true;
  bool all() const { return p_mtp2 && xi_additive && xi_monotone && sigma_constant && sigma_nonnegative; }
};

inline CgMomentReport check_cg_moment_necessary(const CGModel& m, double tol = 1e-9) {
  CGMoments mo = moment_from_canonical(m);
  const Lattice& lat = mo.discrete;
  CgMomentReport r;
  r.p_mtp2 = check_mtp2_full(FloatTable(lat, mo.p), Compare<double>{tol, 0.0}).holds;
  for (int c = 0; c < m.dim(); ++c) {
    LatticeFunction<double> f = detail::coordinate_function(lat, mo.xi, c);
    double t = detail::scaled_tol(f.values, tol);
    if (!is_modular(f, std::nullopt, Compare<double>{0.0, 2 * t})) r.xi_additive = false;
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (int a = 0; a < lat.rank(); ++a)
        if (lat.coordinate(i, a) + 1 < lat.levels(a) && f[i + lat.stride(a)] - f[i] < -t) r.xi_monotone = false;
  }
  const MatrixXd& s0 = mo.sigma[0];
  double scale = std::max(1.0, max_abs_entry(s0));
  for (const auto& s : mo.sigma)
    if ((s - s0).cwiseAbs().maxCoeff() > tol * scale) r.sigma_constant = false;
  for (const auto& s : mo.sigma)
    if (s.size() && s.minCoeff() < -tol * scale) r.sigma_nonnegative = false;
  return r;
}

}  // namespace totpos

#endif  // TOTPOS_CG_HPP_
