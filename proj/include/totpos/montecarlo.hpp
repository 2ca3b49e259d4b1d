#ifndef TOTPOS_MONTECARLO_HPP_
#define TOTPOS_MONTECARLO_HPP_

// Monte Carlo volume fractions of MTP2 families: uniform correlation
// matrices (onion construction), flat Dirichlet points of the probability
// simplex, and CI-constrained Gaussian and binary families.
//
// Every sample i draws from its own mt19937_64 seeded with
// seed_seq{seed_lo, seed_hi, i_lo, i_hi}, so results do not depend on the
// number of worker threads.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/gaussian.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"

namespace totpos {

enum class VolumeKind { gaussian, binary };

inline const char* to_string(VolumeKind k) { return k == VolumeKind::gaussian ? "gaussian" : "binary"; }

inline VolumeKind parse_volume_kind(const std::string& s) {
  if (s == "gaussian") return VolumeKind::gaussian;
  if (s == "binary") return VolumeKind::binary;
  throw invalid_input("unknown volume kind '" + s + "' (expected gaussian or binary)");
}

enum class CIConstraint { one_ci, two_ci, independence };

inline const char* to_string(CIConstraint c) {
  switch (c) {
    case CIConstraint::one_ci: return "one-ci";
    case CIConstraint::two_ci: return "two-ci";
    default: return "independence";
  }
}

inline CIConstraint parse_ci_constraint(const std::string& s) {
  if (s == "one-ci") return CIConstraint::one_ci;
  if (s == "two-ci") return CIConstraint::two_ci;
  if (s == "independence") return CIConstraint::independence;
  throw invalid_input("unknown constraint '" + s + "' (expected one-ci, two-ci or independence)");
}

struct Interval {
  double lo = 0.0, hi = 1.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// z quantile for a two-sided 99% interval
constexpr double kZ99 = 2.5758293035489004;

inline Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ99) {
  if (n == 0) throw invalid_input("Wilson interval needs n >= 1");
  if (hits > n) throw invalid_input("hits exceed sample count");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  // the bounds bracket p exactly; min/max only absorb rounding at 0 and n
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

struct VolumeEstimate {
  VolumeKind kind = VolumeKind::gaussian;
  int d = 0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double fraction = 0.0;
  Interval ci99;
  std::uint64_t seed = 0;
  std::optional<CIConstraint> constraint;
  // constrained families only: samples where the closed-form sign criterion
  // and the direct MTP2 check disagree
  std::optional<std::uint64_t> criterion_mismatches;

  friend bool operator==(const VolumeEstimate&, const VolumeEstimate&) = default;
};

inline VolumeEstimate make_estimate(VolumeKind kind, int d, std::uint64_t n, std::uint64_t hits, std::uint64_t seed) {
  VolumeEstimate e;
  e.kind = kind;
  e.d = d;
  e.n = n;
  e.hits = hits;
  e.fraction = static_cast<double>(hits) / static_cast<double>(n);
  e.ci99 = wilson_interval(hits, n);
  e.seed = seed;
  return e;
}

// ---- random streams ---------------------------------------------------

using SampleRng = std::mt19937_64;

inline SampleRng sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return SampleRng(seq);
}

// Worker count: TOTPOS_THREADS if set and positive, else hardware threads.
inline unsigned worker_count() {
  if (const char* env = std::getenv("TOTPOS_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Sum of body(rng_i, i) over i < n; each worker owns a contiguous index block.
template <class Body>
std::uint64_t parallel_count(std::uint64_t n, std::uint64_t seed, Body body, unsigned threads = worker_count()) {
  threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), std::max<std::uint64_t>(1, n)));
  std::vector<std::uint64_t> partial(threads, 0);
  auto run = [&](unsigned w) {
    std::uint64_t lo = n * w / threads, hi = n * (w + 1) / threads;
    std::uint64_t c = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      SampleRng rng = sample_rng(seed, i);
      c += body(rng, i);
    }
    partial[w] = c;
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

// ---- samplers ----------------------------------------------------------

inline double sample_beta(SampleRng& rng, double a, double b) {
  double x = std::gamma_distribution<double>(a, 1.0)(rng);
  double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

// Uniform over the d x d correlation matrices: onion construction with
// unit concentration.
inline MatrixXd sample_correlation_uniform(int d, SampleRng& rng) {
  if (d < 2) throw invalid_input("correlation sampling needs d >= 2");
  double beta = 1.0 + (d - 2) / 2.0;
  MatrixXd r = MatrixXd::Identity(d, d);
  r(0, 1) = r(1, 0) = 2 * sample_beta(rng, beta, beta) - 1;
  std::normal_distribution<double> normal;
  for (int k = 2; k < d; ++k) {
    beta -= 0.5;
    double y = sample_beta(rng, k / 2.0, beta);
    VectorXd u(k);
    for (int j = 0; j < k; ++j) u(j) = normal(rng);
    u /= u.norm();
    VectorXd w = std::sqrt(y) * u;
    Eigen::LLT<MatrixXd> llt(r.topLeftCorner(k, k));
    VectorXd z = llt.matrixL() * w;
    r.block(0, k, k, 1) = z;
    r.block(k, 0, 1, k) = z.transpose();
  }
  return r;
}

// Flat Dirichlet point of the simplex with `cells` vertices.
inline std::vector<double> sample_simplex_uniform(std::size_t cells, SampleRng& rng) {
  if (cells == 0) throw invalid_input("simplex needs at least one vertex");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(cells);
  double s = 0;
  for (auto& x : p) s += (x = expo(rng));
  for (auto& x : p) x /= s;
  return p;
}

// ---- estimators --------------------------------------------------------

// Axes named 1..d with levels 0 < 1.
inline Lattice binary_cube(int d) {
  std::vector<Axis> axes;
  for (int v = 0; v < d; ++v) axes.push_back(Axis::ranked(std::to_string(v + 1), 2));
  return Lattice(std::move(axes));
}

constexpr int kMaxBinaryVolumeDim = 6;
constexpr int kMaxGaussianVolumeDim = 50;

inline VolumeEstimate estimate_mtp2_fraction(VolumeKind kind, int d, std::uint64_t n, std::uint64_t seed,
                                             unsigned threads = worker_count()) {
  if (n < 1) throw invalid_input("sample count must be at least 1");
  std::uint64_t hits = 0;
  if (kind == VolumeKind::gaussian) {
    if (d < 2 || d > kMaxGaussianVolumeDim) throw size_guard_error("gaussian volume needs 2 <= d <= 50");
    hits = parallel_count(
        n, seed, [d](SampleRng& rng, std::uint64_t) { return gaussian_mtp2_holds(sample_correlation_uniform(d, rng)) ? 1u : 0u; },
        threads);
  } else {
    if (d < 1 || d > kMaxBinaryVolumeDim) throw size_guard_error("binary volume needs 1 <= d <= 6");
    Lattice lat = binary_cube(d);
    const auto pairs = incomparable_pairs(lat);
    const Compare<double> cmp{1e-12, 0.0};
    hits = parallel_count(
        n, seed,
        [&](SampleRng& rng, std::uint64_t) {
          std::vector<double> p = sample_simplex_uniform(lat.size(), rng);
          return mtp2_holds(p, pairs, cmp) ? 1u : 0u;
        },
        threads);
  }
  return make_estimate(kind, d, n, hits, seed);
}

// Three Gaussian variables with 1 _||_ 2 | 3 (one-ci): rho13, rho23 uniform
// on (-1, 1) and rho12 = rho13 rho23; MTP2 iff rho13, rho23 >= 0. Adding
// 1 _||_ 3 | 2 (two-ci) forces rho12 = rho13 = 0; MTP2 iff rho23 >= 0.
inline MatrixXd sample_constrained_correlation(CIConstraint c, SampleRng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  MatrixXd r = MatrixXd::Identity(3, 3);
  if (c == CIConstraint::one_ci) {
    double r13 = unif(rng), r23 = unif(rng);
    r(0, 2) = r(2, 0) = r13;
    r(1, 2) = r(2, 1) = r23;
    r(0, 1) = r(1, 0) = r13 * r23;
  } else if (c == CIConstraint::two_ci) {
    r(1, 2) = r(2, 1) = unif(rng);
  } else {
    throw invalid_input("gaussian constrained family supports one-ci and two-ci");
  }
  return r;
}

inline bool constrained_sign_criterion(CIConstraint c, const MatrixXd& r) {
  return c == CIConstraint::one_ci ? r(0, 2) >= 0 && r(1, 2) >= 0 : r(1, 2) >= 0;
}

inline VolumeEstimate constrained_fraction_gaussian(CIConstraint c, std::uint64_t n, std::uint64_t seed,
                                                    unsigned threads = worker_count()) {
  if (n < 1) throw invalid_input("sample count must be at least 1");
  if (c == CIConstraint::independence) throw invalid_input("gaussian constrained family supports one-ci and two-ci");
  const std::vector<std::string> names{"1", "2", "3"};
  // bit 0: MTP2 by the direct check, bit 1: mismatch with the sign criterion
  std::vector<std::uint8_t> outcome(n);
  parallel_count(
      n, seed,
      [&](SampleRng& rng, std::uint64_t i) {
        MatrixXd r = sample_constrained_correlation(c, rng);
        bool direct = check_gaussian_mtp2(GaussianModel::from_sigma(names, r)).holds;
        outcome[i] = static_cast<std::uint8_t>((direct ? 1 : 0) | (direct != constrained_sign_criterion(c, r) ? 2 : 0));
        return 0u;
      },
      threads);
  std::uint64_t hits = 0, mismatches = 0;
  for (auto o : outcome) hits += o & 1, mismatches += o >> 1;
  VolumeEstimate e = make_estimate(VolumeKind::gaussian, 3, n, hits, seed);
  e.constraint = c;
  e.criterion_mismatches = mismatches;
  return e;
}

// Binary table over (1, 2, 3) in row-major order. one-ci: p(3), p(1|3),
// p(2|3) flat Dirichlet; two-ci: p(1) and p(2, 3) = p(3) p(2|3) independent;
// independence: all three margins independent.
inline std::vector<double> sample_constrained_binary(CIConstraint c, SampleRng& rng) {
  auto draw2 = [&] {
    auto v = sample_simplex_uniform(2, rng);
    return std::array<double, 2>{v[0], v[1]};
  };
  std::array<double, 2> p3 = draw2();
  std::array<std::array<double, 2>, 2> p1, p2;  // indexed [k][i]
  if (c == CIConstraint::one_ci) {
    p1[0] = draw2(), p1[1] = draw2();
    p2[0] = draw2(), p2[1] = draw2();
  } else if (c == CIConstraint::two_ci) {
    p1[0] = p1[1] = draw2();
    p2[0] = draw2(), p2[1] = draw2();
  } else {
    p1[0] = p1[1] = draw2();
    p2[0] = p2[1] = draw2();
  }
  std::vector<double> t(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) t[static_cast<std::size_t>(4 * i + 2 * j + k)] = p3[k] * p1[k][i] * p2[k][j];
  return t;
}

// MTP2 of the one-ci family iff p(1=1|3) and p(2=1|3) are non-decreasing in 3.
inline bool constrained_binary_criterion(CIConstraint c, const std::vector<double>& t) {
  auto cond = [&](int var, int k) {
    double num = 0, den = 0;
    for (std::size_t idx = 0; idx < 8; ++idx) {
      int i = static_cast<int>(idx >> 2 & 1), j = static_cast<int>(idx >> 1 & 1), kk = static_cast<int>(idx & 1);
      if (kk != k) continue;
      den += t[idx];
      if ((var == 0 ? i : j) == 1) num += t[idx];
    }
    return num / den;
  };
  bool up2 = cond(1, 1) >= cond(1, 0);
  if (c == CIConstraint::independence) return true;
  if (c == CIConstraint::two_ci) return up2;
  return up2 && cond(0, 1) >= cond(0, 0);
}

inline VolumeEstimate constrained_fraction_binary(CIConstraint c, std::uint64_t n, std::uint64_t seed,
                                                  unsigned threads = worker_count()) {
  if (n < 1) throw invalid_input("sample count must be at least 1");
  Lattice lat = binary_cube(3);
  const auto pairs = incomparable_pairs(lat);
  const Compare<double> cmp{1e-12, 0.0};
  std::vector<std::uint8_t> outcome(n);
  parallel_count(
      n, seed,
      [&](SampleRng& rng, std::uint64_t i) {
        std::vector<double> t = sample_constrained_binary(c, rng);
        bool direct = mtp2_holds(t, pairs, cmp);
        outcome[i] = static_cast<std::uint8_t>((direct ? 1 : 0) | (direct != constrained_binary_criterion(c, t) ? 2 : 0));
        return 0u;
      },
      threads);
  std::uint64_t hits = 0, mismatches = 0;
  for (auto o : outcome) hits += o & 1, mismatches += o >> 1;
  VolumeEstimate e = make_estimate(VolumeKind::binary, 3, n, hits, seed);
  e.constraint = c;
  e.criterion_mismatches = mismatches;
  return e;
}

// ---- experimental ------------------------------------------------------

// Search for a table whose support is coordinate-wise connected but not an
// interval, which satisfies every pairwise TP2 condition yet fails the full
// check. Nothing is claimed about the outcome.
struct PairwiseSearchResult {
  std::uint64_t tried = 0;
  std::uint64_t eligible = 0;        // cw-connected, non-interval support
  std::uint64_t pairwise_passed = 0;  // of the eligible ones
  std::optional<JointTable> counterexample;
};

inline PairwiseSearchResult search_pairwise_counterexample(const Lattice& lat, std::uint64_t tries, std::uint64_t seed) {
  if (lat.rank() > 4 || lat.size() > 64) throw size_guard_error("pairwise search limited to 4 variables, 64 cells");
  PairwiseSearchResult out;
  for (std::uint64_t i = 0; i < tries && !out.counterexample; ++i) {
    SampleRng rng = sample_rng(seed, i);
    ++out.tried;
    // log-supermodular positive part: 2^(main effects + nonnegative pair terms)
    std::uniform_int_distribution<int> main(-2, 2), pair(0, 2), drop(0, 3);
    std::vector<int> effect(lat.size(), 0);
    std::vector<std::vector<int>> me(static_cast<std::size_t>(lat.rank()));
    for (int a = 0; a < lat.rank(); ++a)
      for (int r = 0; r < lat.levels(a); ++r) me[static_cast<std::size_t>(a)].push_back(main(rng));
    std::vector<int> pc;
    for (int a = 0; a < lat.rank(); ++a)
      for (int b = a + 1; b < lat.rank(); ++b) pc.push_back(pair(rng));
    std::vector<Rational> w(lat.size());
    for (std::size_t c = 0; c < lat.size(); ++c) {
      int s = 0;
      std::size_t p = 0;
      for (int a = 0; a < lat.rank(); ++a) {
        s += me[static_cast<std::size_t>(a)][static_cast<std::size_t>(lat.coordinate(c, a))];
        for (int b = a + 1; b < lat.rank(); ++b, ++p) s += pc[p] * lat.coordinate(c, a) * lat.coordinate(c, b);
      }
      w[c] = drop(rng) == 0 ? Rational(0) : (s >= 0 ? Rational(1 << s) : ratio(1, 1 << -s));
    }
    JointTable t(lat, w);
    SupportSet sup = support_analysis(t);
    if (sup.cells.empty() || sup.interval == Tri::yes || sup.cw_connected != Tri::yes) continue;
    ++out.eligible;
    if (!check_pairwise_conditions(t).holds) continue;
    ++out.pairwise_passed;
    if (!check_mtp2_full(t).holds) out.counterexample = t;
  }
  return out;
}

}  // namespace totpos

#endif  // TOTPOS_MONTECARLO_HPP_
