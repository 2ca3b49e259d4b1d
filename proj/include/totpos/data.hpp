#ifndef TOTPOS_DATA_HPP_
#define TOTPOS_DATA_HPP_

// Bundled datasets, stored exactly as printed (counts and decimals become
// exact rationals; the concentration matrix keeps its printed precision).

#include <string>
#include <variant>
#include <vector>

#include "totpos/error.hpp"
#include "totpos/gaussian.hpp"
#include "totpos/rational.hpp"
#include "totpos/table.hpp"

namespace totpos {

namespace data_detail {

inline std::vector<Axis> binary_axes(const std::vector<std::string>& names) {
  std::vector<Axis> axes;
  for (const auto& n : names) axes.push_back(Axis::ranked(n, 2));
  return axes;
}

// 8 printed rows x 4 columns; column c holds (x1, x2) = (c & 1, c >> 1),
// row r holds (x3, x4, x5) = (r & 1, r >> 1 & 1, r >> 2 & 1).
inline JointTable laryngeal(const char* const (&rows)[8][4]) {
  Lattice lat(binary_axes({"cancer", "vodka", "smoking", "age", "education"}));
  std::vector<Rational> v(lat.size());
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 4; ++c) {
      Cell x{c & 1, c >> 1, r & 1, (r >> 1) & 1, (r >> 2) & 1};
      v[lat.index_of(x)] = parse_rational(rows[r][c]);
    }
  return JointTable(lat, std::move(v));
}

}  // namespace data_detail

// Symptoms edema, proteinuria, hypertension; unnormalized counts.
inline JointTable eph_data() {
  // printed as rows x1 = 0, 1 and columns (x2,x3) = 00, 10, 01, 11
  const long printed[2][4] = {{3299, 107, 1012, 58}, {78, 11, 65, 19}};
  Lattice lat(data_detail::binary_axes({"edema", "proteinuria", "hypertension"}));
  std::vector<Rational> v(lat.size());
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) v[lat.index_of(Cell{r, c & 1, c >> 1})] = printed[r][c];
  return JointTable(lat, std::move(v));
}

inline JointTable laryngeal_observed() {
  static const char* const rows[8][4] = {
      {"85", "11", "5", "6"},  {"10", "1", "1", "2"}, {"46", "15", "3", "7"}, {"7", "2", "2", "5"},
      {"51", "27", "7", "18"}, {"4", "6", "1", "4"},  {"73", "36", "5", "30"}, {"5", "9", "3", "6"}};
  return data_detail::laryngeal(rows);
}

// Fitted counts of the concentration graph model with cliques
// {cancer, vodka, smoking} and {cancer, age, education}, two decimals.
inline JointTable laryngeal_fitted() {
  static const char* const rows[8][4] = {
      {"85.88", "9.87", "7.30", "6.35"},   {"9.27", "1.70", "1.55", "2.08"},   {"47.59", "14.31", "4.19", "9.21"},
      {"5.32", "2.47", "0.89", "3.02"},    {"51.70", "27.13", "4.55", "17.46"}, {"5.78", "4.68", "0.97", "5.73"},
      {"70.57", "39.96", "6.22", "25.72"}, {"7.89", "6.89", "1.32", "8.43"}};
  return data_detail::laryngeal(rows);
}

// p000 = p111 = 1/2.
inline JointTable intersection_example() {
  Lattice lat(data_detail::binary_axes({"1", "2", "3"}));
  std::vector<Rational> v(8, Rational(0));
  v[0] = v[7] = ratio(1, 2);
  return JointTable(lat, std::move(v), true);
}

// I and K independent given ternary J, P(I=1|j) = P(K=1|j) = 1/4, 1/3, 1/2, J uniform.
inline JointTable coarsening_example() {
  const Rational one[3] = {ratio(1, 4), ratio(1, 3), ratio(1, 2)};
  Lattice lat({Axis::ranked("I", 2), Axis::ranked("J", 3), Axis::ranked("K", 2)});
  std::vector<Rational> v(lat.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Cell c = lat.cell_of(i);
    const Rational& q = one[c[1]];
    Rational a = c[0] ? q : Rational(1 - q);
    Rational b = c[2] ? q : Rational(1 - q);
    v[i] = a * b / 3;
  }
  return JointTable(lat, std::move(v), true);
}

inline JointTable markov_combination_example() {
  const long w[16] = {1, 2, 2, 20, 2, 20, 20, 400, 2, 4, 20, 200, 20, 200, 400, 8000};
  Lattice lat(data_detail::binary_axes({"1", "2", "3", "4"}));
  std::vector<Rational> v;
  for (long x : w) v.push_back(ratio(x, 9313));
  return JointTable(lat, std::move(v), true);
}

// Edge potentials of the 4-cycle 1-2-3-4-1: psi_12 = [[6,5],[4,3]], the others [[2,1],[1,2]].
inline std::vector<std::vector<long>> four_cycle_potential(int edge) {
  if (edge == 0) return {{6, 5}, {4, 3}};
  return {{2, 1}, {1, 2}};
}

inline JointTable four_cycle_example() {
  Lattice lat(data_detail::binary_axes({"1", "2", "3", "4"}));
  auto a = four_cycle_potential(0), b = four_cycle_potential(1);
  std::vector<Rational> v(lat.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Cell x = lat.cell_of(i);
    v[i] = ratio(a[x[0]][x[1]] * b[x[1]][x[2]] * b[x[2]][x[3]] * b[x[0]][x[3]], 243);
  }
  return JointTable(lat, std::move(v), true);
}

// Examination marks: concentration matrix x 1000 as printed (upper triangle).
inline GaussianModel mathmarks() {
  const double upper[5][5] = {{5.24, -2.44, -2.74, 0.01, -0.14},
                              {0, 10.43, -4.71, -0.79, -0.17},
                              {0, 0, 26.95, -7.05, -4.70},
                              {0, 0, 0, 9.88, -2.02},
                              {0, 0, 0, 0, 6.45}};
  MatrixXd k(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) k(i, j) = k(j, i) = upper[i][j] / 1000.0;
  return GaussianModel::from_kappa({"Mechanics", "Vectors", "Algebra", "Analysis", "Statistics"}, k);
}

// Printed partial correlations (below the diagonal; zero elsewhere).
inline MatrixXd mathmarks_printed_partials() {
  MatrixXd r = MatrixXd::Zero(5, 5);
  r(1, 0) = 0.33;
  r(2, 0) = 0.23, r(2, 1) = 0.28;
  r(3, 0) = -0.00, r(3, 1) = 0.08, r(3, 2) = 0.43;
  r(4, 0) = 0.02, r(4, 1) = 0.02, r(4, 2) = 0.36, r(4, 3) = 0.25;
  return r;
}

using DatasetValue = std::variant<JointTable, GaussianModel>;

struct Dataset {
  std::string name;
  std::string description;
  DatasetValue value;
};

inline const std::vector<std::string>& dataset_names() {
  static const std::vector<std::string> names{"mathmarks",        "eph",           "laryngeal-observed",
                                              "laryngeal-fitted", "ex-intersection", "ex-coarsening",
                                              "ex-markov-combination", "ex-4cycle"};
  return names;
}

inline Dataset bundled_data(const std::string& name) {
  if (name == "mathmarks")
    return {name, "examination marks, concentration matrix x 1000 rescaled to K", mathmarks()};
  if (name == "eph") return {name, "EPH-gestosis symptom counts", eph_data()};
  if (name == "laryngeal-observed") return {name, "laryngeal cancer case-control counts", laryngeal_observed()};
  if (name == "laryngeal-fitted") return {name, "laryngeal cancer fitted counts (2 decimals)", laryngeal_fitted()};
  if (name == "ex-intersection") return {name, "binary MTP2 table violating intersection", intersection_example()};
  if (name == "ex-coarsening") return {name, "conditional independence lost by monotone coarsening", coarsening_example()};
  if (name == "ex-markov-combination")
    return {name, "Markov combination of MTP2 margins that is not MTP2", markov_combination_example()};
  if (name == "ex-4cycle") return {name, "4-cycle edge potentials with a non-TP2 potential", four_cycle_example()};
  throw invalid_input("unknown dataset '" + name + "'");
}

}  // namespace totpos

#endif  // TOTPOS_DATA_HPP_
