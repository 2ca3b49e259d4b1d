#ifndef TOTPOS_IO_HPP_
#define TOTPOS_IO_HPP_

// JSON and CSV encodings of tables, matrices, graphs, models, verdicts and
// estimates. Rationals are written as "p/q" strings and read from strings,
// integers, ["num","den"] pairs or (exactly, via the shortest decimal) doubles.
// Cells are written as arrays of level labels.

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "totpos/cg.hpp"
#include "totpos/construct.hpp"
#include "totpos/data.hpp"
#include "totpos/gaussian.hpp"
#include "totpos/indep.hpp"
#include "totpos/loglinear.hpp"
#include "totpos/markov.hpp"
#include "totpos/montecarlo.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/table.hpp"
#include "totpos/ugraph.hpp"

namespace totpos {

using Json = nlohmann::json;

namespace io_detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw invalid_input(where + ": " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_strings(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

template <class F>
auto rethrow_at(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const invalid_input& e) {
    fail(where, e.what());
  }
}

}  // namespace io_detail

// ---- scalars -----------------------------------------------------------

inline Json rational_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const Json& j, const std::string& where = "value") {
  using namespace io_detail;
  if (j.is_string()) return rethrow_at(where, [&] { return parse_rational(j.get<std::string>()); });
  if (j.is_number_integer()) return Rational(mpz_class(j.dump()));
  if (j.is_number_float()) return rethrow_at(where, [&] { return rational_from_double(j.get<double>()); });
  if (j.is_array() && j.size() == 2)
    return rethrow_at(where, [&] {
      Rational num = rational_from_json(j[0], where + "[0]"), den = rational_from_json(j[1], where + "[1]");
      if (den == 0) throw invalid_input("zero denominator");
      return Rational(num / den);
    });
  fail(where, "expected a rational (\"p/q\", a number, or [num, den])");
}

inline Json cell_json(const Lattice& lat, const Cell& c) {
  Json out = Json::array();
  for (int v = 0; v < lat.rank(); ++v) out.push_back(lat.axis(v).levels.at(static_cast<std::size_t>(c[static_cast<std::size_t>(v)])));
  return out;
}

inline std::string cell_key(const Lattice& lat, std::size_t index) {
  std::string key;
  for (int v = 0; v < lat.rank(); ++v) {
    if (v) key += ',';
    key += lat.axis(v).levels[static_cast<std::size_t>(lat.coordinate(index, v))];
  }
  return key;
}

// Cell from labels (or integer ranks).
inline Cell cell_from_json(const Lattice& lat, const Json& j, const std::string& where) {
  using namespace io_detail;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(lat.rank())) fail(where, "cell needs one entry per variable");
  std::vector<int> ranks;
  for (int v = 0; v < lat.rank(); ++v) {
    const Json& e = j[static_cast<std::size_t>(v)];
    if (e.is_number_integer()) {
      int r = e.get<int>();
      if (r < 0 || r >= lat.levels(v)) fail(where, "rank out of range");
      ranks.push_back(r);
    } else {
      ranks.push_back(rethrow_at(where, [&] { return lat.axis(v).rank_of(as_string(e, where)); }));
    }
  }
  return Cell(std::move(ranks));
}

inline Cell cell_from_key(const Lattice& lat, const std::string& key, const std::string& where) {
  std::vector<std::string> parts;
  if (lat.rank() > 0) {
    std::stringstream ss(key);
    std::string p;
    while (std::getline(ss, p, ',')) parts.push_back(p);
    if (!key.empty() && key.back() == ',') parts.push_back("");
  }
  Json j = Json::array();
  for (auto& p : parts) j.push_back(p);
  return cell_from_json(lat, j, where + "[\"" + key + "\"]");
}

inline Json varset_json(VarSet s, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (int v : s.members()) out.push_back(names.at(static_cast<std::size_t>(v)));
  return out;
}

inline VarSet varset_from_json(const Json& j, const std::vector<std::string>& names, const std::string& where) {
  using namespace io_detail;
  VarSet s;
  for (const auto& n : as_strings(j, where)) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) fail(where, "unknown variable '" + n + "'");
    s = s | VarSet::single(static_cast<int>(it - names.begin()));
  }
  return s;
}

// ---- tables ------------------------------------------------------------

inline Json axes_json(const std::vector<Axis>& axes) {
  Json out = Json::array();
  for (const auto& a : axes) out.push_back({{"name", a.name}, {"levels", a.levels}});
  return out;
}

inline std::vector<Axis> axes_from_json(const Json& j, const std::string& where) {
  using namespace io_detail;
  if (!j.is_array()) fail(where, "expected an array of axes");
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    const Json& lv = field(j[i], "levels", w);
    Axis a{as_string(field(j[i], "name", w), w + ".name"), {}};
    if (lv.is_number_integer()) {
      a = Axis::ranked(a.name, lv.get<int>());
    } else {
      a.levels = as_strings(lv, w + ".levels");
    }
    rethrow_at(w, [&] { a.validate(); return 0; });
    axes.push_back(std::move(a));
  }
  return axes;
}

inline Json table_json(const JointTable& t) {
  Json values = Json::array();
  for (const auto& v : t.values()) values.push_back({v.get_num().get_str(), v.get_den().get_str()});
  return {{"axes", axes_json(t.axes())}, {"values", values}};
}

inline Json table_json(const FloatTable& t) {
  return {{"axes", axes_json(t.axes())}, {"values", t.values()}};
}

inline JointTable table_from_json(const Json& j, const std::string& where = "table") {
  using namespace io_detail;
  Lattice lat = rethrow_at(where, [&] { return Lattice(axes_from_json(field(j, "axes", where), where + ".axes")); });
  const Json& vals = field(j, "values", where);
  if (!vals.is_array()) fail(where + ".values", "expected an array");
  if (vals.size() != lat.size())
    fail(where + ".values", "has " + std::to_string(vals.size()) + " entries, expected " + std::to_string(lat.size()));
  std::vector<Rational> v;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    std::string w = where + ".values[" + std::to_string(i) + "]";
    Rational q = rational_from_json(vals[i], w);
    if (q < 0) fail(w, "negative table entry");
    v.push_back(std::move(q));
  }
  return JointTable(std::move(lat), std::move(v));
}

// Contingency counts: header row of variable names and a final count
// column; one row per cell (missing cells count 0, repeated cells add up).
// Level labels are ordered numerically when every label of a column is an
// integer, otherwise by first appearance. The result is normalized.
inline JointTable table_from_csv(std::istream& in, const std::string& where = "csv") {
  using namespace io_detail;
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    for (auto& s : out) {
      auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    return out;
  };
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) header = split(line);
  }
  if (header.size() < 2) fail(where, "header needs at least one variable column and a count column");
  const std::size_t nvars = header.size() - 1;
  std::vector<std::vector<std::string>> rows;
  std::vector<Rational> counts;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string w = where + ":" + std::to_string(line_no);
    auto f = split(line);
    if (f.size() != header.size()) fail(w, "expected " + std::to_string(header.size()) + " fields");
    Rational c = rethrow_at(w, [&] { return parse_rational(f.back()); });
    if (c < 0) fail(w, "negative count");
    f.pop_back();
    rows.push_back(std::move(f));
    counts.push_back(std::move(c));
  }
  if (rows.empty()) fail(where, "no data rows");
  std::vector<Axis> axes;
  for (std::size_t v = 0; v < nvars; ++v) {
    std::vector<std::string> labels;
    for (const auto& r : rows)
      if (std::find(labels.begin(), labels.end(), r[v]) == labels.end()) labels.push_back(r[v]);
    auto as_int = [](const std::string& s, long& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc() && p == s.data() + s.size();
    };
    long tmp;
    if (std::all_of(labels.begin(), labels.end(), [&](const std::string& s) { return as_int(s, tmp); }))
      std::sort(labels.begin(), labels.end(), [&](const std::string& a, const std::string& b) {
        long x = 0, y = 0;
        as_int(a, x), as_int(b, y);
        return x < y;
      });
    axes.push_back(Axis{header[v], labels});
  }
  Lattice lat = rethrow_at(where, [&] { return Lattice(axes); });
  std::vector<Rational> v(lat.size(), Rational(0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<int> ranks;
    for (std::size_t a = 0; a < nvars; ++a) ranks.push_back(lat.axis(static_cast<int>(a)).rank_of(rows[r][a]));
    v[lat.index_of(Cell(ranks))] += counts[r];
  }
  JointTable t(lat, v);
  if (t.total() == 0) fail(where, "all counts are zero");
  return t.normalize();
}

// ---- matrices ----------------------------------------------------------

inline Json matrix_json(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline MatrixXd matrix_from_json(const Json& j, const std::string& where) {
  using namespace io_detail;
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    std::string w = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) fail(w, "matrix must be square");
    for (std::size_t c = 0; c < n; ++c) {
      const Json& e = j[r][c];
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          e.is_number() ? e.get<double>() : to_double(rational_from_json(e, w + "[" + std::to_string(c) + "]"));
    }
  }
  return m;
}

inline Json gaussian_json(const GaussianModel& m) {
  return {{"variables", m.names()}, {"sigma", matrix_json(m.sigma())}, {"kappa", matrix_json(m.kappa())}};
}

// {"variables":[...],"sigma":[[...]]} or {"variables":[...],"kappa":[[...]]};
// "scale" multiplies the matrix (printed matrices are often x 1000).
inline GaussianModel gaussian_from_json(const Json& j, const std::string& where = "model") {
  using namespace io_detail;
  auto names = as_strings(field(j, "variables", where), where + ".variables");
  double scale = j.contains("scale") ? as_double(j["scale"], where + ".scale") : 1.0;
  return rethrow_at(where, [&] {
    if (j.contains("kappa")) return GaussianModel::from_kappa(names, scale * matrix_from_json(j["kappa"], where + ".kappa"));
    if (j.contains("sigma")) return GaussianModel::from_sigma(names, scale * matrix_from_json(j["sigma"], where + ".sigma"));
    throw invalid_input("needs \"sigma\" or \"kappa\"");
  });
}

// Header row of variable names, then one row per matrix row.
inline std::pair<std::vector<std::string>, MatrixXd> matrix_from_csv(std::istream& in, const std::string& where = "csv") {
  using namespace io_detail;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      auto b = cell.find_first_not_of(" \t\r"), e = cell.find_last_not_of(" \t\r");
      f.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    rows.push_back(std::move(f));
  }
  if (rows.empty()) fail(where, "empty matrix file");
  const std::size_t n = rows[0].size();
  if (rows.size() != n + 1) fail(where, "expected a header and " + std::to_string(n) + " rows");
  MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    std::string w = where + ":" + std::to_string(r + 2);
    if (rows[r + 1].size() != n) fail(w, "expected " + std::to_string(n) + " fields");
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          to_double(rethrow_at(w, [&] { return parse_rational(rows[r + 1][c]); }));
  }
  return {rows[0], m};
}

// ---- graphs and models -------------------------------------------------

inline Json graph_json(const UGraph& g) {
  Json edges = Json::array();
  for (auto [u, v] : g.edges()) edges.push_back({g.nodes()[static_cast<std::size_t>(u)], g.nodes()[static_cast<std::size_t>(v)]});
  return {{"nodes", g.nodes()}, {"edges", edges}};
}

inline UGraph graph_from_json(const Json& j, const std::string& where = "graph") {
  using namespace io_detail;
  UGraph g = rethrow_at(where, [&] { return UGraph(as_strings(field(j, "nodes", where), where + ".nodes")); });
  const Json& edges = j.contains("edges") ? j["edges"] : Json::array();
  if (!edges.is_array()) fail(where + ".edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string w = where + ".edges[" + std::to_string(i) + "]";
    auto e = as_strings(edges[i], w);
    if (e.size() != 2) fail(w, "an edge has two endpoints");
    rethrow_at(w, [&] { g.add_edge(e[0], e[1]); return 0; });
  }
  return g;
}

inline Json triple_json(const CITriple& s, const std::vector<std::string>& names) {
  return {{"A", varset_json(s.a, names)}, {"B", varset_json(s.b, names)}, {"C", varset_json(s.c, names)}};
}

inline CITriple triple_from_json(const Json& j, const std::vector<std::string>& names, const std::string& where) {
  using namespace io_detail;
  return {varset_from_json(field(j, "A", where), names, where + ".A"), varset_from_json(field(j, "B", where), names, where + ".B"),
          varset_from_json(field(j, "C", where), names, where + ".C")};
}

inline Json model_json(const IndependenceModel& m) {
  Json st = Json::array();
  for (const auto& s : m.statements()) st.push_back(triple_json(s, m.names()));
  return {{"V", m.names()}, {"provenance", to_string(m.provenance())}, {"statements", st}};
}

inline IndependenceModel model_from_json(const Json& j, const std::string& where = "model") {
  using namespace io_detail;
  auto names = as_strings(field(j, "V", where), where + ".V");
  IndependenceModel m = rethrow_at(where, [&] { return IndependenceModel(names); });
  const Json& st = field(j, "statements", where);
  if (!st.is_array()) fail(where + ".statements", "expected an array");
  for (std::size_t i = 0; i < st.size(); ++i) {
    std::string w = where + ".statements[" + std::to_string(i) + "]";
    CITriple s = triple_from_json(st[i], names, w);
    rethrow_at(w, [&] { return m.insert(s); });
  }
  return m;
}

// ---- verdicts ----------------------------------------------------------

template <class T>
Json value_json(const T& v) {
  if constexpr (std::is_same_v<T, Rational>)
    return rational_json(v);
  else
    return v;
}

template <class T>
Json verdict_json(const BasicMtp2Verdict<T>& v, const Lattice& lat) {
  Json out{{"holds", v.holds}, {"method", to_string(v.method)}, {"certificate", nullptr}};
  if (v.certificate)
    out["certificate"] = {{"x", cell_json(lat, v.certificate->x)},
                          {"y", cell_json(lat, v.certificate->y)},
                          {"lhs", value_json(v.certificate->lhs)},
                          {"rhs", value_json(v.certificate->rhs)}};
  return out;
}

inline Json verdict_json(const GammaVerdict& v, const Lattice& lat) {
  Json out{{"holds", v.holds}, {"method", to_string(v.method)}, {"failure", nullptr}};
  if (v.failure) {
    const auto& f = *v.failure;
    out["failure"] = {{"condition", to_string(f.condition)},
                      {"u", lat.axis(f.u).name},
                      {"w", lat.axis(f.w).name},
                      {"x", cell_json(lat, f.x)},
                      {"direction", f.direction >= 0 ? Json(lat.axis(f.direction).name) : Json(nullptr)}};
  }
  return out;
}

inline Json verdict_json(const MMatrixVerdict& v, const std::vector<std::string>& names) {
  auto entries = [&](const std::vector<EntryViolation>& es) {
    Json a = Json::array();
    for (const auto& e : es)
      a.push_back({{"u", names.at(static_cast<std::size_t>(e.u))}, {"v", names.at(static_cast<std::size_t>(e.v))}, {"value", e.value}});
    return a;
  };
  Json diag = Json::array();
  for (int i : v.nonpositive_diagonal) diag.push_back(names.at(static_cast<std::size_t>(i)));
  return {{"holds", v.holds},
          {"positive_definite", v.positive_definite},
          {"tolerance", v.tol},
          {"off_diagonal_violations", entries(v.off_diagonal)},
          {"nonpositive_diagonal", diag},
          {"negative_covariances", entries(v.negative_covariances)}};
}

inline Json report_json(const AxiomReport& r, const std::vector<std::string>& names) {
  Json out{{"axiom", to_string(r.axiom)}, {"holds", r.holds}, {"counterexample", nullptr}};
  if (r.counterexample) {
    Json prem = Json::array(), miss = Json::array();
    for (const auto& s : r.counterexample->premises) prem.push_back(triple_json(s, names));
    for (const auto& s : r.counterexample->missing) miss.push_back(triple_json(s, names));
    out["counterexample"] = {{"premises", prem}, {"missing", miss}};
  }
  return out;
}

inline Json verdict_json(const MarkovVerdict& v, const std::vector<std::string>& names) {
  return {{"holds", v.holds}, {"counterexample", v.counterexample ? triple_json(*v.counterexample, names) : Json(nullptr)}};
}

inline Json verdict_json(const FaithfulnessVerdict& v) {
  return {{"holds", v.holds}, {"graph", graph_json(v.graph)}, {"statements", v.statements}};
}

inline Json report_json(const BetweennessReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) conds.push_back({{"name", c.name}, {"holds", c.holds ? Json(*c.holds) : Json(nullptr)}});
  return {{"betweenness", r.betweenness},
          {"strictly_positive", r.strictly_positive},
          {"mtp2", r.mtp2},
          {"conditions", conds},
          {"theta_relations", r.theta_relations ? Json(*r.theta_relations) : Json(nullptr)}};
}

inline Json expansion_json(const Expansion<LogMonomial>& sym, const Expansion<double>& num) {
  const Lattice& lat = sym.lattice;
  const auto& names = lat.names();
  Json terms = Json::array();
  for (VarSet d : subsets_by_size(lat.all())) {
    Lattice sub = lat.sub(d);
    Json values = Json::array();
    for (std::size_t i = 0; i < sub.size(); ++i) {
      Json mono = Json::array();
      for (auto [cell, e] : sym.term(d)[i].terms()) mono.push_back({{"cell", cell_json(lat, lat.cell_of(cell))}, {"exponent", e}});
      values.push_back({{"cell", cell_json(sub, sub.cell_of(i))}, {"value", num.term(d)[i]}, {"log_terms", mono}});
    }
    terms.push_back({{"D", varset_json(d, names)}, {"table", values}});
  }
  return {{"axes", axes_json(lat.axes())}, {"terms", terms}};
}

inline Json estimate_json(const VolumeEstimate& e) {
  Json out{{"kind", to_string(e.kind)}, {"d", e.d},         {"n", e.n},
           {"hits", e.hits},            {"fraction", e.fraction}, {"ci99", {e.ci99.lo, e.ci99.hi}},
           {"seed", e.seed}};
  if (e.constraint) out["constraint"] = to_string(*e.constraint);
  if (e.criterion_mismatches) out["criterion_mismatches"] = *e.criterion_mismatches;
  return out;
}

// ---- construction ------------------------------------------------------

inline Json mismatch_json(const MarginMismatch& m, const Lattice& shared) {
  return {{"shared", m.shared}, {"cell", cell_json(shared, m.cell)}, {"left", rational_json(m.left)}, {"right", rational_json(m.right)}};
}

// Graph JSON plus optional "axes" (binary axes named after the nodes when
// absent) and "potentials":[{"scope":[names],"values":[...]}], values
// row-major over the scope in graph node order.
inline PotentialSpec potential_spec_from_json(const Json& j, const std::string& where = "spec") {
  using namespace io_detail;
  PotentialSpec spec;
  spec.graph = graph_from_json(j, where);
  if (j.contains("axes")) {
    spec.axes = axes_from_json(j["axes"], where + ".axes");
  } else {
    spec.axes = PotentialSpec::binary_axes(spec.graph);
  }
  const Json& pots = field(j, "potentials", where);
  if (!pots.is_array()) fail(where + ".potentials", "expected an array");
  for (std::size_t i = 0; i < pots.size(); ++i) {
    std::string w = where + ".potentials[" + std::to_string(i) + "]";
    Potential p;
    VarSet scope = varset_from_json(field(pots[i], "scope", w), spec.graph.nodes(), w + ".scope");
    p.scope = scope.members();
    const Json& vals = field(pots[i], "values", w);
    if (!vals.is_array()) fail(w + ".values", "expected an array");
    for (std::size_t k = 0; k < vals.size(); ++k) p.values.push_back(rational_from_json(vals[k], w + ".values[" + std::to_string(k) + "]"));
    spec.potentials.push_back(std::move(p));
  }
  return spec;
}

inline Json product_json(const PotentialProduct& p, const UGraph& g) {
  Json per = Json::array();
  for (const auto& pv : p.per_potential) {
    Json scope = Json::array();
    for (int v : pv.scope) scope.push_back(g.nodes().at(static_cast<std::size_t>(v)));
    std::vector<Axis> axes;
    for (int v : pv.scope) axes.push_back(p.table.lattice().axis(v));
    per.push_back({{"scope", scope}, {"verdict", verdict_json(pv.verdict, Lattice(axes))}});
  }
  return {{"table", table_json(p.table)},
          {"z", rational_json(p.z)},
          {"verdict", verdict_json(p.verdict, p.table.lattice())},
          {"per_potential", per}};
}

inline Json assembly_json(const AssemblyResult& r) {
  const auto& names = r.table.lattice().names();
  Json order = Json::array();
  for (VarSet c : r.clique_order) order.push_back(varset_json(c, names));
  return {{"table", table_json(r.table)},
          {"verdict", verdict_json(r.verdict, r.table.lattice())},
          {"clique_order", order},
          {"clique_mtp2", r.clique_mtp2}};
}

// ---- conditional Gaussian ----------------------------------------------

inline Json cg_json(const CGModel& m) {
  const Lattice& lat = m.discrete();
  Json g = Json::object(), h = Json::object(), k = Json::object();
  bool shared = true;
  for (std::size_t i = 0; i < m.cells(); ++i) shared = shared && m.k()[i] == m.k()[0];
  for (std::size_t i = 0; i < m.cells(); ++i) {
    std::string key = cell_key(lat, i);
    g[key] = m.g()[i];
    std::vector<double> hv(m.h()[i].data(), m.h()[i].data() + m.h()[i].size());
    h[key] = hv;
    if (!shared) k[key] = matrix_json(m.k()[i]);
  }
  return {{"delta", axes_json(lat.axes())},
          {"gamma", m.continuous()},
          {"g", g},
          {"h", h},
          {"K", shared ? matrix_json(m.k()[0]) : k}};
}

// {"delta":[axes],"gamma":[names],"g":{cell:val},"h":{cell:[...]},
//  "K":{cell:[[...]]} or "K":[[...]]}; cell keys are comma-joined level
// labels ("" when delta is empty).
inline CGModel cg_from_json(const Json& j, const std::string& where = "cg") {
  using namespace io_detail;
  Lattice lat = rethrow_at(where, [&] { return Lattice(axes_from_json(field(j, "delta", where), where + ".delta")); });
  auto cont = as_strings(field(j, "gamma", where), where + ".gamma");
  const auto d = static_cast<Eigen::Index>(cont.size());
  std::vector<double> g(lat.size());
  std::vector<VectorXd> h(lat.size());
  std::vector<bool> seen_g(lat.size()), seen_h(lat.size());
  const Json& gj = field(j, "g", where);
  const Json& hj = field(j, "h", where);
  if (!gj.is_object() || !hj.is_object()) fail(where, "\"g\" and \"h\" must be objects keyed by cell");
  for (auto it = gj.begin(); it != gj.end(); ++it) {
    std::size_t i = lat.index_of(cell_from_key(lat, it.key(), where + ".g"));
    g[i] = as_double(it.value(), where + ".g[\"" + it.key() + "\"]");
    seen_g[i] = true;
  }
  for (auto it = hj.begin(); it != hj.end(); ++it) {
    std::string w = where + ".h[\"" + it.key() + "\"]";
    std::size_t i = lat.index_of(cell_from_key(lat, it.key(), where + ".h"));
    if (!it.value().is_array() || it.value().size() != cont.size()) fail(w, "expected one value per continuous variable");
    h[i] = VectorXd(d);
    for (Eigen::Index c = 0; c < d; ++c) h[i](c) = as_double(it.value()[static_cast<std::size_t>(c)], w);
    seen_h[i] = true;
  }
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (!seen_g[i] || !seen_h[i]) fail(where, "missing g or h for cell \"" + cell_key(lat, i) + "\"");
  std::vector<MatrixXd> k;
  const Json& kj = field(j, "K", where);
  if (kj.is_array()) {
    k.push_back(matrix_from_json(kj, where + ".K"));
  } else if (kj.is_object()) {
    k.assign(lat.size(), MatrixXd());
    std::vector<bool> seen(lat.size());
    for (auto it = kj.begin(); it != kj.end(); ++it) {
      std::size_t i = lat.index_of(cell_from_key(lat, it.key(), where + ".K"));
      k[i] = matrix_from_json(it.value(), where + ".K[\"" + it.key() + "\"]");
      seen[i] = true;
    }
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (!seen[i]) fail(where + ".K", "missing matrix for cell \"" + cell_key(lat, i) + "\"");
  } else {
    fail(where + ".K", "expected a matrix or an object of matrices");
  }
  return rethrow_at(where, [&] { return CGModel(lat, cont, g, h, k); });
}

inline Json verdict_json(const CgMtp2Verdict& v, const CGModel& m) {
  const Lattice& lat = m.discrete();
  Json fails = Json::array();
  for (const auto& f : v.failures) {
    Json o{{"condition", to_string(f.condition)}, {"group", condition_group(f.condition)}, {"value", f.value}};
    if (f.x) o["x"] = cell_json(lat, *f.x);
    if (f.y) o["y"] = cell_json(lat, *f.y);
    if (f.axis >= 0) o["axis"] = lat.axis(f.axis).name;
    if (f.condition == CgCondition::g_supermodular && !f.y) {
      // interaction route: row/col are the variable pair
      if (f.row >= 0) o["u"] = lat.axis(f.row).name;
      if (f.col >= 0) o["w"] = lat.axis(f.col).name;
    } else {
      if (f.row >= 0) o["row"] = m.continuous().at(static_cast<std::size_t>(f.row));
      if (f.col >= 0) o["col"] = m.continuous().at(static_cast<std::size_t>(f.col));
    }
    fails.push_back(o);
  }
  return {{"holds", v.holds}, {"failures", fails}};
}

inline Json report_json(const CgMomentReport& r) {
  return {{"p_mtp2", r.p_mtp2},
          {"xi_additive", r.xi_additive},
          {"xi_monotone", r.xi_monotone},
          {"sigma_constant", r.sigma_constant},
          {"sigma_nonnegative", r.sigma_nonnegative},
          {"all", r.all()}};
}

// ---- parsing entry point -----------------------------------------------

inline Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw invalid_input(where + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace totpos

#endif  // TOTPOS_IO_HPP_
