#ifndef TOTPOS_TOOLS_CLI_HPP_
#define TOTPOS_TOOLS_CLI_HPP_

// Command-line front end. run() is the whole program; main() only forwards
// argv. Exit codes: 0 property holds / result produced, 1 property fails,
// 2 usage or input error, 3 internal inconsistency (a bug).
//
// stdout receives the payload (json, csv or dot); --out writes the full
// report (json) or the rendered payload (csv, dot) atomically. Input loaders
// accept report files and unwrap their payload.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "totpos/totpos.hpp"

namespace totpos::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode { kHolds = 0, kFails = 1, kInputError = 2, kInternalError = 3 };

class usage_error : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

// ---- files -------------------------------------------------------------

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw internal_inconsistency("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temp file in the target directory, then rename.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input(path + ": cannot write file");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw invalid_input(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw invalid_input(path + ": cannot replace file");
  }
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Input {
  std::string path;
  std::string bytes;
  std::string digest;
};

// ---- rendering ---------------------------------------------------------

inline std::string table_csv(const JointTable& t) {
  std::ostringstream os;
  for (const auto& a : t.axes()) os << a.name << ',';
  os << "value\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int v = 0; v < t.rank(); ++v) os << t.lattice().axis(v).levels[static_cast<std::size_t>(t.lattice().coordinate(i, v))] << ',';
    os << to_string(t[i]) << '\n';
  }
  return os.str();
}

inline std::string estimate_csv(const VolumeEstimate& e) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "kind,d,n,hits,fraction,ci99_lo,ci99_hi,seed,constraint,criterion_mismatches\n";
  os << to_string(e.kind) << ',' << e.d << ',' << e.n << ',' << e.hits << ',' << e.fraction << ',' << e.ci99.lo << ','
     << e.ci99.hi << ',' << e.seed << ',' << (e.constraint ? to_string(*e.constraint) : "") << ','
     << (e.criterion_mismatches ? std::to_string(*e.criterion_mismatches) : "") << '\n';
  return os.str();
}

// What a command produced: the JSON payload plus optional csv/dot views.
struct Outcome {
  Json payload;
  int code = kHolds;
  std::optional<std::string> csv, dot;
};

// ---- context -----------------------------------------------------------

struct Context {
  std::vector<std::string> argv;
  std::string format = "json";
  std::string out_path;
  std::vector<Input> inputs;
  std::ostream* out;

  const Input& load(const std::string& path) {
    if (path.empty()) throw usage_error("an input file is required (--in)");
    Input in{path, read_file(path), {}};
    in.digest = sha256_hex(in.bytes);
    inputs.push_back(std::move(in));
    return inputs.back();
  }

  // JSON document, unwrapping a report written by --out.
  Json load_json(const std::string& path) {
    const Input& in = load(path);
    Json j = parse_json(in.bytes, path);
    if (j.is_object() && j.contains("payload") && j.value("tool", "") == "totpos") {
      Json p = j["payload"];
      // verdict payloads embed their subject under a known key
      for (const char* key : {"table", "model", "graph", "cg"})
        if (p.is_object() && p.contains(key) && !p.contains("axes") && !p.contains("nodes")) return p[key];
      return p;
    }
    return j;
  }

  JointTable load_table(const std::string& path) {
    if (ends_with(path, ".csv")) {
      const Input& in = load(path);
      std::istringstream is(in.bytes);
      return table_from_csv(is, path);
    }
    return table_from_json(load_json(path), path);
  }

  GaussianModel load_gaussian(const std::string& path, const std::string& csv_kind) {
    if (ends_with(path, ".csv")) {
      const Input& in = load(path);
      std::istringstream is(in.bytes);
      auto [names, m] = matrix_from_csv(is, path);
      return csv_kind == "kappa" ? GaussianModel::from_kappa(names, m) : GaussianModel::from_sigma(names, m);
    }
    return gaussian_from_json(load_json(path), path);
  }
};

inline std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json make_report(const Context& ctx, const Outcome& o) {
  Json inputs = Json::array();
  for (const auto& in : ctx.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.digest}});
  return {{"tool", "totpos"},
          {"version", kToolVersion},
          {"command", ctx.argv},
          {"inputs", inputs},
          {"generated_at", utc_now()},
          {"exit_code", o.code},
          {"payload", o.payload}};
}

inline void emit(Context& ctx, const Outcome& o) {
  std::string rendered;
  if (ctx.format == "json") {
    rendered = o.payload.dump(2) + "\n";
  } else if (ctx.format == "csv") {
    if (!o.csv) throw usage_error("--format csv is not available for this command");
    rendered = *o.csv;
  } else {
    if (!o.dot) throw usage_error("--format dot is not available for this command");
    rendered = *o.dot;
  }
  if (!ctx.out_path.empty()) write_atomic(ctx.out_path, ctx.format == "json" ? make_report(ctx, o).dump(2) + "\n" : rendered);
  *ctx.out << rendered;
}

inline Outcome verdict_outcome(Json payload, bool holds) {
  Outcome o;
  o.payload = std::move(payload);
  o.code = holds ? kHolds : kFails;
  return o;
}

// ---- commands ----------------------------------------------------------

struct Options {
  std::string in, second, graph_path, method = "full", axiom, kind, constraint, name, route = "both", csv_kind = "sigma";
  std::vector<std::string> marginals, set_a, set_b, set_s;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  int d = 0;
  std::uint64_t n = 0;
  std::optional<unsigned> threads;
};

inline Outcome cmd_check_mtp2(Context& ctx, const Options& o) {
  JointTable t = ctx.load_table(o.in);
  Json payload{{"table", table_json(t)}};
  bool holds = false;
  if (o.method == "gamma" || o.method == "binary-interactions") {
    if (std::any_of(t.values().begin(), t.values().end(), [](const Rational& v) { return v == 0; }))
      throw precondition_error("interaction criteria need a strictly positive table; use --method full");
    auto e = expand(t);
    GammaVerdict v = o.method == "gamma" ? check_mtp2_via_gamma(e, t) : check_mtp2_binary_interactions(e, SymbolicSign{&t});
    payload["verdict"] = verdict_json(v, t.lattice());
    holds = v.holds;
  } else if (o.method == "full" || o.method == "pairwise") {
    if (o.tolerance) {
      FloatTable f = to_float(t);
      Compare<double> cmp{*o.tolerance, 0.0};
      auto v = o.method == "full" ? check_mtp2_full(f, cmp) : check_mtp2_pairwise(f, cmp);
      payload["verdict"] = verdict_json(v, t.lattice());
      holds = v.holds;
    } else {
      auto v = o.method == "full" ? check_mtp2_full(t) : check_mtp2_pairwise(t);
      payload["verdict"] = verdict_json(v, t.lattice());
      holds = v.holds;
    }
  } else {
    throw usage_error("unknown --method '" + o.method + "'");
  }
  SupportSet s = support_analysis(t);
  payload["support"] = {{"cells", s.cells.size()}, {"interval", to_string(s.interval)}, {"cw_connected", to_string(s.cw_connected)}};
  return verdict_outcome(std::move(payload), holds);
}

inline Outcome cmd_check_gauss(Context& ctx, const Options& o) {
  GaussianModel m = ctx.load_gaussian(o.in, o.csv_kind);
  MMatrixVerdict v = check_gaussian_mtp2(m, o.tolerance);
  Json partials = matrix_json(partial_correlations(m.kappa()));
  return verdict_outcome({{"model", gaussian_json(m)}, {"verdict", verdict_json(v, m.names())}, {"partial_correlations", partials}},
                         v.holds);
}

inline Outcome cmd_check_cg(Context& ctx, const Options& o) {
  CGModel m = cg_from_json(ctx.load_json(o.in), o.in);
  CgMtp2Verdict canonical = check_cg_mtp2(m);
  Json payload{{"cg", cg_json(m)}, {"verdict", verdict_json(canonical, m)}};
  if (o.route == "loglinear" || o.route == "both") {
    CgMtp2Verdict ll = check_cg_mtp2_loglinear(m);
    if (ll.holds != canonical.holds) throw internal_inconsistency("canonical and interaction CG criteria disagree");
    payload["loglinear_verdict"] = verdict_json(ll, m);
  } else if (o.route != "canonical") {
    throw usage_error("unknown --route '" + o.route + "'");
  }
  payload["moment_conditions"] = report_json(check_cg_moment_necessary(m));
  return verdict_outcome(std::move(payload), canonical.holds);
}

inline IndependenceModel model_or_derived(Context& ctx, const std::string& path) {
  Json j = ctx.load_json(path);
  if (j.is_object() && j.contains("V")) return model_from_json(j, path);
  return derive_model(table_from_json(j, path));
}

inline Outcome cmd_check_axiom(Context& ctx, const Options& o) {
  IndependenceModel m = model_or_derived(ctx, o.in);
  std::vector<Axiom> axioms;
  if (o.axiom.empty() || o.axiom == "all") {
    for (int a = 1; a <= 8; ++a) axioms.push_back(static_cast<Axiom>(a));
  } else {
    axioms.push_back(parse_axiom(o.axiom));
  }
  Json reports = Json::array();
  bool holds = true;
  for (Axiom a : axioms) {
    AxiomReport r = check_axiom(m, a);
    holds = holds && r.holds;
    reports.push_back(report_json(r, m.names()));
  }
  return verdict_outcome({{"model", model_json(m)}, {"holds", holds}, {"axioms", reports}}, holds);
}

inline Outcome cmd_check_faithful(Context& ctx, const Options& o) {
  JointTable t = ctx.load_table(o.in);
  FaithfulnessVerdict v = check_faithful(t);
  Outcome out = verdict_outcome({{"verdict", verdict_json(v)}}, v.holds);
  out.dot = to_dot(v.graph);
  return out;
}

inline Outcome cmd_check_betweenness(Context& ctx, const Options& o) {
  JointTable t = ctx.load_table(o.in);
  BetweennessReport r = check_causal_betweenness(t);
  return verdict_outcome({{"report", report_json(r)}}, r.betweenness);
}

inline Outcome cmd_derive_model(Context& ctx, const Options& o) {
  JointTable t = ctx.load_table(o.in);
  Outcome out;
  out.payload = model_json(derive_model(t));
  return out;
}

inline Outcome cmd_derive_graph(Context& ctx, const Options& o) {
  Json j = ctx.load_json(o.in);
  UGraph g;
  if (j.is_object() && j.contains("variables")) {
    g = concentration_graph(gaussian_from_json(j, o.in), o.tolerance);
  } else {
    g = pairwise_graph(table_from_json(j, o.in));
  }
  Outcome out;
  out.payload = graph_json(g);
  out.dot = to_dot(g);
  return out;
}

inline Outcome cmd_expand(Context& ctx, const Options& o) {
  JointTable t = ctx.load_table(o.in);
  if (std::any_of(t.values().begin(), t.values().end(), [](const Rational& v) { return v == 0; }))
    throw precondition_error("the interaction expansion needs a strictly positive table");
  auto e = expand(t);
  Outcome out;
  out.payload = expansion_json(e, evaluate(e, t));
  return out;
}

inline Outcome cmd_build_combine(Context& ctx, const Options& o) {
  JointTable a = ctx.load_table(o.in), b = ctx.load_table(o.second);
  CombineOptions opt{o.tolerance};
  JointTable c = markov_combination(a, b, opt);
  Mtp2Verdict v = check_mtp2_full(c);
  Outcome out = verdict_outcome({{"table", table_json(c)}, {"verdict", verdict_json(v, c.lattice())}}, v.holds);
  out.csv = table_csv(c);
  return out;
}

inline Outcome cmd_build_potentials(Context& ctx, const Options& o) {
  PotentialSpec spec = potential_spec_from_json(ctx.load_json(o.in), o.in);
  PotentialProduct p = from_potentials(spec);
  Outcome out = verdict_outcome(product_json(p, spec.graph), p.verdict.holds);
  out.csv = table_csv(p.table);
  return out;
}

inline Outcome cmd_build_assemble(Context& ctx, const Options& o) {
  UGraph g = graph_from_json(ctx.load_json(o.graph_path), o.graph_path);
  std::vector<JointTable> margins;
  for (const auto& m : o.marginals) margins.push_back(ctx.load_table(m));
  AssemblyResult r = assemble_decomposable(g, margins);
  Outcome out = verdict_outcome(assembly_json(r), r.verdict.holds);
  out.csv = table_csv(r.table);
  return out;
}

inline Outcome cmd_sample_volume(Context&, const Options& o) {
  if (!o.seed) throw usage_error("randomized commands require --seed");
  unsigned threads = o.threads.value_or(worker_count());
  VolumeEstimate e;
  if (o.constraint.empty()) {
    e = estimate_mtp2_fraction(parse_volume_kind(o.kind), o.d, o.n, *o.seed, threads);
  } else {
    CIConstraint c = parse_ci_constraint(o.constraint);
    if (o.d != 0 && o.d != 3) throw usage_error("constrained families are three-dimensional");
    e = parse_volume_kind(o.kind) == VolumeKind::gaussian ? constrained_fraction_gaussian(c, o.n, *o.seed, threads)
                                                          : constrained_fraction_binary(c, o.n, *o.seed, threads);
  }
  Outcome out;
  out.payload = estimate_json(e);
  out.csv = estimate_csv(e);
  return out;
}

inline Outcome cmd_data_list(Context&, const Options&) {
  Json list = Json::array();
  for (const auto& n : dataset_names()) list.push_back({{"name", n}, {"description", bundled_data(n).description}});
  Outcome out;
  out.payload = list;
  std::string csv = "name,description\n";
  for (const auto& n : dataset_names()) csv += n + "," + bundled_data(n).description + "\n";
  out.csv = csv;
  return out;
}

inline Outcome cmd_data_show(Context&, const Options& o) {
  Dataset d = bundled_data(o.name);
  Outcome out;
  if (const auto* t = std::get_if<JointTable>(&d.value)) {
    out.payload = table_json(*t);
    out.csv = table_csv(*t);
  } else {
    const auto& m = std::get<GaussianModel>(d.value);
    out.payload = gaussian_json(m);
  }
  return out;
}

inline Outcome cmd_graph_separates(Context& ctx, const Options& o) {
  UGraph g = graph_from_json(ctx.load_json(o.in), o.in);
  auto set = [&](const std::vector<std::string>& names) {
    VarSet s;
    for (const auto& n : names) s = s | VarSet::single(g.index_of(n));
    return s;
  };
  VarSet a = set(o.set_a), b = set(o.set_b), s = set(o.set_s);
  if (a.empty() || b.empty()) throw usage_error("--a and --b need at least one node each");
  if (!(a & b).empty() || !(a & s).empty() || !(b & s).empty()) throw invalid_input("--a, --b and --s must be disjoint");
  bool sep = separates(g, a, b, s);
  return verdict_outcome({{"separates", sep}, {"A", o.set_a}, {"B", o.set_b}, {"S", o.set_s}}, sep);
}

// ---- driver ------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"totpos: verification and construction of MTP2 distributions", "totpos"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;
  Context ctx;
  ctx.argv = args;
  ctx.out = &out;
  std::function<Outcome(Context&, const Options&)> action;

  auto common = [&](CLI::App* c, bool needs_in = true) {
    if (needs_in) c->add_option("--in", o.in, "input file (json, csv, or a report)")->required();
    c->add_option("--out", ctx.out_path, "write the report (or csv/dot rendering) here");
    c->add_option("--format", ctx.format, "stdout/--out format")->check(CLI::IsMember({"json", "csv", "dot"}));
  };
  auto leaf = [&](CLI::App* parent, const char* name, const char* desc, auto fn) {
    CLI::App* c = parent->add_subcommand(name, desc);
    c->callback([&action, fn] { action = fn; });
    return c;
  };

  CLI::App* check = app.add_subcommand("check", "verify a property")->require_subcommand(1);
  {
    auto* c = leaf(check, "mtp2", "MTP2 check of a discrete table", cmd_check_mtp2);
    common(c);
    c->add_option("--method", o.method, "full | pairwise | gamma | binary-interactions");
    c->add_option("--tolerance", o.tolerance, "relative float tolerance (exact rationals when omitted)");
  }
  {
    auto* c = leaf(check, "gauss", "M-matrix check of a Gaussian model", cmd_check_gauss);
    common(c);
    c->add_option("--tolerance", o.tolerance, "absolute tolerance on entries");
    c->add_option("--matrix", o.csv_kind, "meaning of a csv matrix")->check(CLI::IsMember({"sigma", "kappa"}));
  }
  {
    auto* c = leaf(check, "cg", "MTP2 check of a conditional Gaussian model", cmd_check_cg);
    common(c);
    c->add_option("--route", o.route, "canonical | loglinear | both");
  }
  {
    auto* c = leaf(check, "axiom", "independence-model axioms S1..S8", cmd_check_axiom);
    common(c);
    c->add_option("--axiom", o.axiom, "S1..S8 or all");
  }
  common(leaf(check, "faithful", "faithfulness to the pairwise graph", cmd_check_faithful));
  common(leaf(check, "betweenness", "causal betweenness of three binary events", cmd_check_betweenness));

  CLI::App* derive = app.add_subcommand("derive", "derive a model or graph")->require_subcommand(1);
  common(leaf(derive, "model", "independence model of a table", cmd_derive_model));
  {
    auto* c = leaf(derive, "graph", "pairwise / concentration graph", cmd_derive_graph);
    common(c);
    c->add_option("--tolerance", o.tolerance, "zero threshold for concentration entries");
  }

  common(leaf(&app, "expand", "log-linear interaction expansion", cmd_expand));

  CLI::App* build = app.add_subcommand("build", "construct distributions")->require_subcommand(1);
  {
    auto* c = leaf(build, "combine", "Markov combination of two tables", cmd_build_combine);
    common(c);
    c->add_option("--second", o.second, "second table")->required();
    c->add_option("--tolerance", o.tolerance, "accept shared margins within this absolute difference");
  }
  common(leaf(build, "potentials", "product of clique potentials", cmd_build_potentials));
  {
    auto* c = leaf(build, "assemble", "decomposable model from clique marginals", cmd_build_assemble);
    common(c, false);
    c->add_option("--graph", o.graph_path, "graph json")->required();
    c->add_option("--marginals", o.marginals, "clique marginal tables")->required();
  }

  CLI::App* sample = app.add_subcommand("sample", "Monte Carlo estimates")->require_subcommand(1);
  {
    auto* c = leaf(sample, "volume", "fraction of MTP2 distributions", cmd_sample_volume);
    common(c, false);
    c->add_option("--kind", o.kind, "gaussian | binary")->required();
    c->add_option("--d", o.d, "dimension");
    c->add_option("--n", o.n, "sample count")->required();
    c->add_option("--seed", o.seed, "random seed (required)");
    c->add_option("--constraint", o.constraint, "one-ci | two-ci | independence");
    c->add_option("--threads", o.threads, "worker threads (default TOTPOS_THREADS or all cores)");
  }

  CLI::App* data = app.add_subcommand("data", "bundled datasets")->require_subcommand(1);
  common(leaf(data, "list", "list datasets", cmd_data_list), false);
  {
    auto* c = leaf(data, "show", "print a dataset", cmd_data_show);
    common(c, false);
    c->add_option("--name", o.name, "dataset name")->required();
  }

  CLI::App* graph = app.add_subcommand("graph", "graph operations")->require_subcommand(1);
  {
    auto* c = leaf(graph, "derive", "pairwise / concentration graph", cmd_derive_graph);
    common(c);
    c->add_option("--tolerance", o.tolerance, "zero threshold for concentration entries");
  }
  {
    auto* c = leaf(graph, "separates", "does S separate A from B", cmd_graph_separates);
    common(c);
    c->add_option("--a", o.set_a, "first node set")->required();
    c->add_option("--b", o.set_b, "second node set")->required();
    c->add_option("--s", o.set_s, "separating set");
  }
  common(leaf(graph, "faithful", "faithfulness to the pairwise graph", cmd_check_faithful));

  std::vector<const char*> argv{"totpos"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    Outcome result = action(ctx, o);
    emit(ctx, result);
    return result.code;
  } catch (const internal_inconsistency& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const totpos::error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace totpos::cli

#endif  // TOTPOS_TOOLS_CLI_HPP_
