#include "edsl/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "edsl/errors.hpp"
#include "edsl/factorize.hpp"
#include "edsl/kernel.hpp"
#include "edsl/oracle.hpp"
#include "edsl/spectrum.hpp"

namespace edsl::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& ptr) { throw InvalidInput(what, ptr); }

void allow_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail("expected an object", ptr.empty() ? "/" : ptr);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      fail("unknown key '" + it.key() + "'", ptr + "/" + it.key());
  }
}

double get_real(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail("expected a number", ptr);
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail("expected a finite number", ptr);
  return v;
}

double get_positive(const json& j, const std::string& ptr) {
  const double v = get_real(j, ptr);
  if (!(v > 0.0)) fail("expected a positive number", ptr);
  return v;
}

int get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail("expected an integer", ptr);
  return j.get<int>();
}

cplx get_complex(const json& j, const std::string& ptr) {
  if (j.is_number()) return get_real(j, ptr);
  if (!j.is_object()) fail("expected a number or {\"re\", \"im\"}", ptr);
  allow_keys(j, ptr, {"re", "im"});
  if (!j.contains("re")) fail("missing 're'", ptr + "/re");
  const double re = get_real(j["re"], ptr + "/re");
  const double im = j.contains("im") ? get_real(j["im"], ptr + "/im") : 0.0;
  return {re, im};
}

template <class T, class F>
std::vector<T> get_list(const json& j, const std::string& ptr, F item) {
  if (!j.is_array()) fail("expected an array", ptr);
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

PotentialTerm parse_term(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail("expected a term object", ptr);
  if (!j.contains("type") || !j["type"].is_string()) fail("missing term type", ptr + "/type");
  const std::string type = j["type"];
  try {
    if (type == "poly") {
      allow_keys(j, ptr, {"type", "coefficients"});
      if (!j.contains("coefficients")) fail("missing coefficients", ptr + "/coefficients");
      return make_poly(get_list<cplx>(j["coefficients"], ptr + "/coefficients", get_complex));
    }
    if (type == "grid") {
      allow_keys(j, ptr, {"type", "nodes", "values"});
      if (!j.contains("nodes")) fail("missing nodes", ptr + "/nodes");
      if (!j.contains("values")) fail("missing values", ptr + "/values");
      return make_grid(get_list<double>(j["nodes"], ptr + "/nodes", get_real),
                       get_list<cplx>(j["values"], ptr + "/values", get_complex));
    }
    if (type == "step" || type == "log") {
      const char* amp = type == "step" ? "jump" : "strength";
      allow_keys(j, ptr, {"type", "x0", amp});
      if (!j.contains("x0")) fail("missing x0", ptr + "/x0");
      if (!j.contains(amp)) fail(std::string("missing ") + amp, ptr + "/" + amp);
      const double x0 = get_real(j["x0"], ptr + "/x0");
      const cplx a = get_complex(j[amp], ptr + "/" + amp);
      return type == "step" ? make_step(x0, a) : make_log(x0, a);
    }
  } catch (const InvalidInput& e) {
    // term constructors name bare fields
    if (!e.field().empty() && e.field().front() != '/') fail(e.what(), ptr + "/" + e.field());
    throw;
  }
  fail("unknown term type '" + type + "'", ptr + "/type");
}

json term_json(const PotentialTerm& t) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PolyTerm>) {
          json c = json::array();
          for (cplx z : v.coefficients) c.push_back(complex_json(z));
          return {{"type", "poly"}, {"coefficients", c}};
        } else if constexpr (std::is_same_v<T, GridTerm>) {
          json vals = json::array();
          for (cplx z : v.values) vals.push_back(complex_json(z));
          return {{"type", "grid"}, {"nodes", v.nodes}, {"values", vals}};
        } else if constexpr (std::is_same_v<T, StepTerm>) {
          return {{"type", "step"}, {"x0", v.x0}, {"jump", complex_json(v.jump)}};
        } else {
          return {{"type", "log"}, {"x0", v.x0}, {"strength", complex_json(v.strength)}};
        }
      },
      t);
}

json config_json(const RunConfig& c) {
  json j;
  j["p"] = json::array();
  for (const auto& t : c.p) j["p"].push_back(term_json(t));
  j["r"] = json::array();
  for (const auto& t : c.r) j["r"].push_back(term_json(t));
  j["bc"] = c.bc == BoundaryCondition::dirichlet ? "dirichlet" : "mixed";
  j["h"] = complex_json(c.h);
  const SolverSettings& s = c.solver;
  j["solver"] = {{"tol", s.tol},
                 {"lambda_switch", s.lambda_switch},
                 {"pruefer_tol", s.pruefer_tol},
                 {"accept_margin", s.accept_margin},
                 {"tau_max", s.tau_max},
                 {"contour_tol", s.contour_tol}};
  const TaskSettings& t = c.task;
  json tests = json::array();
  for (cplx z : t.lambda_tests) tests.push_back(complex_json(z));
  j["task"] = {{"n_range", {t.n_min, t.n_max}},
               {"N_list", t.N_list},
               {"lambda_tests", tests},
               {"M_list", t.M_list},
               {"chain", {{"lambda", complex_json(t.chain_lambda)}, {"m", t.chain_m}}}};
  j["output"] = {{"format", c.format}, {"path", c.out}};
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json extra = json::object();
  std::string summary;
  cplx shift = 0.0;
};

std::string csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt(row[i]);
    s += '\n';
  }
  return s;
}

std::string json_artifact(const std::string& command, const Table& t) {
  json j;
  j["command"] = command;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  if (!t.extra.empty()) j["extra"] = t.extra;
  return j.dump(2) + "\n";
}

PrueferOptions pruefer_options(const SolverSettings& s) {
  PrueferOptions o;
  o.tol = s.pruefer_tol;
  o.accept_margin = s.accept_margin;
  o.tau_max = s.tau_max;
  return o;
}

SpectrumOptions spectrum_options(const SolverSettings& s) {
  SpectrumOptions o;
  o.tol = s.tol;
  o.contour_tol = s.contour_tol;
  return o;
}

void require_range(const TaskSettings& t) {
  if (t.n_min > t.n_max) fail("n_range must be ordered", "/task/n_range");
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

Table cmd_spectrum(const RunConfig& c, bool with_eigenfunctions) {
  require_range(c.task);
  const Problem problem = c.problem();
  const auto ctx = make_context(problem, c.solver.tol, pruefer_options(c.solver));
  SpectrumReport rep = compute_spectrum(*ctx, c.task.n_min, c.task.n_max, spectrum_options(c.solver));
  norming_constants(*ctx, rep.eigenvalues);
  Table t;
  t.shift = rep.shift;
  double max_rem = 0.0, max_res = 0.0;
  if (with_eigenfunctions) {
    eigenfunction_asymptotics(*ctx, rep.eigenvalues);
    t.columns = {"n", "re_lambda", "im_lambda", "re_alpha", "im_alpha", "outside_theorem", "eigenfunction_residual"};
  } else {
    t.columns = {"n", "re_lambda", "im_lambda", "re_remainder", "im_remainder", "multiplicity", "re_alpha", "im_alpha"};
  }
  for (const auto& e : rep.eigenvalues) {
    const cplx a = e.norming.value_or(cplx(NAN, NAN));
    max_rem = std::max(max_rem, std::abs(e.remainder));
    max_res = std::max(max_res, e.eigenfunction_residual);
    if (with_eigenfunctions)
      t.rows.push_back({double(e.n), e.lambda.real(), e.lambda.imag(), a.real(), a.imag(), e.outside_theorem ? 1.0 : 0.0,
                        e.eigenfunction_residual});
    else
      t.rows.push_back({double(e.n), e.lambda.real(), e.lambda.imag(), e.remainder.real(), e.remainder.imag(),
                        double(e.multiplicity), a.real(), a.imag()});
  }
  t.extra["p0"] = complex_json(rep.p0);
  json w = json::array();
  for (const auto& s : rep.l2_windows) w.push_back({{"N", s.N}, {"value", s.value}});
  t.extra["l2_windows"] = w;
  std::ostringstream os;
  if (with_eigenfunctions)
    os << "norming: " << t.rows.size() << " eigenvalues, max eigenfunction residual " << max_res;
  else
    os << "spectrum: " << t.rows.size() << " eigenvalues, max |remainder| " << max_rem;
  t.summary = os.str();
  return t;
}

Table cmd_charfn(const RunConfig& c) {
  const Problem problem = c.problem();
  const DiracPotential dp = make_dirac(problem, pruefer_options(c.solver));
  CharOptions o;
  o.tol = c.solver.tol;
  o.lambda_switch = c.solver.lambda_switch;
  const CharFunction f = characteristic_function(problem, dp, o);
  Table t;
  t.columns = {"re_lambda", "im_lambda", "re_value", "im_value", "re_derivative", "im_derivative"};
  for (cplx z : c.task.lambda_tests) {
    const CharValue v = f(z);
    t.rows.push_back({z.real(), z.imag(), v.value.real(), v.value.imag(), v.derivative.real(), v.derivative.imag()});
  }
  t.summary = "charfn: " + std::to_string(t.rows.size()) + " points";
  return t;
}

Table cmd_factor(const RunConfig& c) {
  if (c.task.N_list.empty()) fail("N_list must not be empty", "/task/N_list");
  const int Nmax = *std::max_element(c.task.N_list.begin(), c.task.N_list.end());
  if (Nmax < 1) fail("N_list entries must be positive", "/task/N_list");
  const Problem problem = c.problem();
  const auto ctx = make_context(problem, c.solver.tol, pruefer_options(c.solver));
  const SpectrumReport rep = compute_spectrum(*ctx, -Nmax - 3, Nmax + 3, spectrum_options(c.solver));
  const ProductDiagnostics d = product_report(problem, eigen_table(rep), c.task.lambda_tests, c.task.N_list, c.solver.tol);
  Table t;
  t.shift = rep.shift;
  t.columns = {"re_lambda_test", "im_lambda_test", "N", "re_product", "im_product", "re_reference", "im_reference",
               "rel_error"};
  for (std::size_t k = 0; k < d.tests.size(); ++k)
    for (std::size_t i = 0; i < d.N_list.size(); ++i) {
      const cplx v = d.values[i][k], ref = d.reference[k];
      t.rows.push_back({d.tests[k].real(), d.tests[k].imag(), double(d.N_list[i]), v.real(), v.imag(), ref.real(),
                        ref.imag(), d.rel_error[i][k]});
    }
  t.extra["product_case"] = case_tag(d.product_case);
  double worst = 0.0;
  for (double e : d.rel_error.back()) worst = std::max(worst, e);
  std::ostringstream os;
  os << "factor-check: " << d.tests.size() << " test points, max rel_error at N=" << d.N_list.back() << " " << worst
     << " (" << case_tag(d.product_case) << ")";
  t.summary = os.str();
  return t;
}

Table cmd_kernel(const RunConfig& c) {
  if (c.task.N_list.empty()) fail("N_list must not be empty", "/task/N_list");
  const Problem problem = c.problem();
  const DiracPotential dp = make_dirac(problem, pruefer_options(c.solver));
  Table t;
  t.columns = {"re_lambda", "im_lambda", "N", "tail", "bound", "defect"};
  int over = 0;
  for (cplx z : c.task.lambda_tests)
    for (int N : c.task.N_list) {
      if (N < 0) fail("N_list entries must be non-negative", "/task/N_list");
      const RepresentationCheck rc = verify_representation(dp, z, N, KernelRoute::neumann, c.solver.tol);
      if (rc.defect > rc.bound + 10.0 * c.solver.tol) ++over;
      t.rows.push_back({z.real(), z.imag(), double(N), rc.tail, rc.bound, rc.defect});
    }
  t.summary = "kernel-check: " + std::to_string(t.rows.size()) + " rows, " + std::to_string(over) + " above bound";
  return t;
}

Table cmd_chain(const RunConfig& c) {
  const Problem problem = c.problem();
  const ChainReport rep = associated_chain(problem, c.task.chain_lambda, c.task.chain_m, c.solver.tol);
  Table t;
  t.columns = {"j", "residual", "boundary_defect"};
  for (int j = 0; j < rep.m; ++j) t.rows.push_back({double(j), rep.residuals[j], rep.boundary_defects[j]});
  t.extra["next_defect"] = rep.next_defect;
  std::ostringstream os;
  os << "chain-check: m=" << rep.m << ", max residual " << max_of(rep.residuals) << ", next defect "
     << rep.next_defect;
  t.summary = os.str();
  return t;
}

Table cmd_oracle(const RunConfig& c) {
  require_range(c.task);
  if (c.task.M_list.size() < 2) fail("M_list needs at least two grids", "/task/M_list");
  const Problem problem = c.problem();
  const OracleComparison oc = oracle_compare(problem, c.task.n_min, c.task.n_max, c.task.M_list,
                                             spectrum_options(c.solver));
  Table t;
  t.columns = {"n", "M", "re_solver", "im_solver", "re_oracle", "im_oracle", "diff"};
  for (const auto& r : oc.rows)
    t.rows.push_back({double(r.n), double(r.M), r.solver.real(), r.solver.imag(), r.oracle.real(), r.oracle.imag(),
                      r.diff});
  t.extra["observed_order"] = oc.observed_order;
  std::ostringstream os;
  os << "oracle-compare: " << oc.rows.size() << " rows, max diff finest " << oc.max_diff_finest << ", extrapolated "
     << oc.max_diff_extrapolated;
  t.summary = os.str();
  return t;
}

Table dispatch(const std::string& command, const RunConfig& c) {
  if (command == "spectrum") return cmd_spectrum(c, false);
  if (command == "norming") return cmd_spectrum(c, true);
  if (command == "charfn") return cmd_charfn(c);
  if (command == "factor-check") return cmd_factor(c);
  if (command == "kernel-check") return cmd_kernel(c);
  if (command == "chain-check") return cmd_chain(c);
  if (command == "oracle-compare") return cmd_oracle(c);
  fail("unknown command '" + command + "'", "command");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path, "out");
  f << text;
  if (!f) throw InvalidInput("cannot write " + path, "out");
}

}  // namespace

Problem RunConfig::problem() const { return Problem(Potential(p), Potential(r), bc, h); }

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what(), "/");
  }
  allow_keys(j, "", {"p", "r", "bc", "h", "solver", "task", "output"});
  RunConfig c;
  if (j.contains("p")) c.p = get_list<PotentialTerm>(j["p"], "/p", parse_term);
  if (j.contains("r")) c.r = get_list<PotentialTerm>(j["r"], "/r", parse_term);
  if (j.contains("bc")) {
    const json& b = j["bc"];
    if (b == "dirichlet") c.bc = BoundaryCondition::dirichlet;
    else if (b == "mixed") c.bc = BoundaryCondition::mixed;
    else fail("bc must be \"dirichlet\" or \"mixed\"", "/bc");
  }
  if (j.contains("h")) c.h = get_complex(j["h"], "/h");
  if (j.contains("solver")) {
    const json& s = j["solver"];
    allow_keys(s, "/solver", {"tol", "lambda_switch", "pruefer_tol", "accept_margin", "tau_max", "contour_tol"});
    SolverSettings& o = c.solver;
    if (s.contains("tol")) o.tol = get_positive(s["tol"], "/solver/tol");
    if (s.contains("lambda_switch")) o.lambda_switch = get_positive(s["lambda_switch"], "/solver/lambda_switch");
    if (s.contains("pruefer_tol")) o.pruefer_tol = get_positive(s["pruefer_tol"], "/solver/pruefer_tol");
    if (s.contains("accept_margin")) o.accept_margin = get_positive(s["accept_margin"], "/solver/accept_margin");
    if (s.contains("tau_max")) o.tau_max = get_positive(s["tau_max"], "/solver/tau_max");
    if (s.contains("contour_tol")) o.contour_tol = get_positive(s["contour_tol"], "/solver/contour_tol");
    if (o.tol >= 1e-2) fail("tol must be below 1e-2", "/solver/tol");
    if (o.accept_margin >= 1.0) fail("accept_margin must be below 1", "/solver/accept_margin");
  }
  if (j.contains("task")) {
    const json& t = j["task"];
    allow_keys(t, "/task", {"n_range", "N_list", "lambda_tests", "M_list", "chain"});
    TaskSettings& o = c.task;
    if (t.contains("n_range")) {
      const auto r = get_list<int>(t["n_range"], "/task/n_range", get_int);
      if (r.size() != 2) fail("n_range needs two integers", "/task/n_range");
      if (r[0] > r[1]) fail("n_range must be ordered", "/task/n_range");
      o.n_min = r[0];
      o.n_max = r[1];
    }
    if (t.contains("N_list")) {
      o.N_list = get_list<int>(t["N_list"], "/task/N_list", get_int);
      for (std::size_t i = 0; i < o.N_list.size(); ++i)
        if (o.N_list[i] < 0 || (i && o.N_list[i] <= o.N_list[i - 1]))
          fail("N_list must be non-negative and strictly increasing", "/task/N_list/" + std::to_string(i));
    }
    if (t.contains("lambda_tests")) o.lambda_tests = get_list<cplx>(t["lambda_tests"], "/task/lambda_tests", get_complex);
    if (t.contains("M_list")) {
      o.M_list = get_list<int>(t["M_list"], "/task/M_list", get_int);
      for (std::size_t i = 0; i < o.M_list.size(); ++i)
        if (o.M_list[i] < 3 || o.M_list[i] > 2000 || (i && o.M_list[i] <= o.M_list[i - 1]))
          fail("M_list must be strictly increasing within [3, 2000]", "/task/M_list/" + std::to_string(i));
    }
    if (t.contains("chain")) {
      const json& ch = t["chain"];
      allow_keys(ch, "/task/chain", {"lambda", "m"});
      if (ch.contains("lambda")) o.chain_lambda = get_complex(ch["lambda"], "/task/chain/lambda");
      if (ch.contains("m")) {
        o.chain_m = get_int(ch["m"], "/task/chain/m");
        if (o.chain_m < 1 || o.chain_m > 3) fail("chain length must be 1, 2 or 3", "/task/chain/m");
      }
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    allow_keys(o, "/output", {"format", "path"});
    if (o.contains("format")) {
      if (o["format"] != "csv" && o["format"] != "json") fail("format must be \"csv\" or \"json\"", "/output/format");
      c.format = o["format"];
    }
    if (o.contains("path")) {
      if (!o["path"].is_string()) fail("expected a string", "/output/path");
      c.out = o["path"];
    }
  }
  try {
    (void)c.problem();
  } catch (const InvalidInput& e) {
    fail(e.what(), "/" + e.field());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot read config " + path, "config");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : config_json(config).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"spectrum",    "charfn",         "factor-check", "kernel-check",
                                          "chain-check", "oracle-compare", "norming"};
  return c;
}

int run(const std::string& command, const RunConfig& config, const RunOptions& opt, std::ostream& out,
        std::ostream& err) {
  try {
    const std::string format = opt.format.value_or(config.format);
    if (format != "csv" && format != "json") fail("format must be csv or json", "format");
    std::string path = opt.out.value_or(config.out);
    if (path.empty()) path = command + "." + format;
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      fail("unknown command '" + command + "'", "command");
    if (opt.verbose) err << "config hash " << config_hash(config) << ", output " << path << "\n";

    const Table t = dispatch(command, config);
    write_file(path, format == "csv" ? csv(t) : json_artifact(command, t));
    json meta;
    meta["command"] = command;
    meta["config_hash"] = config_hash(config);
    meta["format"] = format;
    meta["columns"] = t.columns;
    meta["rows"] = t.rows.size();
    meta["tolerances"] = config_json(config)["solver"];
    meta["shift"] = complex_json(t.shift);
    meta["summary"] = t.summary;
    if (!t.extra.empty()) meta["extra"] = t.extra;
    write_file(path + ".meta.json", meta.dump(2) + "\n");
    out << t.summary << "\n";
    return 0;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what();
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

int run(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& out,
        std::ostream& err) {
  RunConfig c;
  try {
    c = load_config(config_path);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what();
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << "\n";
    return 2;
  }
  return run(command, c, opt, out, err);
}

}  // namespace edsl::cli
