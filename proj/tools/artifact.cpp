// Command line front end. Subcommands cover the individual analyses (parse,
// accessibility, rouchon-bound, linearize-basis, symmetries, check-integrable,
// verify-flow) plus a combined `analyze` that chains them. Output is
// human-readable text by default and a stable JSON document with --json.
//
// Exit codes: 0 analysis ran (whatever the verdict), 1 analysis failure
// (parse errors, bad input files, failed flow verification), 2 internal cap
// exceeded (closure or elimination depth).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jetsym/access.hpp"
#include "jetsym/expr.hpp"
#include "jetsym/flow.hpp"
#include "jetsym/integrab.hpp"
#include "jetsym/orderbound.hpp"
#include "jetsym/symsolve.hpp"
#include "jetsym/system.hpp"
#include "jetsym/vfield.hpp"

using nlohmann::json;
using namespace jetsym;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw symbolic_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// Report serialization. JSON keys stay sorted (nlohmann object is a std::map)
// so identical inputs produce byte-identical documents; no timing data goes
// into JSON for the same reason.

json system_json(const NormalSystem& ns) {
  json free_names = json::array(), dep_names = json::array();
  json eqs = json::array();
  NameFn nf = ns.names();
  for (int j = 1; j <= ns.m; ++j) free_names.push_back(nf(Sym::jet(j, 0)));
  for (int i = ns.m + 1; i <= ns.n; ++i) {
    dep_names.push_back(nf(Sym::jet(i, 0)));
    eqs.push_back(nf(Sym::jet(i, 0)) + "' = " + to_string(ns.f_of(i), nf));
  }
  return {{"name", ns.name},
          {"free", free_names},
          {"dep", dep_names},
          {"equations", eqs}};
}

json access_json(const AccessReport& rep) {
  return {{"accessible", rep.accessible},
          {"dimension", rep.lie_algebra_dim},
          {"growth", rep.dims},
          {"generators", rep.generator_log}};
}

json rouchon_json(const BranchReport& rep, const NormalSystem& ns) {
  NameFn nf = ns.names();
  json branches = json::array();
  for (const auto& br : rep.branches) {
    json zero = json::array(), rel = json::array(), unres = json::array();
    for (int i : br.zero) zero.push_back("A" + std::to_string(i));
    for (const auto& e : br.relations) rel.push_back(to_string(e, nf));
    for (const auto& e : br.unresolved) unres.push_back(to_string(e, nf));
    branches.push_back({{"zero", zero},
                        {"relations", rel},
                        {"unresolved", unres},
                        {"trivial", br.trivial}});
  }
  json out = {{"verdict", verdict_name(rep.verdict)}, {"branches", branches}};
  if (!rep.note.empty()) out["note"] = rep.note;
  out["trace"] = rep.trace;
  return out;
}

json flat_json(const FlatBasisReport& rep, const NameFn& nf) {
  json zeta = json::array(), assumptions = json::array();
  for (const auto& z : rep.zeta) zeta.push_back(to_string(z, nf));
  for (const auto& a : rep.assumptions)
    assumptions.push_back(to_string(a, nf) + " != 0");
  json par = json::object();
  for (const auto& [v, e] : rep.parametrization)
    par[default_sym_name(v)] = to_string(e, nf);
  return {{"r", rep.r},
          {"s", rep.s},
          {"zeta", zeta},
          {"parametrization", par},
          {"assumptions", assumptions}};
}

json basis_json(const NormalSystem& ns, const SymmetryBasis& sb) {
  json basis = json::array();
  for (const auto& vf : sb.basis) {
    json lines = json::array();
    for (const auto& line : vfield_strings(ns, vf)) lines.push_back(line);
    basis.push_back(lines);
  }
  return {{"dimension", sb.basis.size()},
          {"parameters", sb.parameters},
          {"basis", basis}};
}

json profile_json(const OrderProfile& p) {
  return {{"state_orders", p.state_orders},
          {"control_orders", p.control_orders},
          {"completed", p.completed},
          {"e", p.e},
          {"growth", growth_name(p.growth)}};
}

json integ_json(const IntegrabilityVerdict& v) {
  return {{"status", integrability_name(v.status)},
          {"witness", v.witness},
          {"ranks", v.ranks},
          {"profile", profile_json(v.profile)}};
}

std::string fmt_sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

std::string vfield_block(const NormalSystem& ns, const VField& vf) {
  std::string out;
  for (const auto& line : vfield_strings(ns, vf)) out += line + "; ";
  if (!out.empty()) out.pop_back();
  return out;
}

void print_system(std::ostream& os, const NormalSystem& ns) {
  NameFn nf = ns.names();
  os << "system " << ns.name << ": " << ns.m << " free, " << ns.n - ns.m
     << " dependent\n";
  for (int i = ns.m + 1; i <= ns.n; ++i)
    os << "  " << nf(Sym::jet(i, 0)) << "' = " << to_string(ns.f_of(i), nf)
       << "\n";
}

// ---------------------------------------------------------------------------
// Input helpers.

NormalSystem load_system(const std::string& path) {
  return normalize(parse_system(slurp(path)));
}

VField load_field(const NormalSystem& ns, const std::string& path) {
  return parse_vfield(ns, slurp(path));
}

// Ansatz files list the allowed variables per component, one line each:
//   a1: x1 x2 x2'
// Every component must get a line; `#` starts a comment.
Ansatz ansatz_from_file(const NormalSystem& ns, const std::string& path) {
  Ansatz an;
  an.allowed.assign(ns.n, {});
  std::vector<bool> seen(ns.n, false);
  std::istringstream in(slurp(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos || line[0] != 'a')
      throw symbolic_error("ansatz line " + std::to_string(lineno) +
                           ": expected 'a<i>: var var ...'");
    int idx = 0;
    try {
      idx = std::stoi(line.substr(1, colon - 1));
    } catch (...) {
      throw symbolic_error("ansatz line " + std::to_string(lineno) +
                           ": bad component index");
    }
    if (idx < 1 || idx > ns.n)
      throw symbolic_error("ansatz line " + std::to_string(lineno) +
                           ": component a" + std::to_string(idx) +
                           " out of range");
    std::istringstream toks(line.substr(colon + 1));
    std::string tok;
    std::vector<Sym> vars;
    while (toks >> tok) {
      Expr e = ns.parse_expr(tok);
      auto vs = e.variables();
      if (vs.size() != 1 || !(e == Expr::var(vs[0])))
        throw symbolic_error("ansatz line " + std::to_string(lineno) + ": '" +
                             tok + "' is not a single variable");
      vars.push_back(vs[0]);
    }
    an.allowed[idx - 1] = vars;
    seen[idx - 1] = true;
  }
  for (int i = 0; i < ns.n; ++i)
    if (!seen[i])
      throw symbolic_error("ansatz file is missing a line for a" +
                           std::to_string(i + 1));
  return an;
}

// All states plus the free jets up to the requested order, for every
// component alike.
Ansatz uniform_ansatz(const NormalSystem& ns, int order) {
  Ansatz an = Ansatz::states_only(ns);
  for (auto& row : an.allowed)
    for (int j = 1; j <= ns.m; ++j)
      for (int k = 1; k <= order; ++k) row.push_back(Sym::jet(j, k));
  return an;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"infinitesimal symmetry analysis for underdetermined ODE "
               "systems"};
  app.set_version_flag("--version", std::string("artifact ") + kVersion);
  app.require_subcommand(1);

  bool json_out = false;
  long seed = 0;
  app.add_flag("--json", json_out, "emit a JSON report on stdout");
  app.add_option("--seed", seed,
                 "seed echoed into reports; all analyses are deterministic");

  std::string sys_path, field_path, ansatz_path, point_arg;
  int order = 0, degree = 2, cap = -1;
  double s_val = 1.0, tol = 1e-6;

  auto* cmd_parse = app.add_subcommand("parse", "parse and normalize a system");
  cmd_parse->add_option("system", sys_path, "system file")->required();

  auto* cmd_access =
      app.add_subcommand("accessibility", "strong accessibility test");
  cmd_access->add_option("system", sys_path, "system file")->required();

  auto* cmd_rouchon = app.add_subcommand(
      "rouchon-bound", "branch analysis of the symbol ideal; decides whether "
                       "symmetries are confined to order zero");
  cmd_rouchon->add_option("system", sys_path, "system file")->required();

  auto* cmd_flat = app.add_subcommand(
      "linearize-basis", "chain decomposition and flat basis of the "
                         "fiber-linear extension");
  cmd_flat->add_option("system", sys_path, "system file")->required();

  auto* cmd_sym =
      app.add_subcommand("symmetries", "solve for a polynomial symmetry basis");
  cmd_sym->add_option("system", sys_path, "system file")->required();
  cmd_sym->add_option("--order", order, "jet order of the ansatz (default 0)");
  cmd_sym->add_option("--degree", degree,
                      "polynomial degree of the ansatz (default 2)");
  cmd_sym->add_option("--ansatz", ansatz_path,
                      "file listing allowed variables per component");

  auto* cmd_integ = app.add_subcommand(
      "check-integrable", "iterated-image rank test for a vector field");
  cmd_integ->add_option("system", sys_path, "system file")->required();
  cmd_integ->add_option("--field", field_path, "vector field file")
      ->required();
  cmd_integ->add_option("--cap", cap, "iteration cap (default: automatic)");

  auto* cmd_flow = app.add_subcommand(
      "verify-flow", "integrate the finite flow and check the group law and "
                     "equivariance numerically");
  cmd_flow->add_option("system", sys_path, "system file")->required();
  cmd_flow->add_option("--field", field_path, "vector field file")->required();
  cmd_flow->add_option("--point", point_arg,
                       "initial point, inline JSON or a JSON file")
      ->required();
  cmd_flow->add_option("--s", s_val, "flow time (default 1.0)");
  cmd_flow->add_option("--tol", tol, "acceptance tolerance (default 1e-6)");

  auto* cmd_all = app.add_subcommand(
      "analyze", "accessibility, order bound, symmetry basis and "
                 "integrability of each basis member");
  cmd_all->add_option("system", sys_path, "system file")->required();
  cmd_all->add_option("--degree", degree,
                      "polynomial degree of the ansatz (default 2)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  auto t0 = std::chrono::steady_clock::now();
  json out;
  out["schema"] = 1;
  out["seed"] = seed;
  out["tool"] = std::string("artifact ") + kVersion;
  int rc = 0;
  std::ostringstream text;

  try {
    NormalSystem ns = load_system(sys_path);
    out["system"] = system_json(ns);

    if (*cmd_parse) {
      print_system(text, ns);
      text << "normal form: ok\n";
    }

    if (*cmd_access || *cmd_all) {
      AccessReport rep = strong_accessibility(ns);
      out["accessibility"] = access_json(rep);
      text << "accessibility: "
           << (rep.accessible ? "accessible" : "not accessible")
           << " (lie algebra dimension " << rep.lie_algebra_dim << " of "
           << ns.n + ns.m << ")\n";
    }

    if (*cmd_rouchon || *cmd_all) {
      BranchReport rep = analyze_A_ideal(d_iterates(ns));
      out["rouchon"] = rouchon_json(rep, ns);
      text << "order bound: " << verdict_name(rep.verdict);
      if (rep.verdict == BranchVerdict::OnlyTrivial)
        text << " (every symmetry has order zero)";
      text << "\n";
      NameFn nf = ns.names();
      for (std::size_t b = 0; b < rep.branches.size(); ++b) {
        const auto& br = rep.branches[b];
        text << "  branch " << b + 1 << ":";
        if (br.trivial) text << " all A vanish";
        for (int i : br.zero) text << " A" << i << " = 0;";
        for (const auto& e : br.relations)
          text << " " << to_string(e, nf) << " = 0;";
        text << "\n";
      }
      if (*cmd_all) {
        out["rouchon"]["note"] =
            rep.verdict == BranchVerdict::OnlyTrivial
                ? "symmetries confined to order 0; order-0 scan is exhaustive "
                  "in the chosen degree"
                : "higher-order candidates possible; default scan stays at "
                  "order 0";
      }
    }

    if (*cmd_flat) {
      FlatBasisReport rep = flat_basis(ns);
      auto es = tangent_extension(ns);
      out["flat_basis"] = flat_json(rep, es.names());
      text << "chain lengths r = (";
      for (std::size_t i = 0; i < rep.r.size(); ++i)
        text << (i ? "," : "") << rep.r[i];
      text << "), s = (";
      for (std::size_t i = 0; i < rep.s.size(); ++i)
        text << (i ? "," : "") << rep.s[i];
      text << ")\n";
      for (std::size_t i = 0; i < rep.zeta.size(); ++i)
        text << "  zeta" << i + 1 << " = " << to_string(rep.zeta[i], es.names())
             << "\n";
      for (const auto& [v, e] : rep.parametrization)
        text << "  " << default_sym_name(v) << " = "
             << to_string(e, es.names()) << "\n";
      for (const auto& a : rep.assumptions)
        text << "  assuming " << to_string(a, es.names()) << " != 0\n";
    }

    if (*cmd_sym || *cmd_all) {
      Ansatz an;
      if (*cmd_sym && !ansatz_path.empty()) {
        an = ansatz_from_file(ns, ansatz_path);
        out["symmetries"] = {{"ansatz", ansatz_path}};
      } else {
        int ord = *cmd_all ? 0 : order;
        an = uniform_ansatz(ns, ord);
        out["symmetries"] = {{"order", ord}};
      }
      SymmetryBasis sb = solve_polynomial_ansatz(ns, an, degree);
      for (const auto& vf : sb.basis)
        if (!verify_symmetry(ns, vf))
          throw symbolic_error("internal error: solver emitted a field that "
                               "fails re-verification");
      json bj = basis_json(ns, sb);
      for (auto& [k, v] : bj.items()) out["symmetries"][k] = v;
      out["symmetries"]["degree"] = degree;
      text << "symmetry basis dimension " << sb.basis.size() << " (degree "
           << degree << ")\n";
      for (const auto& vf : sb.basis)
        text << "  " << vfield_block(ns, vf) << "\n";

      if (*cmd_all) {
        json verdicts = json::array();
        for (std::size_t i = 0; i < sb.basis.size(); ++i) {
          IntegrabilityVerdict v = integrability_verdict(ns, sb.basis[i]);
          verdicts.push_back(integ_json(v));
          text << "  member " << i + 1 << ": " << integrability_name(v.status)
               << "\n";
        }
        out["integrability"] = verdicts;
      }
    }

    if (*cmd_integ) {
      VField vf = load_field(ns, field_path);
      IntegrabilityVerdict v =
          integrability_verdict(ns, vf, cap > 0 ? cap : -1);
      out["integrability"] = integ_json(v);
      out["integrability"]["cap"] =
          cap > 0 ? cap
                  : default_iteration_cap(ns.n, ns.m, vf.order());
      text << "field: " << vfield_block(ns, vf) << "\n";
      text << "verdict: " << integrability_name(v.status) << "\n";
      text << "  " << v.witness << "\n";
      text << "  ranks:";
      for (int r : v.ranks) text << " " << r;
      text << "\n";
    }

    if (*cmd_flow) {
      VField vf = load_field(ns, field_path);
      std::string ptext = trim(point_arg);
      if (!ptext.empty() && ptext[0] != '{') ptext = slurp(point_arg);
      json pj;
      try {
        pj = json::parse(ptext);
      } catch (const json::exception& e) {
        throw symbolic_error(std::string("bad --point JSON: ") + e.what());
      }
      FiniteFlowField fff = close_finite_system(ns, vf);
      NameFn nf = ns.names();
      std::vector<double> p0;
      for (Sym c : fff.coordinates) {
        std::string name = nf(c);
        if (!pj.contains(name)) {
          std::string need;
          for (Sym v : fff.coordinates) need += " " + nf(v);
          throw symbolic_error("--point is missing \"" + name +
                               "\"; required coordinates:" + need);
        }
        p0.push_back(pj[name].get<double>());
      }

      FlowResult res = rk4_flow(fff, p0, s_val, 1000);
      GroupLawResult gl =
          group_law_check(fff, p0, s_val / 2, s_val / 2, 500, tol);

      // Initial state and polynomial controls for the equivariance pass,
      // rebuilt from whatever jet orders the point supplies.
      std::vector<double> x0;
      for (int i = 1; i <= ns.n; ++i)
        x0.push_back(pj.value(nf(Sym::jet(i, 0)), 0.0));
      std::vector<std::vector<double>> controls(ns.m);
      for (int j = 1; j <= ns.m; ++j) {
        double fact = 1.0;
        for (int k = 0; k <= 8; ++k) {
          if (k > 0) fact *= k;
          std::string name = nf(Sym::jet(j, k));
          if (pj.contains(name))
            controls[j - 1].resize(k + 1, 0.0);
          if (controls[j - 1].size() > std::size_t(k))
            controls[j - 1][k] = pj.value(name, 0.0) / fact;
        }
        if (controls[j - 1].empty()) controls[j - 1] = {0.0};
      }
      EquivarianceResult eq =
          equivariance_check(ns, vf, x0, controls, 1.0, s_val, tol);

      bool pass = gl.pass && eq.pass;
      json coords = json::array(), endpoint = json::array();
      for (Sym c : fff.coordinates) coords.push_back(nf(c));
      for (double v : res.endpoint()) endpoint.push_back(v);
      out["flow"] = {{"coordinates", coords},
                     {"s", s_val},
                     {"tol", tol},
                     {"endpoint", endpoint},
                     {"group_law", {{"pass", gl.pass}, {"error", gl.error}}},
                     {"equivariance",
                      {{"pass", eq.pass},
                       {"endpoint_error", eq.endpoint_error},
                       {"residual_error", eq.residual_error}}},
                     {"pass", pass}};
      text << "flow over s = " << s_val << " on " << fff.coordinates.size()
           << " coordinates\n";
      text << "  endpoint:";
      for (std::size_t i = 0; i < res.endpoint().size(); ++i)
        text << " " << nf(fff.coordinates[i]) << " = " << res.endpoint()[i];
      text << "\n";
      text << "  group law: " << (gl.pass ? "pass" : "FAIL") << " (defect "
           << fmt_sci(gl.error) << ")\n";
      text << "  equivariance: " << (eq.pass ? "pass" : "FAIL")
           << " (endpoint " << fmt_sci(eq.endpoint_error) << ", residual "
           << fmt_sci(eq.residual_error) << ")\n";
      text << "verdict: " << (pass ? "verified" : "NOT verified") << "\n";
      if (!pass) rc = 1;
    }
  } catch (const parse_error& e) {
    json err = {{"type", e.code}, {"message", e.what()}};
    if (e.line > 0) {
      err["line"] = e.line;
      err["col"] = e.col;
    }
    out["error"] = err;
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const closure_cap_exceeded& e) {
    out["error"] = {{"type", "ClosureCapExceeded"}, {"message", e.what()}};
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const depth_exceeded& e) {
    out["error"] = {{"type", "DepthExceeded"}, {"message", e.what()}};
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const normalization_error& e) {
    out["error"] = {{"type", e.code}, {"message", e.what()}};
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    out["error"] = {{"type", "AnalysisError"}, {"message", e.what()}};
    if (json_out)
      std::cout << out.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (json_out) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text.str();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << "elapsed: " << ms << " ms\n";
  }
  return rc;
}
