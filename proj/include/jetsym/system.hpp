#ifndef JETSYM_SYSTEM_HPP
#define JETSYM_SYSTEM_HPP

#include <functional>
#include <string>
#include <vector>

#include "jetsym/expr.hpp"

namespace jetsym {

class RandomRats;

struct parse_error : symbolic_error {
  std::string code; // SyntaxError, UndeclaredSymbol, NonAutonomous
  int line, col;
  parse_error(std::string c, const std::string& msg, int l, int cl)
      : symbolic_error(c + " at " + std::to_string(l) + ":" +
                       std::to_string(cl) + ": " + msg),
        code(std::move(c)), line(l), col(cl) {}
};

struct normalization_error : symbolic_error {
  std::string code; // NormalizationFailure, DuplicateEquation, MissingEquation
  normalization_error(std::string c, const std::string& msg)
      : symbolic_error(c + ": " + msg), code(std::move(c)) {}
};

// Maps an identifier with a derivative order to a symbol, or throws.
using SymResolver = std::function<Sym(const std::string&, int ord, int line, int col)>;

Expr parse_expression(const std::string& text, const SymResolver& resolve);

// A system as declared in a .sys file, before normalization. Implicit style
// declares free/dep variables and equations x_i' = f_i(x, x_free'); explicit
// style declares dep states plus controls and equations x_i' = f_i(x, u).
struct SystemDef {
  std::string name;
  std::vector<std::string> free_vars, dep_vars, controls;
  struct Equation {
    std::string lhs;
    int lhs_ord = 1;
    Expr rhs;
    int line = 0;
  };
  std::vector<Equation> equations;
  bool explicit_style() const { return !controls.empty(); }
  // Declaration index (1-based, free then dep) used while parsing equations.
  std::vector<std::string> decl_order() const;
};

SystemDef parse_system(const std::string& text);

struct ControlValidation {
  int rank = 0;
  int m = 0;
  bool ok = false;
  std::string message;
};

struct NormalSystem;

// Explicit realization x_i' = f_i(x, u): order-0 states Jet(i,0) and control
// jets Ctrl(j,k). For a normalized system this identifies u_j with x_j'.
struct ExplicitForm {
  int n = 0, m = 0;
  std::vector<std::string> state_names, control_names;
  std::vector<Expr> f; // size n, f[i-1] in states and controls

  Expr tau_apply(const Expr& e) const;
  NameFn names() const;
};

// Canonical implicit form: variables 1..m free, m+1..n dependent, and
// x_i' = f_i(x, x_1'..x_m') for the dependent ones. Canonical coordinates are
// the free jets x_j^(k) (j <= m, any k) and the order-0 dependent x_i.
struct NormalSystem {
  std::string name;
  int n = 0, m = 0;
  std::vector<std::string> var_names; // size n, free first
  std::vector<Expr> f;                // size n - m
  SystemDef source;                   // pre-normalization echo

  const Expr& f_of(int i) const { return f.at(i - m - 1); } // i in (m, n]

  // Cartan field on canonical coordinates: x_j^(k) -> x_j^(k+1) for free j,
  // x_i -> f_i for dependent i. Non-jet symbols are treated as constants.
  Expr tau_of_jet(Sym s) const;
  Expr tau_apply(const Expr& e) const;
  Expr tau_power(const Expr& e, int k) const;

  ExplicitForm explicit_form() const;
  NameFn names() const;
  int var_index(const std::string& name) const; // 1-based, 0 when unknown
  // Parses an expression over this system's canonical coordinates.
  Expr parse_expr(const std::string& text) const;
};

NormalSystem normalize(const SystemDef& def);

// Generic rank of (df_i/du_j) on the explicit form; full control means rank m.
ControlValidation validate_full_control(const SystemDef& def, RandomRats& rng);

} // namespace jetsym

#endif
