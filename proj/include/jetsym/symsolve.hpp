#ifndef JETSYM_SYMSOLVE_HPP
#define JETSYM_SYMSOLVE_HPP

#include <compare>
#include <string>
#include <vector>

#include "jetsym/orderbound.hpp"
#include "jetsym/vfield.hpp"

namespace jetsym {

struct ansatz_too_small : symbolic_error {
  explicit ansatz_too_small(const std::string& w)
      : symbolic_error("AnsatzTooSmall: " + w) {}
};

struct coefficient_vanishes : symbolic_error {
  explicit coefficient_vanishes(const std::string& w)
      : symbolic_error("CoefficientVanishes: " + w) {}
};

// Declared dependencies: the jet variables each generator component a_i may
// use. Everything outside the union of these sets is a free variable for
// coefficient extraction.
struct Ansatz {
  std::vector<std::vector<Sym>> allowed; // allowed[i-1] for a_i

  static Ansatz states_only(const NormalSystem& ns);
  static Ansatz from_branch(const ConstraintSet::BranchAnsatz& ba);
  bool depends(int unknown, Sym v) const;
};

// One derivative monomial applied to one unknown, d^alpha a_i. The index is
// kept sorted by derivation precedence: state partials before velocity
// partials, lower variable index first.
struct DTerm {
  int unknown = 0;
  std::vector<std::pair<Sym, int>> d;

  int degree() const;
  bool operator==(const DTerm&) const = default;
};

// Term order: total derivation degree, then lexicographic comparison by the
// precedence above, then unknown index (higher index greater).
std::strong_ordering dterm_cmp(const DTerm& a, const DTerm& b);

// Linear PDE, sum of coefficient * d^alpha a_i with rational-function
// coefficients, stored leading term first.
struct Pde {
  std::vector<std::pair<DTerm, Expr>> terms;

  bool is_zero() const { return terms.empty(); }
  const DTerm& lead() const { return terms.front().first; }
  bool operator==(const Pde&) const = default;
};

Pde pde_normal(std::vector<std::pair<DTerm, Expr>> terms);
Pde pde_add(const Pde& a, const Pde& b);
Pde pde_scale(const Pde& a, const Expr& c);
Pde pde_derive(const Pde& p, Sym v, const Ansatz& an);
Pde pde_monic(const Pde& p);
// Full normal form of p against the (monic) basis; skip ignores that index.
Pde pde_reduce(const Pde& p, const std::vector<Pde>& basis, const Ansatz& an,
               int skip = -1);
// Plug concrete component expressions into the equation.
Expr pde_eval_at(const Pde& p, const std::vector<Expr>& a);
std::string to_string(const Pde& p, const NameFn& names = {});

struct LinearPDESystem {
  Ansatz ansatz;
  std::vector<Pde> equations;
};

// Expand the commutation residuals under the ansatz, writing the unknown
// partials as opaque symbols, and split by monomials in the free variables.
// prolong_order bounds how many times the unknowns may be dragged through
// the Cartan field; the dynamics here need one.
LinearPDESystem derive_constraints(const NormalSystem& ns, const Ansatz& an,
                                   int prolong_order = 1);

// Buchberger-style completion: all same-unknown S-polynomials reduce to
// zero; the result is inter-reduced, monic and sorted by leading term.
LinearPDESystem groebner_complete(const LinearPDESystem& sys);

struct SymmetryBasis {
  std::vector<VField> basis;
  Ansatz ansatz;
  std::vector<std::string> parameters;
};

// Substitute a polynomial ansatz of the given total degree into the exact
// residuals and return the rational nullspace as a basis of generators;
// every member is re-verified against the residuals.
SymmetryBasis solve_polynomial_ansatz(const NormalSystem& ns, const Ansatz& an,
                                      int degree = 2);

bool verify_symmetry(const NormalSystem& ns, const VField& vf);

} // namespace jetsym

#endif
