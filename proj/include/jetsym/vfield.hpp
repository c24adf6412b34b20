#ifndef JETSYM_VFIELD_HPP
#define JETSYM_VFIELD_HPP

#include <map>

#include "jetsym/system.hpp"

namespace jetsym {

// A vector field commuting candidate in determined form: generators
// a_i = delta(x_i). The prolongation delta(x_j^(k)) = tau^k(a_j) for free j
// is implied and computed on demand.
struct VField {
  std::vector<Expr> a; // size n

  static VField zero(const NormalSystem& ns) {
    return VField{std::vector<Expr>(ns.n)};
  }
  // Highest jet order appearing in any generator; state-only fields have
  // order 0.
  int order() const;
  bool operator==(const VField&) const = default;
};

// Applies the prolonged field to an expression over canonical coordinates.
// Non-jet symbols are treated as constants.
Expr delta_apply(const NormalSystem& ns, const VField& vf, const Expr& e);

// Cached variant for repeated application of the same field.
class DeltaOp {
 public:
  DeltaOp(const NormalSystem& ns, VField vf)
      : ns_(ns), vf_(std::move(vf)) {}
  const VField& field() const { return vf_; }
  Expr image_of(Sym jet); // delta(x_i^(k))
  Expr apply(const Expr& e);

 private:
  const NormalSystem& ns_;
  VField vf_;
  std::map<Sym, Expr> cache_;
};

// Residuals E_i = tau(a_i) - delta(f_i) for the dependent variables; the
// field commutes with the Cartan field exactly when all residuals vanish.
std::vector<Expr> commutator_residuals(const NormalSystem& ns, const VField& vf);

bool is_symmetry(const NormalSystem& ns, const VField& vf);

// [X, Y] on generators: ([X,Y])(x_i) = X(Y(x_i)) - Y(X(x_i)), re-prolonged.
VField lie_bracket(const NormalSystem& ns, const VField& x, const VField& y);

// Linear combination c1*x + c2*y.
VField combine(const VField& x, const Expr& c1, const VField& y, const Expr& c2);

// Parses "a1 = <expr>; a2 = <expr>; ...": one binding per variable, indexed
// names a1..an over the normalized variable order.
VField parse_vfield(const NormalSystem& ns, const std::string& text);

std::vector<std::string> vfield_strings(const NormalSystem& ns, const VField& vf);

// ------------------------------------------------------------------
// Finite sparse fields on the explicit realization (states + control jets).

using SparseField = std::map<Sym, Expr>;

Expr field_apply(const SparseField& x, const Expr& e);

// [X, Y] coefficient-wise: X(Y(c)) - Y(X(c)) per coordinate c.
SparseField lie_bracket(const SparseField& x, const SparseField& y);

// One step of the iteration X -> [X, tau] on the explicit space.
SparseField bracket_with_cartan(const ExplicitForm& ex, const SparseField& x);

// k-fold iterate starting from the control direction d/du_j.
SparseField hat_tau_iterate(const ExplicitForm& ex, int j, int k);

} // namespace jetsym

#endif
