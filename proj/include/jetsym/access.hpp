#ifndef JETSYM_ACCESS_HPP
#define JETSYM_ACCESS_HPP

#include <map>

#include "jetsym/linalg.hpp"
#include "jetsym/vfield.hpp"

namespace jetsym {

struct not_accessible : symbolic_error {
  explicit not_accessible(const std::string& w)
      : symbolic_error("NotAccessible: " + w) {}
};

// Lie-algebra span of the control directions and their iterated brackets
// with the Cartan field on the explicit realization.
struct AccessReport {
  int lie_algebra_dim = 0;
  bool accessible = false;
  std::vector<int> dims;                  // span dimension as generators land
  std::vector<std::string> generator_log; // chain of admitted generators
};

AccessReport strong_accessibility(const NormalSystem& ns);

// Base system plus the fiber-linear dynamics: coordinates a_i over the
// states and b_{j,k} over the controls, with
//   tau_hat(a_i)    = sum_h df_i/dx_h a_h + sum_j df_i/du_j b_{j,0}
//   tau_hat(b_{j,k}) = b_{j,k+1}
// Zeta symbols are carried as free scalar chains: tau_hat(z_{i,k}) = z_{i,k+1}.
struct ExtendedSystem {
  ExplicitForm base;
  std::vector<Expr> a_rhs; // tau_hat(a_i), i = 1..n

  Expr tau_hat_of(Sym s) const;
  Expr tau_hat(const Expr& e) const;
  NameFn names() const;
};

ExtendedSystem tangent_extension(const NormalSystem& ns);

// Output of the flat-basis construction on the fiber-linear extension. The
// diagram data r/s/q/k/p describes the growth of the vertical distributions;
// zeta are the selected first integrals (linear in the a_i) and the
// parametrization expresses every a_i and b_{j,0} in their derivatives.
struct FlatBasisReport {
  std::vector<int> dims; // dim Delta_0 .. Delta_K at stabilization
  std::vector<int> r;    // r_k = dim Delta_k - dim Delta_{k-1}, k >= 1
  std::vector<int> s;    // s_k = r_k - r_{k+1}
  std::vector<int> q;    // increasing k with s_k != 0
  int h = 0;             // number of distinct chain lengths
  std::vector<int> k;    // chain lengths, longest first
  std::vector<int> p;    // conjugate-diagram alias of k
  std::vector<Expr> zeta;
  std::map<Sym, Expr> parametrization; // Fiber(i) and FiberB(j,0) images
  std::vector<Expr> assumptions;       // nonvanishing pivot denominators
};

FlatBasisReport flat_basis(const NormalSystem& ns);

// Residuals of the fiber dynamics after substituting the parametrization;
// identically zero exactly when the zeta chains really generate everything.
std::vector<Expr> parametrization_residuals(const ExtendedSystem& es,
                                            const FlatBasisReport& rep);

} // namespace jetsym

#endif
