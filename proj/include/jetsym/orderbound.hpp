#ifndef JETSYM_ORDERBOUND_HPP
#define JETSYM_ORDERBOUND_HPP

#include <string>
#include <vector>

#include "jetsym/system.hpp"

namespace jetsym {

struct depth_exceeded : symbolic_error {
  explicit depth_exceeded(const std::string& w)
      : symbolic_error("DepthExceeded: " + w) {}
};

// Ideal spanned by the iterated images of the implicit equations under the
// formal derivation D = sum_i A_i d/d(x_i'), where A_1..A_n are fresh
// constants (DA_i = 0). The generator produced by D^l is homogeneous of
// degree l in the A variables.
struct AIdeal {
  int n = 0;
  int m = 0;
  int depth = 0;
  std::vector<Expr> generators;
  std::vector<int> level; // D-power that produced generators[k]
};

// Smallest depth past which every further D-iterate vanishes identically:
// one more than the maximal total degree of the f_i in the velocity
// variables.
int default_d_depth(const NormalSystem& ns);

AIdeal d_iterates(const NormalSystem& ns, int depth);
inline AIdeal d_iterates(const NormalSystem& ns) {
  return d_iterates(ns, default_d_depth(ns));
}

enum class BranchVerdict { OnlyTrivial, Branches, Inconclusive };
std::string verdict_name(BranchVerdict v);

struct ABranch {
  std::vector<int> zero;        // A_i forced to vanish on this branch
  std::vector<Expr> relations;  // A_i - rhs for solved but nonzero A_i
  std::vector<Expr> unresolved; // equations the engine could not split
  bool trivial = false;         // all A_i vanish
};

struct BranchReport {
  BranchVerdict verdict = BranchVerdict::Inconclusive;
  std::vector<ABranch> branches;
  std::vector<std::string> trace;
  std::string note;
};

// Branch-and-substitute elimination over the A variables. Moves, in order of
// preference: solve generators linear in A by substitution; split a
// generator into square-free factors and branch on each factor that is an A
// variable, an A-linear form, or a definite constant-coefficient quadratic
// form (binary forms with rational coefficients are split through their
// dehomogenization first). Branches the engine cannot resolve are reported
// verbatim and make the verdict Inconclusive.
BranchReport analyze_A_ideal(const AIdeal& ideal, int node_cap = 10000);

// Dependency restriction implied by the branch analysis: for each surviving
// branch, the set of jet variables each generator component a_i may use in a
// first-order ansatz. A vanishing top coefficient pins a_i to order zero.
struct ConstraintSet {
  struct BranchAnsatz {
    std::vector<int> zero;
    std::vector<std::vector<Sym>> allowed; // indexed by i-1 for a_i
  };
  bool order_zero_all = false;
  std::vector<BranchAnsatz> branches;
  std::string note;
};

ConstraintSet order_constraints(const BranchReport& br, const NormalSystem& ns);

} // namespace jetsym

#endif
