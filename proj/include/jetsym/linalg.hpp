#ifndef JETSYM_LINALG_HPP
#define JETSYM_LINALG_HPP

#include <vector>

#include "jetsym/expr.hpp"

namespace jetsym {

using ExprMatrix = std::vector<std::vector<Expr>>;
using QMatrix = std::vector<std::vector<Rat>>;

struct rank_degeneracy : symbolic_error {
  explicit rank_degeneracy(const std::string& w)
      : symbolic_error("RankDegeneracy: " + w) {}
};

// Least common multiple, monic like poly_gcd.
Poly poly_lcm(const Poly& a, const Poly& b);

int rank(const QMatrix& m);

// Nullspace basis in reduced echelon convention: one vector per free column,
// with a 1 in the free position. Deterministic.
std::vector<std::vector<Rat>> nullspace(const QMatrix& m);

// Generic rank over the field of rational functions. Specializing at the
// pre-filter points can only lower the rank, so a full-rank specialization
// proves the generic value; otherwise an exact fraction-free (Bareiss)
// elimination on the denominator-cleared matrix decides.
int generic_rank(const ExprMatrix& m, RandomRats& rng);

// Kernel of m (viewed over the rational-function field) as row vectors v with
// m * v^T = 0. Vectors are denominator-cleared, content-reduced and start
// with a monic entry; pivot selection scans columns left to right, so the
// result is deterministic for a fixed column order.
std::vector<std::vector<Expr>> kernel_basis(const ExprMatrix& m);

// Solve m * x = rhs over the rational-function field. Throws rank_degeneracy
// if the system is singular or inconsistent. `assumptions` collects the
// distinct non-constant pivot denominators that the solution divides by.
std::vector<Expr> solve_linear(const ExprMatrix& m, const std::vector<Expr>& rhs,
                               std::vector<Expr>* assumptions = nullptr);

} // namespace jetsym

#endif
