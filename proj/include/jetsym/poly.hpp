#ifndef JETSYM_POLY_HPP
#define JETSYM_POLY_HPP

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetsym/symbols.hpp"

namespace jetsym {

using Rat = mpq_class;

struct symbolic_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct division_by_zero : symbolic_error {
  division_by_zero() : symbolic_error("DivisionByZero") {}
};
struct denominator_vanishes : symbolic_error {
  explicit denominator_vanishes(const std::string& w)
      : symbolic_error("DenominatorVanishes: " + w) {}
};

// Power product with sorted factor list; exponents are strictly positive.
struct Monomial {
  std::vector<std::pair<Sym, int>> f;

  static Monomial one() { return {}; }
  static Monomial var(Sym s, int e = 1);

  bool operator==(const Monomial&) const = default;

  bool is_one() const { return f.empty(); }
  int total_degree() const;
  int degree_in(Sym s) const;
  Monomial times(const Monomial& o) const;
  bool divides(const Monomial& o) const; // this | o
  Monomial exact_quotient(const Monomial& o) const; // o / this
  Monomial pow(int e) const;
};

// Graded lexicographic order (total degree first, then the packed symbol
// order). Used both for canonical term storage and as the division order.
std::strong_ordering mono_cmp(const Monomial& a, const Monomial& b);

struct MonoGrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return mono_cmp(a, b) == std::strong_ordering::greater;
  }
};

// Sparse multivariate polynomial with exact rational coefficients. Terms are
// stored leading-first so begin() is the graded-lex leading term.
class Poly {
 public:
  using TermMap = std::map<Monomial, Rat, MonoGrlexGreater>;

  Poly() = default;
  static Poly zero() { return {}; }
  static Poly constant(const Rat& c);
  static Poly var(Sym s, int exp = 1);

  const TermMap& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;      // zero or a single degree-0 term
  Rat constant_value() const;    // requires is_constant()
  int total_degree() const;      // -1 for the zero polynomial
  int degree_in(Sym s) const;    // 0 when s does not appear
  std::vector<Sym> variables() const;
  bool depends_on(Sym s) const;

  void add_term(const Monomial& m, const Rat& c);

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rat& c) const;
  Poly pow(int e) const; // e >= 0

  bool operator==(const Poly& o) const { return t_ == o.t_; }

  Poly derivative(Sym s) const;
  Rat eval(const std::map<Sym, Rat>& point) const; // missing symbols -> throw
  Poly subs_syms(const std::map<Sym, Sym>& ren) const; // symbol renaming

  // Leading data under the graded-lex order.
  const Monomial& leading_monomial() const;
  const Rat& leading_coefficient() const;

  // Division helpers. exact_quotient throws unless the division is exact.
  Poly exact_quotient(const Poly& d) const;
  bool try_exact_quotient(const Poly& d, Poly& q) const;

  // Scale so the leading coefficient is 1 (no-op on zero).
  Poly monic() const;

  // View as univariate in s: map degree -> coefficient polynomial.
  std::map<int, Poly> coeffs_in(Sym s) const;
  Poly coeff_of(Sym s, int deg) const;

 private:
  TermMap t_;
};

// Multivariate GCD over Q by recursive primitive pseudo-remainder sequences;
// the result is monic. gcd(0,0) = 0.
Poly poly_gcd(const Poly& a, const Poly& b);

// (factor, multiplicity) pairs; product of factor^multiplicity equals the
// input up to a nonzero rational constant. Single-variable powers are pulled
// out first, the remaining part is split square-free (char-0 Yun step using
// the gcd with all first partials). Factors are pairwise coprime.
std::vector<std::pair<Poly, int>> square_free_factors(const Poly& p);

} // namespace jetsym

#endif
