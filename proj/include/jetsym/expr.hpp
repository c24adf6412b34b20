#ifndef JETSYM_EXPR_HPP
#define JETSYM_EXPR_HPP

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "jetsym/poly.hpp"

namespace jetsym {

// Rational function in canonical form: gcd-reduced, denominator monic under
// the graded-lex leading-term convention, zero represented as 0/1. Equality
// of canonical forms is structural, so is_zero is exact and free.
class Expr {
 public:
  Expr() = default; // zero
  Expr(const Poly& n) : num_(n) {}
  static Expr rational(const Rat& c) { return Expr(Poly::constant(c)); }
  static Expr integer(long v) { return rational(Rat(v)); }
  static Expr var(Sym s) { return Expr(Poly::var(s)); }
  static Expr quotient(const Poly& n, const Poly& d);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_rational() const { return num_.is_constant() && den_.is_constant(); }
  Rat rational_value() const; // requires is_rational()

  bool operator==(const Expr& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Expr& o) const { return !(*this == o); }

  Expr operator-() const;
  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator*(const Expr& o) const;
  Expr operator/(const Expr& o) const; // DivisionByZero on zero divisor
  Expr pow(int e) const;               // negative exponents allowed

  Expr partial(Sym s) const;
  // Simultaneous substitution: every binding is applied to the original
  // expression, so {x -> y, y -> x} swaps the two variables.
  Expr substitute(const std::map<Sym, Expr>& bindings) const;
  Rat eval(const std::map<Sym, Rat>& point) const; // DenominatorVanishes

  std::vector<Sym> variables() const;
  bool depends_on(Sym s) const;
  // Highest jet order of system variable `var` appearing, or -1 when the
  // variable is absent altogether.
  int order_in(int var) const;
  // Highest jet order over all system variables (Jet and Ctrl kinds), or -1.
  int max_jet_order() const;

 private:
  Poly num_;
  Poly den_ = Poly::constant(1);
  void reduce();
};

// Canonicalized rational from a numerator/denominator pair.
inline Rat frac(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

// Name lookup for printing; falls back to default_sym_name.
using NameFn = std::function<std::string(Sym)>;

std::string to_string(const Poly& p, const NameFn& names = {});
std::string to_string(const Expr& e, const NameFn& names = {});

// Deterministic source of random rational sample points.
class RandomRats {
 public:
  explicit RandomRats(std::uint64_t seed) : rng_(seed) {}
  // Nonzero numerator in [-bound, bound], denominator in [1, bound].
  Rat next(int bound = 50);
  // A full sample point for the given symbols.
  std::map<Sym, Rat> point(const std::vector<Sym>& syms, int bound = 50);

 private:
  std::mt19937_64 rng_;
};

} // namespace jetsym

#endif
