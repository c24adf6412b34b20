#include "jetsym/expr.hpp"

#include <sstream>

namespace jetsym {

void Expr::reduce() {
  if (den_.is_zero()) throw division_by_zero();
  if (num_.is_zero()) {
    den_ = Poly::constant(1);
    return;
  }
  if (!den_.is_constant()) {
    Poly g = poly_gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = num_.exact_quotient(g);
      den_ = den_.exact_quotient(g);
    }
  }
  Rat lc = den_.leading_coefficient();
  if (lc != 1) {
    Rat inv = 1 / lc;
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

Expr Expr::quotient(const Poly& n, const Poly& d) {
  Expr e;
  e.num_ = n;
  e.den_ = d;
  e.reduce();
  return e;
}

Rat Expr::rational_value() const {
  if (!is_rational()) throw symbolic_error("not a rational constant");
  if (num_.is_zero()) return Rat(0);
  return num_.constant_value() / den_.constant_value();
}

Expr Expr::operator-() const {
  Expr r = *this;
  r.num_ = -r.num_;
  return r;
}

Expr Expr::operator+(const Expr& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_.is_constant() && o.den_.is_constant() &&
      den_.constant_value() == 1 && o.den_.constant_value() == 1)
    return Expr(num_ + o.num_);
  return quotient(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Expr Expr::operator-(const Expr& o) const { return *this + (-o); }

Expr Expr::operator*(const Expr& o) const {
  if (is_zero() || o.is_zero()) return Expr();
  return quotient(num_ * o.num_, den_ * o.den_);
}

Expr Expr::operator/(const Expr& o) const {
  if (o.is_zero()) throw division_by_zero();
  return quotient(num_ * o.den_, den_ * o.num_);
}

Expr Expr::pow(int e) const {
  if (e == 0) return integer(1);
  if (e < 0) return integer(1) / pow(-e);
  Expr r;
  r.num_ = num_.pow(e);
  r.den_ = den_.pow(e);
  r.reduce();
  return r;
}

Expr Expr::partial(Sym s) const {
  if (is_polynomial()) {
    Expr r(num_.derivative(s));
    if (Rat d = den_.constant_value(); d != 1) r = r / rational(d);
    return r;
  }
  Poly dn = num_.derivative(s), dd = den_.derivative(s);
  return quotient(dn * den_ - num_ * dd, den_ * den_);
}

Expr Expr::substitute(const std::map<Sym, Expr>& bindings) const {
  auto apply = [&](const Poly& p) {
    Expr acc;
    for (auto& [m, c] : p.terms()) {
      Expr term = rational(c);
      for (auto& [s, e] : m.f) {
        auto it = bindings.find(s);
        Expr base = it == bindings.end() ? var(s) : it->second;
        term = term * base.pow(e);
      }
      acc = acc + term;
    }
    return acc;
  };
  Expr n = apply(num_);
  Expr d = apply(den_);
  return n / d;
}

Rat Expr::eval(const std::map<Sym, Rat>& point) const {
  Rat d = den_.eval(point);
  if (d == 0) throw denominator_vanishes(to_string(den_));
  return num_.eval(point) / d;
}

std::vector<Sym> Expr::variables() const {
  std::vector<Sym> v = num_.variables(), w = den_.variables();
  v.insert(v.end(), w.begin(), w.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool Expr::depends_on(Sym s) const {
  return num_.depends_on(s) || den_.depends_on(s);
}

int Expr::order_in(int var) const {
  int ord = -1;
  for (Sym s : variables())
    if (s.kind() == SymKind::Jet && s.i() == var) ord = std::max(ord, s.k());
  return ord;
}

int Expr::max_jet_order() const {
  int ord = -1;
  for (Sym s : variables())
    if (s.kind() == SymKind::Jet || s.kind() == SymKind::Ctrl)
      ord = std::max(ord, s.k());
  return ord;
}

std::string jet_suffix_name(const std::string& base, int ord) {
  if (ord <= 4) {
    std::string r = base;
    for (int i = 0; i < ord; ++i) r += '\'';
    return r;
  }
  return "D(" + base + "," + std::to_string(ord) + ")";
}

std::string default_sym_name(Sym s) {
  switch (s.kind()) {
    case SymKind::Jet:
      return jet_suffix_name("x" + std::to_string(s.i()), s.k());
    case SymKind::Ctrl:
      return jet_suffix_name("u" + std::to_string(s.i()), s.k());
    case SymKind::Fiber:
      return "a" + std::to_string(s.i());
    case SymKind::FiberB:
      return jet_suffix_name("b" + std::to_string(s.i()), s.k());
    case SymKind::AVar:
      return "A" + std::to_string(s.i());
    case SymKind::Zeta:
      return jet_suffix_name("z" + std::to_string(s.i()), s.k());
    case SymKind::Coeff:
      return "c" + std::to_string(s.i());
    case SymKind::Partial:
      return "d(a" + std::to_string(s.i()) + ")/d(" +
             jet_suffix_name("x" + std::to_string(s.j()), s.k()) + ")";
  }
  return "?";
}

namespace {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string name_of(Sym s, const NameFn& names) {
  if (names) {
    std::string n = names(s);
    if (!n.empty()) return n;
  }
  return default_sym_name(s);
}

void append_mono(std::ostringstream& os, const Monomial& m, const Rat& c,
                 bool leading, const NameFn& names) {
  Rat a = abs(c);
  if (!leading)
    os << (c < 0 ? " - " : " + ");
  else if (c < 0)
    os << "-";
  bool coeff_shown = a != 1 || m.is_one();
  if (coeff_shown) os << rat_str(a);
  bool first = !coeff_shown;
  for (auto& [s, e] : m.f) {
    if (!first) os << "*";
    first = false;
    std::string n = name_of(s, names);
    bool needs_paren = n.find('/') != std::string::npos;
    if (needs_paren) os << "(" << n << ")";
    else os << n;
    if (e != 1) os << "^" << e;
  }
}

} // namespace

std::string to_string(const Poly& p, const NameFn& names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool leading = true;
  for (auto& [m, c] : p.terms()) {
    append_mono(os, m, c, leading, names);
    leading = false;
  }
  return os.str();
}

std::string to_string(const Expr& e, const NameFn& names) {
  if (e.is_polynomial()) {
    Rat d = e.den().constant_value();
    if (d == 1) return to_string(e.num(), names);
    // constant denominators are folded into the coefficients for printing
    return to_string(e.num().scaled(1 / d), names);
  }
  std::string n = to_string(e.num(), names);
  std::string d = to_string(e.den(), names);
  return "(" + n + ")/(" + d + ")";
}

Rat RandomRats::next(int bound) {
  std::uniform_int_distribution<int> num(-bound, bound);
  std::uniform_int_distribution<int> den(1, bound);
  int n = 0;
  while (n == 0) n = num(rng_);
  return frac(n, den(rng_));
}

std::map<Sym, Rat> RandomRats::point(const std::vector<Sym>& syms, int bound) {
  std::map<Sym, Rat> p;
  for (Sym s : syms) p.emplace(s, next(bound));
  return p;
}

} // namespace jetsym
