#include "jetsym/poly.hpp"

#include <algorithm>

namespace jetsym {

Monomial Monomial::var(Sym s, int e) {
  Monomial m;
  if (e != 0) m.f.emplace_back(s, e);
  return m;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto& [s, e] : f) d += e;
  return d;
}

int Monomial::degree_in(Sym s) const {
  for (auto& [v, e] : f)
    if (v == s) return e;
  return 0;
}

Monomial Monomial::times(const Monomial& o) const {
  Monomial r;
  r.f.reserve(f.size() + o.f.size());
  auto a = f.begin(), b = o.f.begin();
  while (a != f.end() && b != o.f.end()) {
    if (a->first < b->first)
      r.f.push_back(*a++);
    else if (b->first < a->first)
      r.f.push_back(*b++);
    else {
      int e = a->second + b->second;
      if (e != 0) r.f.emplace_back(a->first, e);
      ++a, ++b;
    }
  }
  r.f.insert(r.f.end(), a, f.end());
  r.f.insert(r.f.end(), b, o.f.end());
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  auto b = o.f.begin();
  for (auto& [s, e] : f) {
    while (b != o.f.end() && b->first < s) ++b;
    if (b == o.f.end() || b->first != s || b->second < e) return false;
  }
  return true;
}

Monomial Monomial::exact_quotient(const Monomial& o) const {
  // o / *this, with *this the divisor; requires divides(o)
  Monomial r;
  auto d = f.begin();
  for (auto& [s, e] : o.f) {
    if (d != f.end() && d->first < s)
      throw symbolic_error("monomial quotient not exact");
    int sub = 0;
    if (d != f.end() && d->first == s) {
      sub = d->second;
      ++d;
    }
    int rem = e - sub;
    if (rem < 0) throw symbolic_error("monomial quotient not exact");
    if (rem > 0) r.f.emplace_back(s, rem);
  }
  if (d != f.end()) throw symbolic_error("monomial quotient not exact");
  return r;
}

Monomial Monomial::pow(int e) const {
  Monomial r;
  if (e == 0) return r;
  r.f = f;
  for (auto& [s, x] : r.f) x *= e;
  return r;
}

std::strong_ordering mono_cmp(const Monomial& a, const Monomial& b) {
  if (auto c = a.total_degree() <=> b.total_degree(); c != 0) return c;
  // Equal total degree: lexicographic scan. A smaller symbol key with a
  // higher exponent wins, matching the usual lex tie-break.
  auto x = a.f.begin(), y = b.f.begin();
  while (x != a.f.end() && y != b.f.end()) {
    if (x->first != y->first)
      return x->first < y->first ? std::strong_ordering::greater
                                 : std::strong_ordering::less;
    if (x->second != y->second) return x->second <=> y->second;
    ++x, ++y;
  }
  if (x != a.f.end()) return std::strong_ordering::greater;
  if (y != b.f.end()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

Poly Poly::constant(const Rat& c) {
  Poly p;
  if (c != 0) p.t_.emplace(Monomial::one(), c);
  return p;
}

Poly Poly::var(Sym s, int exp) {
  Poly p;
  p.t_.emplace(Monomial::var(s, exp), Rat(1));
  return p;
}

bool Poly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one());
}

Rat Poly::constant_value() const {
  if (t_.empty()) return Rat(0);
  if (!is_constant()) throw symbolic_error("not a constant polynomial");
  return t_.begin()->second;
}

int Poly::total_degree() const {
  return t_.empty() ? -1 : t_.begin()->first.total_degree();
}

int Poly::degree_in(Sym s) const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.degree_in(s));
  return d;
}

std::vector<Sym> Poly::variables() const {
  std::vector<Sym> v;
  for (auto& [m, c] : t_)
    for (auto& [s, e] : m.f) v.push_back(s);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool Poly::depends_on(Sym s) const {
  for (auto& [m, c] : t_)
    if (m.degree_in(s) > 0) return true;
  return false;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = t_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (auto& [m, c] : o.t_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (auto& [m, c] : o.t_) r.add_term(m, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (auto& [m1, c1] : t_)
    for (auto& [m2, c2] : o.t_) r.add_term(m1.times(m2), c1 * c2);
  return r;
}

Poly Poly::scaled(const Rat& c) const {
  Poly r;
  if (c == 0) return r;
  for (auto& [m, x] : t_) r.t_.emplace(m, x * c);
  return r;
}

Poly Poly::pow(int e) const {
  if (e < 0) throw symbolic_error("negative power on a polynomial");
  Poly r = constant(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

Poly Poly::derivative(Sym s) const {
  Poly r;
  for (auto& [m, c] : t_) {
    int e = m.degree_in(s);
    if (e == 0) continue;
    Monomial dm;
    for (auto& [v, x] : m.f) {
      if (v == s) {
        if (x > 1) dm.f.emplace_back(v, x - 1);
      } else {
        dm.f.emplace_back(v, x);
      }
    }
    r.add_term(dm, c * e);
  }
  return r;
}

Rat Poly::eval(const std::map<Sym, Rat>& point) const {
  Rat acc(0);
  for (auto& [m, c] : t_) {
    Rat term = c;
    for (auto& [s, e] : m.f) {
      auto it = point.find(s);
      if (it == point.end())
        throw symbolic_error("evaluation point misses " + default_sym_name(s));
      Rat p(1);
      for (int i = 0; i < e; ++i) p *= it->second;
      term *= p;
    }
    acc += term;
  }
  return acc;
}

Poly Poly::subs_syms(const std::map<Sym, Sym>& ren) const {
  Poly r;
  for (auto& [m, c] : t_) {
    Monomial nm;
    std::map<Sym, int> exps;
    for (auto& [s, e] : m.f) {
      auto it = ren.find(s);
      exps[it == ren.end() ? s : it->second] += e;
    }
    for (auto& [s, e] : exps)
      if (e != 0) nm.f.emplace_back(s, e);
    r.add_term(nm, c);
  }
  return r;
}

const Monomial& Poly::leading_monomial() const {
  if (t_.empty()) throw symbolic_error("leading term of zero");
  return t_.begin()->first;
}

const Rat& Poly::leading_coefficient() const {
  if (t_.empty()) throw symbolic_error("leading term of zero");
  return t_.begin()->second;
}

bool Poly::try_exact_quotient(const Poly& d, Poly& q) const {
  if (d.is_zero()) throw division_by_zero();
  q = Poly();
  Poly r = *this;
  const Monomial& dm = d.leading_monomial();
  const Rat& dc = d.leading_coefficient();
  while (!r.is_zero()) {
    const Monomial& rm = r.leading_monomial();
    if (!dm.divides(rm)) return false;
    Monomial qm = dm.exact_quotient(rm);
    Rat qc = r.leading_coefficient() / dc;
    Poly t;
    t.t_.emplace(qm, qc);
    q = q + t;
    r = r - t * d;
  }
  return true;
}

Poly Poly::exact_quotient(const Poly& d) const {
  Poly q;
  if (!try_exact_quotient(d, q)) throw symbolic_error("inexact division");
  return q;
}

Poly Poly::monic() const {
  if (t_.empty()) return *this;
  return scaled(Rat(1) / leading_coefficient());
}

std::map<int, Poly> Poly::coeffs_in(Sym s) const {
  std::map<int, Poly> out;
  for (auto& [m, c] : t_) {
    int e = m.degree_in(s);
    Monomial rest;
    for (auto& [v, x] : m.f)
      if (v != s) rest.f.emplace_back(v, x);
    out[e].add_term(rest, c);
  }
  return out;
}

Poly Poly::coeff_of(Sym s, int deg) const {
  Poly out;
  for (auto& [m, c] : t_) {
    if (m.degree_in(s) != deg) continue;
    Monomial rest;
    for (auto& [v, x] : m.f)
      if (v != s) rest.f.emplace_back(v, x);
    out.add_term(rest, c);
  }
  return out;
}

namespace {

// Pseudo-remainder of a by b with respect to s; contents are stripped later
// so the extra leading-coefficient multiples are harmless.
Poly prem(Poly a, const Poly& b, Sym s) {
  int db = b.degree_in(s);
  Poly lb = b.coeff_of(s, db);
  while (!a.is_zero()) {
    int da = a.degree_in(s);
    if (da < db) break;
    Poly la = a.coeff_of(s, da);
    a = a * lb - la * b * Poly::var(s, da - db);
  }
  return a;
}

// Content of a viewed as univariate in s: gcd of its coefficients.
Poly content_in(const Poly& a, Sym s) {
  Poly g;
  for (auto& [d, c] : a.coeffs_in(s)) g = poly_gcd(g, c);
  return g;
}

Poly primitive_in(const Poly& a, Sym s) {
  Poly c = content_in(a, s);
  if (c.is_zero()) return a;
  return a.exact_quotient(c);
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);

  // Main variable: the largest symbol appearing in either operand.
  Sym s = a.variables().back();
  if (auto bv = b.variables(); bv.back().key > s.key) s = bv.back();

  if (a.degree_in(s) == 0 || b.degree_in(s) == 0) {
    // One side is free of the main variable; the gcd divides its content.
    const Poly& flat = a.degree_in(s) == 0 ? a : b;
    const Poly& other = a.degree_in(s) == 0 ? b : a;
    return poly_gcd(flat, content_in(other, s));
  }

  Poly ca = content_in(a, s), cb = content_in(b, s);
  Poly g = poly_gcd(ca, cb);
  Poly p = a.exact_quotient(ca), q = b.exact_quotient(cb);
  if (p.degree_in(s) < q.degree_in(s)) std::swap(p, q);

  while (true) {
    Poly r = prem(p, q, s);
    if (r.is_zero()) {
      return (g * primitive_in(q, s)).monic();
    }
    if (r.degree_in(s) == 0) {
      return g.monic();
    }
    p = q;
    q = primitive_in(r, s);
  }
}

std::vector<std::pair<Poly, int>> square_free_factors(const Poly& p) {
  std::vector<std::pair<Poly, int>> out;
  if (p.is_zero() || p.is_constant()) return out;

  // Step 1: pull out plain variable powers (the monomial content).
  Poly rest = p;
  std::vector<Sym> vars = p.variables();
  for (Sym s : vars) {
    int e = -1;
    for (auto& [m, c] : rest.terms()) {
      int d = m.degree_in(s);
      e = e < 0 ? d : std::min(e, d);
      if (e == 0) break;
    }
    if (e > 0) {
      out.emplace_back(Poly::var(s), e);
      rest = rest.exact_quotient(Poly::var(s, e));
    }
  }
  if (rest.is_constant()) return out;

  // Step 2: square-free split of the remainder. In characteristic zero
  // gcd(p, dp/dv1, ..., dp/dvk) collects each repeated factor with
  // multiplicity one less, so the classic peeling loop applies.
  Poly g = rest;
  bool first = true;
  for (Sym s : rest.variables()) {
    Poly d = rest.derivative(s);
    g = first ? poly_gcd(rest, d) : poly_gcd(g, d);
    first = false;
  }
  Poly c = rest.exact_quotient(g); // product of the distinct factors
  int mult = 1;
  while (!g.is_constant()) {
    Poly c2 = poly_gcd(c, g);
    Poly exact = c.exact_quotient(c2); // factors of multiplicity == mult
    if (!exact.is_constant()) out.emplace_back(exact.monic(), mult);
    g = g.exact_quotient(c2);
    c = c2;
    ++mult;
  }
  if (!c.is_constant()) out.emplace_back(c.monic(), mult);
  return out;
}

} // namespace jetsym
