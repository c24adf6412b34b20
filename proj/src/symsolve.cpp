#include "jetsym/symsolve.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "jetsym/linalg.hpp"

namespace jetsym {

namespace {

// Precedence of derivation variables: states before velocities, lower
// variable index first. Smaller rank compares greater in the lex step.
std::pair<int, int> dvar_rank(Sym s) {
  return {s.k(), static_cast<int>(s.i())};
}

DTerm dterm_times(const DTerm& t, Sym v) {
  DTerm r = t;
  auto rv = dvar_rank(v);
  auto it = r.d.begin();
  while (it != r.d.end() && dvar_rank(it->first) < rv) ++it;
  if (it != r.d.end() && it->first == v)
    ++it->second;
  else
    r.d.insert(it, {v, 1});
  return r;
}

bool dterm_divides(const DTerm& a, const DTerm& b) {
  for (const auto& [v, e] : a.d) {
    auto it = std::find_if(b.d.begin(), b.d.end(),
                           [&](const auto& p) { return p.first == v; });
    if (it == b.d.end() || it->second < e) return false;
  }
  return true;
}

// b / a as a flat list of derivation variables.
std::vector<Sym> dterm_quotient(const DTerm& a, const DTerm& b) {
  std::vector<Sym> out;
  for (const auto& [v, e] : b.d) {
    int have = 0;
    for (const auto& [w, f] : a.d)
      if (w == v) have = f;
    for (int r = have; r < e; ++r) out.push_back(v);
  }
  return out;
}

DTerm dterm_lcm(const DTerm& a, const DTerm& b) {
  DTerm r = a;
  for (const auto& [v, e] : b.d) {
    int have = 0;
    for (const auto& [w, f] : r.d)
      if (w == v) have = f;
    for (int k = have; k < e; ++k) r = dterm_times(r, v);
  }
  return r;
}

Pde pde_derive_multi(Pde p, const std::vector<Sym>& theta, const Ansatz& an) {
  for (Sym v : theta) p = pde_derive(p, v, an);
  return p;
}

// Total comparison used for canonical sorting and deduplication.
bool pde_less(const Pde& a, const Pde& b) {
  std::size_t k = 0;
  for (; k < a.terms.size() && k < b.terms.size(); ++k) {
    auto c = dterm_cmp(a.terms[k].first, b.terms[k].first);
    if (c != std::strong_ordering::equal)
      return c == std::strong_ordering::less;
    if (!(a.terms[k].second == b.terms[k].second))
      return to_string(a.terms[k].second) < to_string(b.terms[k].second);
  }
  return a.terms.size() < b.terms.size();
}

} // namespace

Ansatz Ansatz::states_only(const NormalSystem& ns) {
  Ansatz a;
  std::vector<Sym> states;
  for (int i = 1; i <= ns.n; ++i) states.push_back(Sym::jet(i, 0));
  a.allowed.assign(static_cast<std::size_t>(ns.n), states);
  return a;
}

Ansatz Ansatz::from_branch(const ConstraintSet::BranchAnsatz& ba) {
  Ansatz a;
  a.allowed = ba.allowed;
  return a;
}

bool Ansatz::depends(int unknown, Sym v) const {
  const auto& al = allowed[static_cast<std::size_t>(unknown - 1)];
  return std::find(al.begin(), al.end(), v) != al.end();
}

int DTerm::degree() const {
  int deg = 0;
  for (const auto& [v, e] : d) deg += e;
  return deg;
}

std::strong_ordering dterm_cmp(const DTerm& a, const DTerm& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da <=> db;
  std::size_t ia = 0, ib = 0;
  while (ia < a.d.size() && ib < b.d.size()) {
    auto ra = dvar_rank(a.d[ia].first), rb = dvar_rank(b.d[ib].first);
    if (ra != rb)
      return ra < rb ? std::strong_ordering::greater
                     : std::strong_ordering::less;
    if (a.d[ia].second != b.d[ib].second)
      return a.d[ia].second <=> b.d[ib].second;
    ++ia;
    ++ib;
  }
  if (ia != a.d.size() || ib != b.d.size())
    return ia != a.d.size() ? std::strong_ordering::greater
                            : std::strong_ordering::less;
  return a.unknown <=> b.unknown;
}

Pde pde_normal(std::vector<std::pair<DTerm, Expr>> terms) {
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
    return dterm_cmp(x.first, y.first) == std::strong_ordering::greater;
  });
  Pde p;
  for (auto& [t, c] : terms) {
    if (c.is_zero()) continue;
    if (!p.terms.empty() && p.terms.back().first == t)
      p.terms.back().second = p.terms.back().second + c;
    else
      p.terms.push_back({t, c});
  }
  std::erase_if(p.terms,
                [](const auto& tc) { return tc.second.is_zero(); });
  return p;
}

Pde pde_add(const Pde& a, const Pde& b) {
  auto terms = a.terms;
  terms.insert(terms.end(), b.terms.begin(), b.terms.end());
  return pde_normal(std::move(terms));
}

Pde pde_scale(const Pde& a, const Expr& c) {
  if (c.is_zero()) return {};
  Pde p = a;
  for (auto& [t, cf] : p.terms) cf = cf * c;
  return p;
}

Pde pde_derive(const Pde& p, Sym v, const Ansatz& an) {
  std::vector<std::pair<DTerm, Expr>> out;
  for (const auto& [t, c] : p.terms) {
    Expr dc = c.partial(v);
    if (!dc.is_zero()) out.push_back({t, dc});
    if (an.depends(t.unknown, v)) out.push_back({dterm_times(t, v), c});
  }
  return pde_normal(std::move(out));
}

Pde pde_monic(const Pde& p) {
  if (p.is_zero()) return p;
  const Expr& lc = p.terms.front().second;
  if (lc.is_zero())
    throw coefficient_vanishes("leading coefficient of " + to_string(p));
  Pde r = p;
  for (auto& [t, c] : r.terms) c = c / lc;
  return r;
}

Pde pde_reduce(const Pde& p, const std::vector<Pde>& basis, const Ansatz& an,
               int skip) {
  Pde cur = p;
  bool again = true;
  while (again) {
    again = false;
    for (std::size_t ti = 0; ti < cur.terms.size() && !again; ++ti) {
      const DTerm& t = cur.terms[ti].first;
      const Expr c = cur.terms[ti].second;
      for (std::size_t bi = 0; bi < basis.size(); ++bi) {
        if (static_cast<int>(bi) == skip || basis[bi].is_zero()) continue;
        const DTerm& lt = basis[bi].lead();
        if (lt.unknown != t.unknown || !dterm_divides(lt, t)) continue;
        Pde red = pde_derive_multi(pde_monic(basis[bi]),
                                   dterm_quotient(lt, t), an);
        cur = pde_add(cur, pde_scale(red, -c));
        again = true;
        break;
      }
    }
  }
  return cur;
}

Expr pde_eval_at(const Pde& p, const std::vector<Expr>& a) {
  Expr s;
  for (const auto& [t, c] : p.terms) {
    Expr g = a.at(static_cast<std::size_t>(t.unknown - 1));
    for (const auto& [v, e] : t.d)
      for (int r = 0; r < e; ++r) g = g.partial(v);
    s = s + c * g;
  }
  return s;
}

std::string to_string(const Pde& p, const NameFn& names) {
  auto nm = [&](Sym s) {
    if (names) {
      std::string t = names(s);
      if (!t.empty()) return t;
    }
    return default_sym_name(s);
  };
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [t, c] : p.terms) {
    std::string term;
    if (t.d.empty()) {
      term = "a" + std::to_string(t.unknown);
    } else {
      int deg = 0;
      for (const auto& [v, e] : t.d) deg += e;
      term = (deg == 1 ? std::string("d(") : "d" + std::to_string(deg) + "(");
      term += "a" + std::to_string(t.unknown) + ")/";
      for (const auto& [v, e] : t.d) {
        term += "d(" + nm(v) + ")";
        if (e > 1) term += "^" + std::to_string(e);
      }
    }
    std::string cs = to_string(c);
    std::string piece;
    if (cs == "1")
      piece = term;
    else if (cs == "-1")
      piece = "-" + term;
    else if (cs.find_first_of("+- ") == std::string::npos)
      piece = cs + "*" + term;
    else
      piece = "(" + cs + ")*" + term;
    out += out.empty() ? piece : " + " + piece;
  }
  return out;
}

LinearPDESystem derive_constraints(const NormalSystem& ns, const Ansatz& an,
                                   int prolong_order) {
  if (static_cast<int>(an.allowed.size()) != ns.n)
    throw symbolic_error("ansatz must declare one set per component");
  for (int i = 1; i <= ns.n; ++i)
    for (Sym v : an.allowed[static_cast<std::size_t>(i - 1)]) {
      if (v.kind() != SymKind::Jet || v.i() < 1 ||
          static_cast<int>(v.i()) > ns.n)
        throw symbolic_error("ansatz variable outside the system");
      if (v.k() > 0 && static_cast<int>(v.i()) > ns.m)
        throw symbolic_error("ansatz variable is not a canonical coordinate");
    }

  std::set<Sym> allowed_union;
  for (const auto& al : an.allowed)
    for (Sym v : al) allowed_union.insert(v);

  auto tau_unknown = [&](int j) {
    Expr s;
    for (Sym v : an.allowed[static_cast<std::size_t>(j - 1)])
      s = s + Expr::var(Sym::partial(j, static_cast<int>(v.i()), v.k())) *
                  ns.tau_of_jet(v);
    return s;
  };

  std::vector<Pde> eqs;
  for (int i = ns.m + 1; i <= ns.n; ++i) {
    Expr E = tau_unknown(i);
    const Expr& f = ns.f_of(i);
    for (Sym s : f.variables()) {
      Expr df = f.partial(s);
      Expr img;
      if (s.k() == 0) {
        img = Expr::var(Sym::fiber(static_cast<int>(s.i())));
      } else {
        if (prolong_order < s.k())
          throw ansatz_too_small("the dynamics drag a component through " +
                                 std::to_string(s.k()) +
                                 " derivatives, allowed " +
                                 std::to_string(prolong_order));
        img = tau_unknown(static_cast<int>(s.i()));
      }
      E = E - df * img;
    }
    if (E.is_zero()) continue;

    std::map<Monomial, std::vector<std::pair<DTerm, Expr>>, MonoGrlexGreater>
        buckets;
    for (const auto& [mo, c] : E.num().terms()) {
      Monomial freepart, coeffpart;
      DTerm t;
      bool have = false;
      for (const auto& [s, e] : mo.f) {
        if (s.kind() == SymKind::Fiber || s.kind() == SymKind::Partial) {
          if (have || e != 1)
            throw symbolic_error("residual is not linear in the components");
          have = true;
          if (s.kind() == SymKind::Fiber) {
            t.unknown = static_cast<int>(s.i());
          } else {
            t.unknown = static_cast<int>(s.i());
            t.d = {{Sym::jet(static_cast<int>(s.j()), s.k()), 1}};
          }
        } else if (allowed_union.count(s)) {
          coeffpart = coeffpart.times(Monomial::var(s, e));
        } else {
          freepart = freepart.times(Monomial::var(s, e));
        }
      }
      if (!have)
        throw ansatz_too_small("free-variable source term without components");
      Poly cp;
      cp.add_term(coeffpart, c);
      buckets[freepart].push_back({t, Expr(cp)});
    }
    for (auto& [fp, terms] : buckets) {
      Pde p = pde_normal(std::move(terms));
      if (!p.is_zero()) eqs.push_back(pde_monic(p));
    }
  }

  std::sort(eqs.begin(), eqs.end(), pde_less);
  eqs.erase(std::unique(eqs.begin(), eqs.end()), eqs.end());
  return {an, eqs};
}

LinearPDESystem groebner_complete(const LinearPDESystem& sys) {
  const Ansatz& an = sys.ansatz;
  std::vector<Pde> G;
  for (const auto& e : sys.equations)
    if (!e.is_zero()) G.push_back(pde_monic(e));

  struct PairRec {
    DTerm lcm;
    std::size_t i, j;
  };
  auto pair_less = [](const PairRec& a, const PairRec& b) {
    auto c = dterm_cmp(a.lcm, b.lcm);
    if (c != std::strong_ordering::equal)
      return c == std::strong_ordering::less;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  std::vector<PairRec> queue;
  auto push_pairs = [&](std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      if (G[i].lead().unknown != G[k].lead().unknown) continue;
      queue.push_back({dterm_lcm(G[i].lead(), G[k].lead()), i, k});
    }
    std::sort(queue.begin(), queue.end(), pair_less);
  };
  for (std::size_t k = 1; k < G.size(); ++k) push_pairs(k);

  while (!queue.empty()) {
    PairRec pr = queue.front();
    queue.erase(queue.begin());
    Pde s = pde_add(
        pde_derive_multi(G[pr.i], dterm_quotient(G[pr.i].lead(), pr.lcm), an),
        pde_scale(pde_derive_multi(
                      G[pr.j], dterm_quotient(G[pr.j].lead(), pr.lcm), an),
                  Expr::integer(-1)));
    Pde r = pde_reduce(s, G, an);
    if (r.is_zero()) continue;
    G.push_back(pde_monic(r));
    push_pairs(G.size() - 1);
  }

  // Inter-reduce to the canonical basis.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < G.size(); ++k) {
      if (G[k].is_zero()) continue;
      Pde r = pde_reduce(G[k], G, an, static_cast<int>(k));
      if (!r.is_zero()) r = pde_monic(r);
      if (!(r == G[k])) {
        G[k] = r;
        changed = true;
      }
    }
  }
  std::erase_if(G, [](const Pde& p) { return p.is_zero(); });
  std::sort(G.begin(), G.end(), pde_less);
  G.erase(std::unique(G.begin(), G.end()), G.end());
  return {an, G};
}

namespace {

void enum_exponents(std::size_t nvars, int maxdeg,
                    std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (cur.size() == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= maxdeg; ++e) {
    cur.push_back(e);
    enum_exponents(nvars, maxdeg - e, cur, out);
    cur.pop_back();
  }
}

} // namespace

SymmetryBasis solve_polynomial_ansatz(const NormalSystem& ns, const Ansatz& an,
                                      int degree) {
  if (degree < 0) throw symbolic_error("ansatz degree must be non-negative");
  if (static_cast<int>(an.allowed.size()) != ns.n)
    throw symbolic_error("ansatz must declare one set per component");

  std::vector<Expr> shape(static_cast<std::size_t>(ns.n));
  std::vector<Sym> csyms;
  int counter = 0;
  for (int i = 1; i <= ns.n; ++i) {
    const auto& vars = an.allowed[static_cast<std::size_t>(i - 1)];
    std::vector<std::vector<int>> exps;
    std::vector<int> cur;
    enum_exponents(vars.size(), degree, cur, exps);
    for (const auto& ev : exps) {
      Sym c = Sym::coeff(++counter);
      csyms.push_back(c);
      Expr mono = Expr::integer(1);
      for (std::size_t k = 0; k < vars.size(); ++k)
        if (ev[k] > 0) mono = mono * Expr::var(vars[k]).pow(ev[k]);
      shape[static_cast<std::size_t>(i - 1)] =
          shape[static_cast<std::size_t>(i - 1)] + Expr::var(c) * mono;
    }
  }

  VField probe{shape};
  std::vector<Expr> residuals = commutator_residuals(ns, probe);

  std::map<Sym, std::size_t> col;
  for (std::size_t k = 0; k < csyms.size(); ++k) col[csyms[k]] = k;
  QMatrix M;
  for (const Expr& r : residuals) {
    if (r.is_zero()) continue;
    std::map<Monomial, std::vector<Rat>, MonoGrlexGreater> rows;
    for (const auto& [mo, c] : r.num().terms()) {
      Monomial jets;
      Sym cs = Sym::coeff(0);
      bool found = false;
      for (const auto& [s, e] : mo.f) {
        if (s.kind() == SymKind::Coeff) {
          if (found || e != 1)
            throw symbolic_error("residual is not linear in the coefficients");
          cs = s;
          found = true;
        } else {
          jets = jets.times(Monomial::var(s, e));
        }
      }
      if (!found)
        throw symbolic_error("residual has a coefficient-free source term");
      auto& row = rows[jets];
      row.resize(csyms.size(), Rat(0));
      row[col[cs]] += c;
    }
    for (auto& [mo, row] : rows) {
      row.resize(csyms.size(), Rat(0));
      M.push_back(row);
    }
  }

  std::vector<std::vector<Rat>> null;
  if (M.empty()) {
    for (std::size_t k = 0; k < csyms.size(); ++k) {
      std::vector<Rat> v(csyms.size(), Rat(0));
      v[k] = 1;
      null.push_back(v);
    }
  } else {
    null = nullspace(M);
  }

  SymmetryBasis out;
  out.ansatz = an;
  for (const auto& v : null) {
    std::map<Sym, Expr> bind;
    for (std::size_t k = 0; k < csyms.size(); ++k)
      bind[csyms[k]] = Expr::rational(v[k]);
    VField member;
    for (const auto& ai : shape) member.a.push_back(ai.substitute(bind));
    if (!is_symmetry(ns, member))
      throw symbolic_error("solver produced a field that fails verification");
    out.basis.push_back(std::move(member));
  }
  for (std::size_t k = 0; k < out.basis.size(); ++k)
    out.parameters.push_back("c" + std::to_string(k + 1));
  return out;
}

bool verify_symmetry(const NormalSystem& ns, const VField& vf) {
  return is_symmetry(ns, vf);
}

} // namespace jetsym
