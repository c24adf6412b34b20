#include "jetsym/orderbound.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace jetsym {

namespace {

bool is_avar(Sym s) { return s.kind() == SymKind::AVar; }

int a_degree(const Monomial& mo) {
  int d = 0;
  for (const auto& [s, e] : mo.f)
    if (is_avar(s)) d += e;
  return d;
}

int a_degree(const Poly& p) {
  int d = 0;
  for (const auto& [mo, c] : p.terms()) d = std::max(d, a_degree(mo));
  return d;
}

bool a_homogeneous(const Poly& p, int deg) {
  for (const auto& [mo, c] : p.terms())
    if (a_degree(mo) != deg) return false;
  return true;
}

bool jet_free(const Poly& p) {
  for (Sym s : p.variables())
    if (!is_avar(s)) return false;
  return true;
}

std::vector<int> a_vars_of(const Poly& p) {
  std::set<int> ix;
  for (Sym s : p.variables())
    if (is_avar(s)) ix.insert(s.i());
  return {ix.begin(), ix.end()};
}

int velocity_degree(const Poly& p) {
  int d = 0;
  for (const auto& [mo, c] : p.terms()) {
    int t = 0;
    for (const auto& [s, e] : mo.f)
      if (s.kind() == SymKind::Jet && s.k() == 1) t += e;
    d = std::max(d, t);
  }
  return d;
}

Expr d_apply(int n, const Expr& e) {
  Expr out;
  for (int i = 1; i <= n; ++i) {
    Expr de = e.partial(Sym::jet(i, 1));
    if (de.is_zero()) continue;
    out = out + Expr::var(Sym::avar(i)) * de;
  }
  return out;
}

// Linear (or affine) form in the A variables with polynomial coefficients.
struct LinForm {
  std::map<int, Poly> coeff;
  Poly rest;
};

bool decompose_linear(const Poly& p, LinForm& lf) {
  lf = {};
  bool seen = false;
  for (const auto& [mo, c] : p.terms()) {
    int ad = a_degree(mo);
    if (ad > 1) return false;
    if (ad == 0) {
      lf.rest.add_term(mo, c);
      continue;
    }
    int var = 0;
    Monomial jetpart;
    for (const auto& [s, e] : mo.f) {
      if (is_avar(s)) {
        var = static_cast<int>(s.i());
        if (e != 1) return false;
      } else {
        jetpart = jetpart.times(Monomial::var(s, e));
      }
    }
    lf.coeff[var].add_term(jetpart, c);
    seen = true;
  }
  return seen;
}

int pick_pivot(const LinForm& lf) {
  int pivot = 0;
  bool pivot_const = false;
  for (const auto& [v, cp] : lf.coeff) {
    if (cp.is_zero()) continue;
    bool c0 = cp.is_constant();
    if (!pivot || (c0 && !pivot_const) || (c0 == pivot_const && v > pivot)) {
      pivot = v;
      pivot_const = c0;
    }
  }
  return pivot;
}

Expr solve_linear_form(const LinForm& lf, int pivot) {
  Poly num = lf.rest;
  for (const auto& [v, cp] : lf.coeff)
    if (v != pivot) num = num + cp * Poly::var(Sym::avar(v));
  return -(Expr(num) / Expr(lf.coeff.at(pivot)));
}

// Split a jet-free A-homogeneous form in two A variables through its
// dehomogenization g(t) = p(t, 1): rational roots become linear factors, a
// quadratic remainder is kept whole. Constant factors are dropped.
std::vector<Poly> split_binary_form(const Poly& p, int v1, int v2) {
  Sym s1 = Sym::avar(v1), s2 = Sym::avar(v2);
  std::vector<Poly> out;

  int min1 = p.total_degree(), min2 = p.total_degree();
  for (const auto& [mo, c] : p.terms()) {
    min1 = std::min(min1, mo.degree_in(s1));
    min2 = std::min(min2, mo.degree_in(s2));
  }
  if (min1 > 0) out.push_back(Poly::var(s1));
  if (min2 > 0) out.push_back(Poly::var(s2));

  std::map<int, Rat> g; // t-degree -> coefficient, t = A_{v1}/A_{v2}
  int d = 0;
  for (const auto& [mo, c] : p.terms()) {
    int e1 = mo.degree_in(s1) - min1;
    g[e1] += c;
    d = std::max(d, e1);
  }
  while (d > 0 && g[d] == 0) --d;

  auto eval_g = [&](const Rat& t) {
    Rat acc = 0;
    for (int k = d; k >= 0; --k) acc = acc * t + g[k];
    return acc;
  };
  auto deflate = [&](const Rat& r) {
    // divide g by (t - r) in place
    std::map<int, Rat> q;
    Rat carry = 0;
    for (int k = d; k >= 1; --k) {
      carry = carry * r + g[k];
      q[k - 1] = carry;
    }
    g = q;
    --d;
  };

  // Rational root candidates from the integer-scaled coefficients.
  mpz_class den_lcm = 1;
  for (int k = 0; k <= d; ++k)
    den_lcm = lcm(den_lcm, g[k].get_den());
  Rat s0 = g[0] * Rat(den_lcm), sd = g[d] * Rat(den_lcm);
  s0.canonicalize();
  sd.canonicalize();
  mpz_class c0 = s0.get_num(), cd = sd.get_num();
  auto divisors = [](const mpz_class& v) {
    std::vector<mpz_class> ds;
    mpz_class a = abs(v);
    for (mpz_class t = 1; t * t <= a && t < 100000; ++t)
      if (a % t == 0) {
        ds.push_back(t);
        ds.push_back(a / t);
      }
    return ds;
  };
  std::set<Rat> candidates;
  for (const auto& pn : divisors(c0))
    for (const auto& qd : divisors(cd)) {
      Rat r(pn, qd);
      r.canonicalize();
      candidates.insert(r);
      candidates.insert(-r);
    }
  for (const Rat& r : candidates)
    while (d >= 1 && eval_g(r) == 0) {
      out.push_back(Poly::var(s1).scaled(Rat(r.get_den())) -
                    Poly::var(s2).scaled(Rat(r.get_num())));
      deflate(r);
    }

  if (d == 1) {
    Rat r = -g[0] / g[1];
    out.push_back(Poly::var(s1).scaled(Rat(r.get_den())) -
                  Poly::var(s2).scaled(Rat(r.get_num())));
  } else if (d >= 2) {
    Poly rem;
    for (int k = 0; k <= d; ++k) {
      if (g[k] == 0) continue;
      Monomial mo = Monomial::var(s1, k).times(Monomial::var(s2, d - k));
      rem.add_term(mo, g[k]);
    }
    out.push_back(rem);
  }
  return out;
}

enum class FKind { Linear, DefiniteQuad, Opaque };

struct AFactor {
  Poly p;
  FKind kind;
};

AFactor classify(const Poly& f) {
  if (a_degree(f) == 1) return {f, FKind::Linear};
  auto av = a_vars_of(f);
  if (a_degree(f) == 2 && av.size() == 2 && jet_free(f) &&
      a_homogeneous(f, 2)) {
    Sym s1 = Sym::avar(av[0]), s2 = Sym::avar(av[1]);
    Rat a = 0, b = 0, c = 0;
    for (const auto& [mo, cf] : f.terms()) {
      int e1 = mo.degree_in(s1);
      if (e1 == 2)
        a = cf;
      else if (e1 == 1)
        b = cf;
      else
        c = cf;
    }
    if (b * b - 4 * a * c < 0) return {f, FKind::DefiniteQuad};
  }
  return {f, FKind::Opaque};
}

std::vector<AFactor> a_factors(const Poly& p) {
  std::vector<AFactor> out;
  for (const auto& [fct, mult] : square_free_factors(p)) {
    if (a_degree(fct) == 0) continue; // nonzero in the coefficient field
    auto av = a_vars_of(fct);
    if (a_degree(fct) >= 2 && av.size() == 2 && jet_free(fct) &&
        a_homogeneous(fct, a_degree(fct))) {
      for (const Poly& q : split_binary_form(fct, av[0], av[1]))
        out.push_back(classify(q));
      continue;
    }
    out.push_back(classify(fct));
  }
  return out;
}

struct NodeState {
  std::vector<Expr> gens;
  std::map<Sym, Expr> bind; // solved A variables, right side fully closed
};

void apply_binding(NodeState& st, Sym a, const Expr& rhs) {
  std::map<Sym, Expr> one{{a, rhs}};
  for (auto& [k, v] : st.bind) v = v.substitute(one);
  st.bind[a] = rhs;
  std::vector<Expr> next;
  for (const auto& g : st.gens) {
    Expr s = g.substitute(one);
    if (!s.is_zero()) next.push_back(s);
  }
  st.gens = std::move(next);
}

struct Engine {
  int n = 0;
  int budget = 0;
  std::vector<std::string> trace;
  std::vector<ABranch> leaves;

  ABranch extract(const NodeState& st) const {
    ABranch b;
    for (int i = 1; i <= n; ++i) {
      auto it = st.bind.find(Sym::avar(i));
      if (it == st.bind.end()) continue;
      if (it->second.is_zero())
        b.zero.push_back(i);
      else
        b.relations.push_back(Expr::var(Sym::avar(i)) - it->second);
    }
    b.unresolved = st.gens;
    b.trivial =
        (static_cast<int>(b.zero.size()) == n) && b.unresolved.empty();
    return b;
  }

  bool linear_passes(NodeState& st) {
    bool progress = false;
    for (bool again = true; again;) {
      again = false;
      for (std::size_t gi = 0; gi < st.gens.size(); ++gi) {
        LinForm lf;
        if (!decompose_linear(st.gens[gi].num(), lf)) continue;
        int pivot = pick_pivot(lf);
        if (!pivot) continue;
        Expr rhs = solve_linear_form(lf, pivot);
        trace.push_back("solve A" + std::to_string(pivot) + " = " +
                        to_string(rhs));
        st.gens.erase(st.gens.begin() + static_cast<long>(gi));
        apply_binding(st, Sym::avar(pivot), rhs);
        progress = again = true;
        break;
      }
    }
    return progress;
  }

  void run(NodeState st) {
    if (--budget < 0)
      throw depth_exceeded("branch node budget exhausted");
    linear_passes(st);
    if (st.gens.empty()) {
      leaves.push_back(extract(st));
      return;
    }

    std::vector<std::vector<AFactor>> fs(st.gens.size());
    int best = -1, best_score = 0;
    for (std::size_t gi = 0; gi < st.gens.size(); ++gi) {
      fs[gi] = a_factors(st.gens[gi].num());
      if (fs[gi].empty()) continue;
      int score = 2;
      bool any = false;
      for (const auto& f : fs[gi]) {
        if (f.kind == FKind::Opaque)
          score = std::min(score, 1);
        else
          any = true;
      }
      if (!any) score = 0;
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(gi);
      }
    }
    if (best < 0) {
      trace.push_back("stuck: no factor of any generator is solvable");
      leaves.push_back(extract(st));
      return;
    }

    for (const AFactor& f : fs[best]) {
      NodeState child = st;
      child.gens.erase(child.gens.begin() + best);
      switch (f.kind) {
        case FKind::Linear: {
          LinForm lf;
          decompose_linear(f.p, lf);
          int pivot = pick_pivot(lf);
          Expr rhs = solve_linear_form(lf, pivot);
          trace.push_back("branch: factor " + to_string(Expr(f.p)) +
                          " = 0, solve A" + std::to_string(pivot));
          apply_binding(child, Sym::avar(pivot), rhs);
          break;
        }
        case FKind::DefiniteQuad: {
          auto av = a_vars_of(f.p);
          trace.push_back("branch: definite factor " + to_string(Expr(f.p)) +
                          " forces A" + std::to_string(av[0]) + " = A" +
                          std::to_string(av[1]) + " = 0");
          apply_binding(child, Sym::avar(av[0]), Expr());
          apply_binding(child, Sym::avar(av[1]), Expr());
          break;
        }
        case FKind::Opaque: {
          trace.push_back("branch: keep factor " + to_string(Expr(f.p)));
          child.gens.push_back(Expr(f.p));
          break;
        }
      }
      run(std::move(child));
    }
  }
};

std::string branch_key(const ABranch& b) {
  std::ostringstream os;
  for (int z : b.zero) os << z << ",";
  os << "|";
  for (const auto& r : b.relations) os << to_string(r) << ";";
  os << "|";
  for (const auto& u : b.unresolved) os << to_string(u) << ";";
  return os.str();
}

} // namespace

int default_d_depth(const NormalSystem& ns) {
  int d = 0;
  for (int i = ns.m + 1; i <= ns.n; ++i) {
    const Expr& f = ns.f_of(i);
    d = std::max(d, velocity_degree(f.num()) + velocity_degree(f.den()));
  }
  return d + 1;
}

AIdeal d_iterates(const NormalSystem& ns, int depth) {
  if (depth < 1) throw symbolic_error("d_iterates: depth must be positive");
  AIdeal ideal;
  ideal.n = ns.n;
  ideal.m = ns.m;
  ideal.depth = depth;
  for (int i = ns.m + 1; i <= ns.n; ++i) {
    Expr cur = Expr::var(Sym::jet(i, 1)) - ns.f_of(i);
    for (int l = 1; l <= depth; ++l) {
      cur = d_apply(ns.n, cur);
      if (cur.is_zero()) break;
      ideal.generators.push_back(cur);
      ideal.level.push_back(l);
    }
  }
  return ideal;
}

std::string verdict_name(BranchVerdict v) {
  switch (v) {
    case BranchVerdict::OnlyTrivial: return "OnlyTrivial";
    case BranchVerdict::Branches: return "Branches";
    case BranchVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

BranchReport analyze_A_ideal(const AIdeal& ideal, int node_cap) {
  Engine eng;
  eng.n = ideal.n;
  eng.budget = node_cap;
  NodeState root;
  for (const auto& g : ideal.generators)
    if (!g.is_zero()) root.gens.push_back(g);
  eng.run(std::move(root));

  BranchReport rep;
  rep.trace = std::move(eng.trace);
  std::sort(eng.leaves.begin(), eng.leaves.end(),
            [](const ABranch& a, const ABranch& b) {
              return branch_key(a) < branch_key(b);
            });
  eng.leaves.erase(std::unique(eng.leaves.begin(), eng.leaves.end(),
                               [](const ABranch& a, const ABranch& b) {
                                 return branch_key(a) == branch_key(b);
                               }),
                   eng.leaves.end());
  rep.branches = std::move(eng.leaves);

  bool all_trivial = true, any_unresolved = false;
  for (const auto& b : rep.branches) {
    all_trivial = all_trivial && b.trivial;
    any_unresolved = any_unresolved || !b.unresolved.empty();
  }
  if (any_unresolved)
    rep.verdict = BranchVerdict::Inconclusive;
  else if (all_trivial)
    rep.verdict = BranchVerdict::OnlyTrivial;
  else
    rep.verdict = BranchVerdict::Branches;
  rep.note =
      "bound uses the trivial-ideal direction only; surviving branches do "
      "not certify higher-order generators";
  return rep;
}

ConstraintSet order_constraints(const BranchReport& br,
                                const NormalSystem& ns) {
  ConstraintSet cs;
  std::vector<Sym> states;
  for (int i = 1; i <= ns.n; ++i) states.push_back(Sym::jet(i, 0));
  std::vector<std::vector<Sym>> all_states(ns.n, states);

  if (ns.m == 1) {
    cs.order_zero_all = true;
    cs.branches.push_back({{}, all_states});
    cs.note = "single-input system: every integrable generator has order zero";
    return cs;
  }
  if (br.verdict == BranchVerdict::OnlyTrivial) {
    cs.order_zero_all = true;
    cs.branches.push_back({{}, all_states});
    cs.note = "trivial coefficient ideal: generators restricted to order zero";
    return cs;
  }
  if (br.verdict == BranchVerdict::Inconclusive) {
    cs.note = "no order bound derived";
    return cs;
  }

  for (const auto& b : br.branches) {
    if (b.trivial) continue;
    ConstraintSet::BranchAnsatz ba;
    ba.zero = b.zero;
    for (int i = 1; i <= ns.n; ++i) {
      std::vector<Sym> allowed;
      if (std::find(b.zero.begin(), b.zero.end(), i) != b.zero.end()) {
        for (int j : b.zero) allowed.push_back(Sym::jet(j, 0));
      } else {
        allowed = states;
        for (int j : b.zero)
          if (j <= ns.m) allowed.push_back(Sym::jet(j, 1));
      }
      ba.allowed.push_back(std::move(allowed));
    }
    cs.branches.push_back(std::move(ba));
  }
  cs.note =
      "first-order branch ansatz; vanishing coefficients pin the "
      "corresponding generators to order zero";
  return cs;
}

} // namespace jetsym
