#include "jetsym/access.hpp"

#include <algorithm>

namespace jetsym {

namespace {

constexpr std::uint64_t kRankSeed = 0x41434345u;

std::vector<Sym> support_union(const std::vector<SparseField>& fields) {
  std::vector<Sym> coords;
  for (const auto& f : fields)
    for (const auto& [c, e] : f) coords.push_back(c);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

ExprMatrix field_matrix(const std::vector<SparseField>& fields,
                        const std::vector<Sym>& coords) {
  ExprMatrix m;
  m.reserve(fields.size());
  for (const auto& f : fields) {
    std::vector<Expr> row;
    row.reserve(coords.size());
    for (Sym c : coords) {
      auto it = f.find(c);
      row.push_back(it == f.end() ? Expr() : it->second);
    }
    m.push_back(std::move(row));
  }
  return m;
}

int span_dim(const std::vector<SparseField>& fields, RandomRats& rng) {
  if (fields.empty()) return 0;
  return generic_rank(field_matrix(fields, support_union(fields)), rng);
}

} // namespace

AccessReport strong_accessibility(const NormalSystem& ns) {
  ExplicitForm ex = ns.explicit_form();
  RandomRats rng(kRankSeed);
  AccessReport rep;
  std::vector<SparseField> basis;
  auto admit = [&](const SparseField& f, const std::string& label) {
    if (f.empty()) return false;
    std::vector<SparseField> probe = basis;
    probe.push_back(f);
    int d = span_dim(probe, rng);
    if (d <= rep.lie_algebra_dim) return false;
    basis = std::move(probe);
    rep.lie_algebra_dim = d;
    rep.dims.push_back(d);
    rep.generator_log.push_back(label);
    return true;
  };

  const int full = ex.n + ex.m;
  for (int k = 0; k <= ex.n && rep.lie_algebra_dim < full; ++k) {
    for (int j = 1; j <= ex.m; ++j) {
      SparseField f = hat_tau_iterate(ex, j, k);
      std::string label = k == 0 ? "d/du" + std::to_string(j)
                                 : "ad^" + std::to_string(k) + "(d/du" +
                                       std::to_string(j) + ")";
      admit(f, label);
    }
  }
  // Close under brackets; repeat full passes so pairs with newly admitted
  // fields are covered.
  bool grew = true;
  while (grew && rep.lie_algebra_dim < full) {
    grew = false;
    for (size_t i = 0; i + 1 < basis.size() && rep.lie_algebra_dim < full; ++i) {
      for (size_t j = i + 1; j < basis.size() && rep.lie_algebra_dim < full;
           ++j) {
        SparseField br = lie_bracket(basis[i], basis[j]);
        if (admit(br, "[g" + std::to_string(i + 1) + ", g" +
                          std::to_string(j + 1) + "]"))
          grew = true;
      }
    }
  }
  rep.accessible = rep.lie_algebra_dim == full;
  return rep;
}

Expr ExtendedSystem::tau_hat_of(Sym s) const {
  switch (s.kind()) {
    case SymKind::Jet:
    case SymKind::Ctrl:
      return base.tau_apply(Expr::var(s));
    case SymKind::Fiber:
      return a_rhs.at(s.i() - 1);
    case SymKind::FiberB:
      return Expr::var(Sym::fiber_b(s.i(), s.k() + 1));
    case SymKind::Zeta:
      return Expr::var(Sym::zeta(s.i(), s.k() + 1));
    default:
      return Expr();
  }
}

Expr ExtendedSystem::tau_hat(const Expr& e) const {
  Expr acc;
  for (Sym v : e.variables()) acc = acc + e.partial(v) * tau_hat_of(v);
  return acc;
}

NameFn ExtendedSystem::names() const {
  NameFn base_names = base.names();
  return [base_names](Sym s) {
    if (s.kind() == SymKind::Jet || s.kind() == SymKind::Ctrl)
      return base_names(s);
    return default_sym_name(s);
  };
}

ExtendedSystem tangent_extension(const NormalSystem& ns) {
  ExtendedSystem es;
  es.base = ns.explicit_form();
  es.a_rhs.reserve(es.base.n);
  for (int i = 1; i <= es.base.n; ++i) {
    Expr rhs;
    const Expr& fi = es.base.f.at(i - 1);
    for (int h = 1; h <= es.base.n; ++h)
      rhs = rhs + fi.partial(Sym::jet(h, 0)) * Expr::var(Sym::fiber(h));
    for (int j = 1; j <= es.base.m; ++j)
      rhs = rhs + fi.partial(Sym::ctrl(j, 0)) * Expr::var(Sym::fiber_b(j, 0));
    es.a_rhs.push_back(rhs);
  }
  return es;
}

namespace {

// Rows of the vertical iterates ad^l(d/db_{j,0}) written in the d/da_i
// coordinates; level l >= 1. The level-(l+1) row of w is
//   w'_h = sum_i (df_h/dx_i) w_i - tau(w_h).
struct VerticalData {
  const ExplicitForm& ex;
  std::vector<ExprMatrix> levels; // levels[l-1]: m rows of width n

  explicit VerticalData(const ExplicitForm& e) : ex(e) {
    ExprMatrix first;
    for (int j = 1; j <= ex.m; ++j) {
      std::vector<Expr> w(ex.n);
      for (int h = 1; h <= ex.n; ++h)
        w[h - 1] = ex.f.at(h - 1).partial(Sym::ctrl(j, 0));
      first.push_back(std::move(w));
    }
    levels.push_back(std::move(first));
  }

  void extend() {
    const ExprMatrix& prev = levels.back();
    ExprMatrix next;
    for (const auto& w : prev) {
      std::vector<Expr> nw(ex.n);
      for (int h = 1; h <= ex.n; ++h) {
        Expr v = -ex.tau_apply(w[h - 1]);
        for (int i = 1; i <= ex.n; ++i)
          v = v + ex.f.at(h - 1).partial(Sym::jet(i, 0)) * w[i - 1];
        nw[h - 1] = v;
      }
      next.push_back(std::move(nw));
    }
    levels.push_back(std::move(next));
  }

  ExprMatrix stacked(int upto) const { // levels 1..upto
    ExprMatrix m;
    for (int l = 1; l <= upto; ++l)
      for (const auto& w : levels.at(l - 1)) m.push_back(w);
    return m;
  }
};

// Function-side derivative of a fiber-linear row (a-part, b-part):
//   (c')_h = tau(c_h) + sum_i c_i df_i/dx_h,  (c')_bj += sum_i c_i df_i/du_j.
// Only rows with vanishing b-part are differentiated.
struct ChainRow {
  std::vector<Expr> a, b;
};

ChainRow derive_row(const ExplicitForm& ex, const ChainRow& row) {
  for (const auto& e : row.b)
    if (!e.is_zero())
      throw rank_degeneracy("chain derivative left the order-zero fiber span");
  ChainRow out;
  out.a.resize(ex.n);
  out.b.resize(ex.m);
  for (int h = 1; h <= ex.n; ++h) {
    Expr v = ex.tau_apply(row.a[h - 1]);
    for (int i = 1; i <= ex.n; ++i)
      v = v + row.a[i - 1] * ex.f.at(i - 1).partial(Sym::jet(h, 0));
    out.a[h - 1] = v;
  }
  for (int j = 1; j <= ex.m; ++j) {
    Expr v;
    for (int i = 1; i <= ex.n; ++i)
      v = v + row.a[i - 1] * ex.f.at(i - 1).partial(Sym::ctrl(j, 0));
    out.b[j - 1] = v;
  }
  return out;
}

} // namespace

FlatBasisReport flat_basis(const NormalSystem& ns) {
  ExplicitForm ex = ns.explicit_form();
  RandomRats rng(kRankSeed);
  const int n = ex.n, m = ex.m;
  FlatBasisReport rep;

  VerticalData vd(ex);
  rep.dims.push_back(m); // Delta_0 = <d/db_{j,0}>
  int prev = m;
  for (int kk = 1; kk <= n + 1 && prev < n + m; ++kk) {
    while ((int)vd.levels.size() < kk) vd.extend();
    int d = m + generic_rank(vd.stacked(kk), rng);
    if (d == prev) // stabilized below full dimension: stays there forever
      throw not_accessible("vertical span stabilizes at dimension " +
                           std::to_string(d) + " < " + std::to_string(n + m));
    rep.dims.push_back(d);
    prev = d;
  }
  if (prev != n + m)
    throw not_accessible("vertical span has dimension " + std::to_string(prev) +
                         " < " + std::to_string(n + m));

  // Diagram bookkeeping: r_k growth increments, s_k = r_k - r_{k+1},
  // q the indices with s != 0, and k_i the conjugate (chain lengths).
  for (size_t i = 1; i < rep.dims.size(); ++i) {
    int rk = rep.dims[i] - rep.dims[i - 1];
    if (rk > 0) rep.r.push_back(rk);
  }
  const int hmax = (int)rep.r.size();
  for (int kk = 1; kk <= hmax; ++kk) {
    int next = kk < hmax ? rep.r[kk] : 0;
    rep.s.push_back(rep.r[kk - 1] - next);
    if (rep.s.back() != 0) rep.q.push_back(kk);
  }
  rep.h = (int)rep.q.size();
  for (int i = 1; i <= rep.r[0]; ++i) {
    int ki = 0;
    for (int kk = 1; kk <= hmax; ++kk)
      if (rep.r[kk - 1] >= i) ki = kk;
    rep.k.push_back(ki);
  }
  rep.p = rep.k;

  // Chain seeds: for each group (longest first) take kernel vectors of the
  // sub-diagram distribution that stay independent of the derivative span of
  // the chains already chosen.
  struct Chain {
    std::vector<Expr> c;
    int len = 0;
  };
  std::vector<Chain> chains;
  for (int l = rep.h; l >= 1; --l) {
    int ql = rep.q[l - 1];
    int want = rep.s[ql - 1];
    std::vector<std::vector<Expr>> kernel;
    if (ql == 1) {
      for (int i = 0; i < n; ++i) {
        std::vector<Expr> e(n);
        e[i] = Expr::integer(1);
        kernel.push_back(std::move(e));
      }
    } else {
      kernel = kernel_basis(vd.stacked(ql - 1));
    }
    ExprMatrix taken;
    for (const auto& ch : chains) {
      ChainRow row{ch.c, std::vector<Expr>(m)};
      for (int d = 0; d <= ch.len - ql; ++d) {
        taken.push_back(row.a);
        if (d < ch.len - ql) row = derive_row(ex, row);
      }
    }
    int base_rank = taken.empty() ? 0 : generic_rank(taken, rng);
    for (const auto& v : kernel) {
      if (want == 0) break;
      ExprMatrix probe = taken;
      probe.push_back(v);
      int d = generic_rank(probe, rng);
      if (d <= base_rank) continue;
      taken = std::move(probe);
      base_rank = d;
      chains.push_back({v, ql});
      --want;
    }
    if (want != 0)
      throw rank_degeneracy("could not complete the chain seeds at level " +
                            std::to_string(ql));
  }

  for (const auto& ch : chains) {
    Expr z;
    for (int i = 1; i <= n; ++i)
      z = z + ch.c[i - 1] * Expr::var(Sym::fiber(i));
    rep.zeta.push_back(z);
  }

  // Final solve: the full derivative tableau expresses (a, b_0) in the
  // zeta chains.
  ExprMatrix tableau;
  std::vector<Expr> rhs;
  for (size_t ci = 0; ci < chains.size(); ++ci) {
    ChainRow row{chains[ci].c, std::vector<Expr>(m)};
    for (int d = 0; d <= chains[ci].len; ++d) {
      std::vector<Expr> full = row.a;
      full.insert(full.end(), row.b.begin(), row.b.end());
      tableau.push_back(std::move(full));
      rhs.push_back(Expr::var(Sym::zeta((int)ci + 1, d)));
      if (d < chains[ci].len) row = derive_row(ex, row);
    }
  }
  if ((int)tableau.size() != n + m)
    throw rank_degeneracy("derivative tableau is not square");
  std::vector<Expr> sol = solve_linear(tableau, rhs);
  // The unique solution's own denominators are the genuine non-vanishing
  // conditions; intermediate elimination pivots cancel out.
  for (const Expr& e : sol) {
    for (const auto& [fac, mult] : square_free_factors(e.den())) {
      if (fac.is_constant()) continue;
      Expr a(fac.monic());
      if (std::find(rep.assumptions.begin(), rep.assumptions.end(), a) ==
          rep.assumptions.end())
        rep.assumptions.push_back(a);
    }
  }
  for (int i = 1; i <= n; ++i) rep.parametrization[Sym::fiber(i)] = sol[i - 1];
  for (int j = 1; j <= m; ++j)
    rep.parametrization[Sym::fiber_b(j, 0)] = sol[n + j - 1];
  return rep;
}

std::vector<Expr> parametrization_residuals(const ExtendedSystem& es,
                                            const FlatBasisReport& rep) {
  std::map<Sym, Expr> subs = rep.parametrization;
  std::vector<Expr> out;
  out.reserve(es.base.n);
  for (int i = 1; i <= es.base.n; ++i) {
    Expr lhs = es.tau_hat(rep.parametrization.at(Sym::fiber(i)));
    Expr rhs = es.a_rhs.at(i - 1).substitute(subs);
    out.push_back(lhs - rhs);
  }
  return out;
}

} // namespace jetsym
