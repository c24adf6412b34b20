#include "jetsym/integrab.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "jetsym/linalg.hpp"

namespace jetsym {

namespace {

constexpr std::uint64_t kProbeSeed = 0x1BD5C0DEull;

int ord_of(const Expr& e) { return std::max(0, e.max_jet_order()); }

int max_entry(const std::vector<std::vector<int>>& rows, int upto) {
  int m = 0;
  for (const auto& r : rows)
    for (int k = 0; k <= upto && k < static_cast<int>(r.size()); ++k)
      m = std::max(m, r[k]);
  return m;
}

struct PivotData {
  int rank = 0;
  std::vector<int> rows, cols; // positions in the original matrix
};

// Exact Gaussian elimination over the rational-function field; the returned
// pivot rows x pivot columns form a nonsingular minor of the input.
PivotData pivot_structure(ExprMatrix a) {
  PivotData pd;
  const int nr = static_cast<int>(a.size());
  const int nc = nr ? static_cast<int>(a[0].size()) : 0;
  std::vector<bool> used(static_cast<std::size_t>(nr), false);
  for (int c = 0; c < nc; ++c) {
    int pr = -1;
    for (int r = 0; r < nr; ++r)
      if (!used[static_cast<std::size_t>(r)] && !a[r][c].is_zero()) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    used[static_cast<std::size_t>(pr)] = true;
    pd.rows.push_back(pr);
    pd.cols.push_back(c);
    ++pd.rank;
    for (int r = 0; r < nr; ++r) {
      if (r == pr || a[r][c].is_zero()) continue;
      Expr f = a[r][c] / a[pr][c];
      for (int cc = c; cc < nc; ++cc) a[r][cc] = a[r][cc] - f * a[pr][cc];
    }
  }
  return pd;
}

Expr expr_det(ExprMatrix a) {
  const int n = static_cast<int>(a.size());
  Expr det = Expr::integer(1);
  int sign = 1;
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int r = c; r < n; ++r)
      if (!a[r][c].is_zero()) {
        pr = r;
        break;
      }
    if (pr < 0) return Expr();
    if (pr != c) {
      std::swap(a[pr], a[c]);
      sign = -sign;
    }
    det = det * a[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      Expr f = a[r][c] / a[c][c];
      for (int cc = c; cc < n; ++cc) a[r][cc] = a[r][cc] - f * a[c][cc];
    }
  }
  return sign < 0 ? -det : det;
}

Rat rat_det(QMatrix a) {
  const int n = static_cast<int>(a.size());
  Rat det(1);
  int sign = 1;
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int r = c; r < n; ++r)
      if (a[r][c] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) return Rat(0);
    if (pr != c) {
      std::swap(a[pr], a[c]);
      sign = -sign;
    }
    det *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      Rat f = a[r][c] / a[c][c];
      for (int cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  return sign < 0 ? -det : det;
}

// True when the bordered matrix is singular at 5 random rational sample
// points and, decisively, symbolically.
bool bordered_minor_vanishes(const ExprMatrix& b, RandomRats& rng) {
  std::set<Sym> vars;
  for (const auto& row : b)
    for (const auto& e : row)
      for (Sym s : e.variables()) vars.insert(s);
  std::vector<Sym> vv(vars.begin(), vars.end());

  int sampled = 0;
  for (int attempt = 0; attempt < 25 && sampled < 5; ++attempt) {
    auto pt = rng.point(vv);
    QMatrix q;
    try {
      for (const auto& row : b) {
        std::vector<Rat> qr;
        for (const auto& e : row) qr.push_back(e.eval(pt));
        q.push_back(std::move(qr));
      }
    } catch (const symbolic_error&) {
      continue; // sample hit a pole, redraw
    }
    ++sampled;
    if (rat_det(q) != 0) return false;
  }
  return expr_det(b).is_zero();
}

std::vector<Expr> delta_iterate_blocks(const NormalSystem& ns, const VField& vf,
                                       int K, std::vector<int>* block_of) {
  DeltaOp op(ns, vf);
  std::vector<Expr> funcs, cur;
  for (int i = 1; i <= ns.n; ++i) cur.push_back(Expr::var(Sym::jet(i, 0)));
  for (int k = 0; k <= K; ++k) {
    if (k > 0)
      for (auto& e : cur) e = op.apply(e);
    for (const auto& e : cur) {
      funcs.push_back(e);
      if (block_of) block_of->push_back(k);
    }
  }
  return funcs;
}

} // namespace

const char* growth_name(GrowthVerdict g) {
  switch (g) {
    case GrowthVerdict::Bounded: return "Bounded";
    case GrowthVerdict::StrictlyGrowing: return "StrictlyGrowing";
    case GrowthVerdict::Undetermined: return "Undetermined";
  }
  return "?";
}

const char* integrability_name(IntegrabilityStatus s) {
  switch (s) {
    case IntegrabilityStatus::IntegrableEvidence: return "IntegrableEvidence";
    case IntegrabilityStatus::NotIntegrable: return "NotIntegrable";
    case IntegrabilityStatus::Undetermined: return "Undetermined";
  }
  return "?";
}

const char* tame_name(TameVerdict t) {
  switch (t) {
    case TameVerdict::TameCompatible: return "TameCompatible";
    case TameVerdict::NotTameInTheseCoordinates:
      return "NotTameInTheseCoordinates";
  }
  return "?";
}

OrderProfile iterated_orders(const NormalSystem& ns, const VField& vf, int K,
                             std::size_t monomial_cap) {
  if (K < 1) throw symbolic_error("iteration count must be at least 1");
  if (static_cast<int>(vf.a.size()) != ns.n)
    throw symbolic_error("field has the wrong number of components");

  OrderProfile p;
  p.state_orders.assign(static_cast<std::size_t>(ns.n), {});
  p.control_orders.assign(static_cast<std::size_t>(ns.m), {});

  DeltaOp op(ns, vf);
  std::vector<Expr> cur;
  for (int i = 1; i <= ns.n; ++i) cur.push_back(Expr::var(Sym::jet(i, 0)));
  auto record = [&] {
    for (int i = 0; i < ns.n; ++i)
      p.state_orders[static_cast<std::size_t>(i)].push_back(
          ord_of(cur[static_cast<std::size_t>(i)]));
    for (int j = 0; j < ns.m; ++j)
      p.control_orders[static_cast<std::size_t>(j)].push_back(
          ord_of(ns.tau_apply(cur[static_cast<std::size_t>(j)])));
  };
  record();

  bool blowup = false;
  for (int k = 1; k <= K && !blowup; ++k) {
    for (auto& e : cur) {
      e = op.apply(e);
      if (e.num().terms().size() > monomial_cap ||
          e.den().terms().size() > monomial_cap) {
        blowup = true;
        break;
      }
    }
    if (blowup) break;
    record();
    p.completed = k;
  }

  p.e = std::max(max_entry(p.state_orders, p.completed),
                 max_entry(p.control_orders, p.completed));

  if (blowup || p.completed < K) {
    p.growth = GrowthVerdict::Undetermined;
    return p;
  }

  bool strict = false;
  if (p.completed >= 2)
    for (const auto& row : p.state_orders) {
      bool s = true;
      for (int k = 0; k < p.completed; ++k)
        if (row[static_cast<std::size_t>(k + 1)] <=
            row[static_cast<std::size_t>(k)])
          s = false;
      if (s) strict = true;
    }
  int prev = std::max(max_entry(p.state_orders, p.completed - 1),
                      max_entry(p.control_orders, p.completed - 1));
  if (strict)
    p.growth = GrowthVerdict::StrictlyGrowing;
  else if (p.e == prev)
    p.growth = GrowthVerdict::Bounded;
  else
    p.growth = GrowthVerdict::Undetermined;
  return p;
}

int default_iteration_cap(int n, int m, int varpi) {
  if (n < 1 || m < 0 || m > n || varpi < 0)
    throw symbolic_error("invalid dimensions for the iteration cap");
  long nn = static_cast<long>(n);
  long prod = nn * (nn + 1) * varpi; // n(n+1) is even, the halving is exact
  return static_cast<int>(n - m + prod / 2 + (prod % 2 != 0 ? 1 : 0));
}

IntegrabilityVerdict integrability_verdict(const NormalSystem& ns,
                                           const VField& vf, int K) {
  const int varpi = vf.order();
  const int cap = default_iteration_cap(ns.n, ns.m, varpi);
  if (K < 0) K = std::max(cap, 1);

  IntegrabilityVerdict v;
  v.profile = iterated_orders(ns, vf, K);

  if (ns.m == 1 && varpi > 0) {
    v.status = IntegrabilityStatus::NotIntegrable;
    v.witness = "single-input system: an integrable generator has order zero, "
                "this one has order " +
                std::to_string(varpi);
    return v;
  }
  if (v.profile.completed < K) {
    v.status = IntegrabilityStatus::Undetermined;
    v.witness = "expression growth exceeded the monomial cap after iterate " +
                std::to_string(v.profile.completed);
    return v;
  }

  std::vector<int> block_of;
  std::vector<Expr> funcs = delta_iterate_blocks(ns, vf, K, &block_of);

  std::set<Sym> varset;
  for (const auto& e : funcs)
    for (Sym s : e.variables()) varset.insert(s);
  std::vector<Sym> vars(varset.begin(), varset.end());

  ExprMatrix jac;
  for (const auto& e : funcs) {
    std::vector<Expr> row;
    for (Sym s : vars) row.push_back(e.partial(s));
    jac.push_back(std::move(row));
  }

  std::vector<PivotData> pivots;
  for (int k = 0; k <= K; ++k) {
    ExprMatrix prefix(jac.begin(),
                      jac.begin() + static_cast<long>(ns.n) * (k + 1));
    pivots.push_back(pivot_structure(prefix));
    v.ranks.push_back(pivots.back().rank);
  }

  RandomRats rng(kProbeSeed);
  for (int k = 0; k + 1 <= K; ++k) {
    if (v.ranks[static_cast<std::size_t>(k)] !=
        v.ranks[static_cast<std::size_t>(k + 1)])
      continue;
    const PivotData& pd = pivots[static_cast<std::size_t>(k)];
    bool confirmed = true;
    if (pd.rank < static_cast<int>(vars.size())) {
      for (int bi = 0; bi < ns.n && confirmed; ++bi) {
        const auto& nrow = jac[static_cast<std::size_t>(ns.n * (k + 1) + bi)];
        for (std::size_t c = 0; c < vars.size() && confirmed; ++c) {
          if (std::find(pd.cols.begin(), pd.cols.end(), static_cast<int>(c)) !=
              pd.cols.end())
            continue;
          ExprMatrix b;
          for (int pr : pd.rows) {
            std::vector<Expr> br;
            for (int pc : pd.cols) br.push_back(jac[pr][pc]);
            br.push_back(jac[pr][c]);
            b.push_back(std::move(br));
          }
          std::vector<Expr> last;
          for (int pc : pd.cols) last.push_back(nrow[static_cast<std::size_t>(pc)]);
          last.push_back(nrow[c]);
          b.push_back(std::move(last));
          if (!bordered_minor_vanishes(b, rng)) confirmed = false;
        }
      }
    }
    if (confirmed) {
      v.status = IntegrabilityStatus::IntegrableEvidence;
      v.witness = "Jacobian rank stabilizes at " +
                  std::to_string(pd.rank) + " from iterate " +
                  std::to_string(k) +
                  "; every bordered minor of the next block vanishes";
      return v;
    }
  }

  if (v.profile.growth == GrowthVerdict::StrictlyGrowing && K >= cap) {
    std::string trace;
    for (int i = 0; i < ns.n; ++i) {
      const auto& row = v.profile.state_orders[static_cast<std::size_t>(i)];
      bool s = true;
      for (int k = 0; k < K; ++k)
        if (row[static_cast<std::size_t>(k + 1)] <=
            row[static_cast<std::size_t>(k)])
          s = false;
      if (!s) continue;
      trace = "orders of the iterates of x" + std::to_string(i + 1) + ": ";
      for (int k = 0; k <= K; ++k) {
        if (k) trace += " < ";
        trace += std::to_string(row[static_cast<std::size_t>(k)]);
      }
      break;
    }
    v.status = IntegrabilityStatus::NotIntegrable;
    v.witness = trace + " through the certified window of " +
                std::to_string(cap) + " iterations";
    return v;
  }

  v.status = IntegrabilityStatus::Undetermined;
  v.witness = "no rank stabilization and no strict growth within " +
              std::to_string(K) + " iterations";
  return v;
}

namespace {

// Finitely truncated vertical field sum_{j,l} w[j-1][l] d/dx_j^(l).
struct Vertical {
  std::vector<std::vector<Expr>> w;

  bool is_zero() const {
    for (const auto& row : w)
      for (const auto& e : row)
        if (!e.is_zero()) return false;
    return true;
  }
  bool operator==(const Vertical&) const = default;
};

Expr vertical_apply(const Vertical& v, const Expr& g) {
  Expr s;
  for (std::size_t j = 0; j < v.w.size(); ++j)
    for (std::size_t l = 0; l < v.w[j].size(); ++l) {
      if (v.w[j][l].is_zero()) continue;
      Expr dg = g.partial(Sym::jet(static_cast<int>(j) + 1, static_cast<int>(l)));
      if (!dg.is_zero()) s = s + v.w[j][l] * dg;
    }
  return s;
}

Vertical vertical_bracket(const Vertical& a, const Vertical& b, int slots) {
  Vertical r;
  r.w.assign(a.w.size(), std::vector<Expr>(static_cast<std::size_t>(slots)));
  for (std::size_t j = 0; j < r.w.size(); ++j)
    for (int l = 0; l < slots; ++l)
      r.w[j][static_cast<std::size_t>(l)] =
          vertical_apply(a, b.w[j][static_cast<std::size_t>(l)]) -
          vertical_apply(b, a.w[j][static_cast<std::size_t>(l)]);
  return r;
}

} // namespace

TameReport tame_test(const NormalSystem& ns, const VField& vf,
                     int bracket_cap) {
  if (static_cast<int>(vf.a.size()) != ns.n)
    throw symbolic_error("field has the wrong number of components");
  TameReport rep;
  const int varpi = vf.order();
  if (varpi <= 0) {
    rep.verdict = TameVerdict::TameCompatible;
    rep.note = "order-zero field: no higher-order commutator directions";
    return rep;
  }

  // Higher-order jet variables the components actually use.
  std::set<Sym> higher;
  for (const auto& ai : vf.a)
    for (Sym s : ai.variables())
      if (s.kind() == SymKind::Jet && s.k() > 0) higher.insert(s);

  const int total_slots = varpi * (bracket_cap + 2) + 1;
  std::vector<std::vector<Expr>> prolonged(static_cast<std::size_t>(ns.n));
  for (int j = 1; j <= ns.n; ++j)
    for (int l = 0; l < total_slots; ++l)
      prolonged[static_cast<std::size_t>(j - 1)].push_back(
          ns.tau_power(vf.a[static_cast<std::size_t>(j - 1)], l));

  std::vector<Vertical> algebra;
  for (Sym hv : higher) {
    Vertical g;
    g.w.assign(static_cast<std::size_t>(ns.n),
               std::vector<Expr>(static_cast<std::size_t>(total_slots)));
    for (int j = 0; j < ns.n; ++j)
      for (int l = 0; l < total_slots; ++l)
        g.w[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] =
            -prolonged[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]
                 .partial(hv);
    if (!g.is_zero()) algebra.push_back(std::move(g));
  }
  rep.generators = static_cast<int>(algebra.size());

  RandomRats rng(kProbeSeed);
  auto zero_rank = [&] {
    ExprMatrix m;
    for (const auto& el : algebra) {
      std::vector<Expr> row;
      for (int j = 0; j < ns.n; ++j)
        row.push_back(el.w[static_cast<std::size_t>(j)][0]);
      m.push_back(std::move(row));
    }
    return m.empty() ? 0 : generic_rank(m, rng);
  };

  rep.dim = zero_rank();
  int round = 0;
  std::size_t frontier = 0;
  while (rep.dim < ns.n && round < bracket_cap) {
    ++round;
    int slots = total_slots - varpi * round;
    std::size_t old_size = algebra.size();
    bool added = false;
    for (std::size_t i = 0; i < old_size && algebra.size() < 64; ++i)
      for (std::size_t j = std::max(i + 1, frontier);
           j < old_size && algebra.size() < 64; ++j) {
        Vertical b = vertical_bracket(algebra[i], algebra[j], slots);
        if (b.is_zero()) continue;
        if (std::find(algebra.begin(), algebra.end(), b) != algebra.end())
          continue;
        algebra.push_back(std::move(b));
        added = true;
      }
    frontier = old_size;
    if (!added) break;
    rep.dim = zero_rank();
  }

  if (rep.dim < ns.n) {
    rep.verdict = TameVerdict::TameCompatible;
    rep.note = "commutator algebra leaves an order-zero function invariant";
  } else {
    rep.verdict = TameVerdict::NotTameInTheseCoordinates;
    rep.note = "commutator algebra acts with full rank on the order-zero "
               "slice; no order-zero coordinate change can triangularize "
               "the field";
  }
  return rep;
}

CommutingFamilyReport commuting_family(const NormalSystem& ns,
                                       const std::vector<VField>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (!is_symmetry(ns, fields[i]))
      throw symbolic_error("family member " + std::to_string(i + 1) +
                           " is not a symmetry");

  const std::size_t nf = fields.size();
  CommutingFamilyReport rep;
  rep.commutes.assign(nf, std::vector<bool>(nf, true));
  rep.all_commute = true;
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = i + 1; j < nf; ++j) {
      VField b = lie_bracket(ns, fields[i], fields[j]);
      bool zero = b == VField::zero(ns);
      rep.commutes[i][j] = rep.commutes[j][i] = zero;
      if (zero) continue;
      rep.all_commute = false;
      auto verdict = integrability_verdict(ns, b);
      std::string note = "bracket of members " + std::to_string(i + 1) +
                         " and " + std::to_string(j + 1) + " is nonzero; " +
                         "its integrability status: " +
                         integrability_name(verdict.status);
      if (verdict.status == IntegrabilityStatus::NotIntegrable)
        note += "; the flows of this pair generate no finite-parameter "
                "pseudogroup";
      rep.notes.push_back(std::move(note));
    }
  rep.joint_flow_suggested = rep.all_commute && nf > 1;
  return rep;
}

int tame_growth_degree(const std::vector<int>& partition, int varpi) {
  if (partition.empty())
    throw invalid_partition("empty block list");
  int m = 0;
  for (int c : partition) {
    if (c < 1) throw invalid_partition("block sizes must be positive");
    m += c;
  }
  if (varpi < 0) throw invalid_partition("negative field order");
  int cs = partition.back();
  return (m - cs) * (varpi + 1) + cs;
}

int growth_degree_lower_bound(int m, int varpi, int e) {
  if (m < 1) throw invalid_partition("at least one block variable required");
  return (m - 1) * (varpi - e + 1) + 1;
}

} // namespace jetsym
