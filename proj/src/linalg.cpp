#include "jetsym/linalg.hpp"

#include <algorithm>

namespace jetsym {

Poly poly_lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly::zero();
  Poly g = poly_gcd(a, b);
  return (a * b.exact_quotient(g)).monic();
}

int rank(const QMatrix& m) {
  QMatrix w = m;
  int rows = static_cast<int>(w.size());
  int cols = rows ? static_cast<int>(w[0].size()) : 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (w[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    for (int i = r + 1; i < rows; ++i) {
      if (w[i][c] == 0) continue;
      Rat f = w[i][c] / w[r][c];
      for (int j = c; j < cols; ++j) w[i][j] -= f * w[r][j];
    }
    ++r;
  }
  return r;
}

std::vector<std::vector<Rat>> nullspace(const QMatrix& m) {
  QMatrix w = m;
  int rows = static_cast<int>(w.size());
  int cols = rows ? static_cast<int>(w[0].size()) : 0;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (w[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    Rat inv = 1 / w[r][c];
    for (int j = c; j < cols; ++j) w[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || w[i][c] == 0) continue;
      Rat f = w[i][c];
      for (int j = c; j < cols; ++j) w[i][j] -= f * w[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rat>> basis;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[c] = 1;
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
      v[pivot_col[i]] = -w[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

std::vector<Sym> matrix_symbols(const ExprMatrix& m) {
  std::vector<Sym> all;
  for (auto& row : m)
    for (auto& e : row) {
      auto v = e.variables();
      all.insert(all.end(), v.begin(), v.end());
    }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

// Fraction-free elimination on a polynomial matrix (Bareiss): every division
// is exact, entries stay polynomial.
int bareiss_rank(std::vector<std::vector<Poly>> w) {
  int rows = static_cast<int>(w.size());
  int cols = rows ? static_cast<int>(w[0].size()) : 0;
  Poly prev = Poly::constant(1);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!w[i][c].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j)
        w[i][j] = (w[r][c] * w[i][j] - w[i][c] * w[r][j]).exact_quotient(prev);
      w[i][c] = Poly::zero();
    }
    prev = w[r][c];
    ++r;
  }
  return r;
}

} // namespace

int generic_rank(const ExprMatrix& m, RandomRats& rng) {
  int rows = static_cast<int>(m.size());
  int cols = rows ? static_cast<int>(m[0].size()) : 0;
  if (rows == 0 || cols == 0) return 0;
  int bound = std::min(rows, cols);

  std::vector<Sym> syms = matrix_symbols(m);
  int best = 0;
  for (int trial = 0; trial < 3; ++trial) {
    auto point = rng.point(syms);
    QMatrix q(rows, std::vector<Rat>(cols));
    bool ok = true;
    for (int i = 0; i < rows && ok; ++i)
      for (int j = 0; j < cols && ok; ++j) {
        try {
          q[i][j] = m[i][j].eval(point);
        } catch (const denominator_vanishes&) {
          ok = false;
        }
      }
    if (!ok) continue;
    best = std::max(best, rank(q));
    if (best == bound) return best; // specialization cannot exceed the generic rank
  }

  // Clear denominators per row (a row operation, rank-preserving), then
  // eliminate fraction-free.
  std::vector<std::vector<Poly>> w(rows, std::vector<Poly>(cols));
  for (int i = 0; i < rows; ++i) {
    Poly l = Poly::constant(1);
    for (int j = 0; j < cols; ++j) l = poly_lcm(l, m[i][j].den());
    for (int j = 0; j < cols; ++j)
      w[i][j] = m[i][j].num() * l.exact_quotient(m[i][j].den());
  }
  return bareiss_rank(std::move(w));
}

std::vector<std::vector<Expr>> kernel_basis(const ExprMatrix& m) {
  ExprMatrix w = m;
  int rows = static_cast<int>(w.size());
  int cols = rows ? static_cast<int>(w[0].size()) : 0;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!w[i][c].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    Expr inv = Expr::integer(1) / w[r][c];
    for (int j = c; j < cols; ++j) w[r][j] = w[r][j] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || w[i][c].is_zero()) continue;
      Expr f = w[i][c];
      for (int j = c; j < cols; ++j) w[i][j] = w[i][j] - f * w[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<Expr>> basis;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Expr> v(cols);
    v[c] = Expr::integer(1);
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
      v[pivot_col[i]] = -w[i][c];
    // Clear denominators and strip common polynomial content.
    Poly l = Poly::constant(1);
    for (auto& e : v) l = poly_lcm(l, e.den());
    std::vector<Poly> pv(cols);
    for (int j = 0; j < cols; ++j)
      pv[j] = v[j].num() * l.exact_quotient(v[j].den());
    Poly g;
    for (auto& p : pv) g = poly_gcd(g, p);
    if (!g.is_constant())
      for (auto& p : pv) p = p.exact_quotient(g);
    // Monic first nonzero entry for a deterministic normal form.
    Rat scale(1);
    for (auto& p : pv)
      if (!p.is_zero()) {
        scale = 1 / p.leading_coefficient();
        break;
      }
    for (int j = 0; j < cols; ++j) v[j] = Expr(pv[j].scaled(scale));
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Expr> solve_linear(const ExprMatrix& m, const std::vector<Expr>& rhs,
                               std::vector<Expr>* assumptions) {
  int rows = static_cast<int>(m.size());
  int cols = rows ? static_cast<int>(m[0].size()) : 0;
  ExprMatrix w = m;
  std::vector<Expr> b = rhs;
  std::vector<int> pivot_row(cols, -1);
  int r = 0;
  auto note_pivot = [&](const Expr& piv) {
    if (!assumptions) return;
    if (piv.is_rational()) return;
    // Record the polynomial parts whose nonvanishing the solution relies on.
    for (const Poly* part : {&piv.num(), &piv.den()}) {
      if (part->is_constant()) continue;
      Expr e(part->monic());
      if (std::find(assumptions->begin(), assumptions->end(), e) ==
          assumptions->end())
        assumptions->push_back(e);
    }
  };
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!w[i][c].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    std::swap(b[r], b[p]);
    note_pivot(w[r][c]);
    Expr inv = Expr::integer(1) / w[r][c];
    for (int j = c; j < cols; ++j) w[r][j] = w[r][j] * inv;
    b[r] = b[r] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || w[i][c].is_zero()) continue;
      Expr f = w[i][c];
      for (int j = c; j < cols; ++j) w[i][j] = w[i][j] - f * w[r][j];
      b[i] = b[i] - f * b[r];
    }
    pivot_row[c] = r;
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (!b[i].is_zero())
      throw rank_degeneracy("inconsistent linear system");
  std::vector<Expr> x(cols);
  for (int c = 0; c < cols; ++c) {
    if (pivot_row[c] < 0)
      throw rank_degeneracy("underdetermined linear system");
    x[c] = b[pivot_row[c]];
  }
  return x;
}

} // namespace jetsym
