#include "jetsym/vfield.hpp"

#include <algorithm>
#include <sstream>

namespace jetsym {

int VField::order() const {
  int o = 0;
  for (const auto& e : a) o = std::max(o, e.max_jet_order());
  return o;
}

Expr DeltaOp::image_of(Sym s) {
  if (s.kind() != SymKind::Jet)
    throw symbolic_error("field image requested for a non-jet symbol");
  auto it = cache_.find(s);
  if (it != cache_.end()) return it->second;
  Expr r;
  if (s.k() == 0) {
    r = vf_.a.at(s.i() - 1);
  } else if (s.i() > ns_.m) {
    throw symbolic_error("dependent jet above order 0 is not canonical");
  } else {
    r = ns_.tau_apply(image_of(Sym::jet(s.i(), s.k() - 1)));
  }
  cache_.emplace(s, r);
  return r;
}

Expr DeltaOp::apply(const Expr& e) {
  Expr acc;
  for (Sym v : e.variables()) {
    if (v.kind() == SymKind::Ctrl)
      throw symbolic_error("control jets are not canonical coordinates");
    if (v.kind() != SymKind::Jet) continue; // opaque symbols are constants
    acc = acc + e.partial(v) * image_of(v);
  }
  return acc;
}

Expr delta_apply(const NormalSystem& ns, const VField& vf, const Expr& e) {
  DeltaOp d(ns, vf);
  return d.apply(e);
}

std::vector<Expr> commutator_residuals(const NormalSystem& ns, const VField& vf) {
  if ((int)vf.a.size() != ns.n)
    throw symbolic_error("generator count does not match the system");
  DeltaOp d(ns, vf);
  std::vector<Expr> res;
  res.reserve(ns.n - ns.m);
  for (int i = ns.m + 1; i <= ns.n; ++i)
    res.push_back(ns.tau_apply(vf.a[i - 1]) - d.apply(ns.f_of(i)));
  return res;
}

bool is_symmetry(const NormalSystem& ns, const VField& vf) {
  for (const auto& r : commutator_residuals(ns, vf))
    if (!r.is_zero()) return false;
  return true;
}

VField lie_bracket(const NormalSystem& ns, const VField& x, const VField& y) {
  DeltaOp dx(ns, x), dy(ns, y);
  VField out;
  out.a.reserve(ns.n);
  for (int i = 0; i < ns.n; ++i)
    out.a.push_back(dx.apply(y.a.at(i)) - dy.apply(x.a.at(i)));
  return out;
}

VField combine(const VField& x, const Expr& c1, const VField& y, const Expr& c2) {
  if (x.a.size() != y.a.size())
    throw symbolic_error("generator counts differ");
  VField out;
  out.a.reserve(x.a.size());
  for (size_t i = 0; i < x.a.size(); ++i)
    out.a.push_back(c1 * x.a[i] + c2 * y.a[i]);
  return out;
}

namespace {

std::string strip_comments(const std::string& text) {
  std::string out;
  bool skip = false;
  for (char c : text) {
    if (c == '#') skip = true;
    if (c == '\n') skip = false;
    if (!skip) out.push_back(c);
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

VField parse_vfield(const NormalSystem& ns, const std::string& text) {
  std::vector<Expr> a(ns.n);
  std::vector<bool> seen(ns.n, false);
  std::stringstream ss(strip_comments(text));
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::string stmt = trim(part);
    if (stmt.empty()) continue;
    size_t eq = stmt.find('=');
    if (eq == std::string::npos)
      throw parse_error("SyntaxError", "expected a<i> = <expr>", 1, 1);
    std::string lhs = trim(stmt.substr(0, eq));
    if (lhs.size() < 2 || lhs[0] != 'a' ||
        lhs.find_first_not_of("0123456789", 1) != std::string::npos)
      throw parse_error("SyntaxError",
                        "generator name must be a1.." + std::string("a") +
                            std::to_string(ns.n) + ", got '" + lhs + "'",
                        1, 1);
    int idx = std::stoi(lhs.substr(1));
    if (idx < 1 || idx > ns.n)
      throw parse_error("SyntaxError",
                        "generator index out of range: " + lhs, 1, 1);
    if (seen[idx - 1])
      throw parse_error("SyntaxError", "duplicate binding for " + lhs, 1, 1);
    seen[idx - 1] = true;
    a[idx - 1] = ns.parse_expr(trim(stmt.substr(eq + 1)));
  }
  for (int i = 0; i < ns.n; ++i)
    if (!seen[i])
      throw parse_error("SyntaxError",
                        "missing binding for a" + std::to_string(i + 1), 1, 1);
  return VField{std::move(a)};
}

std::vector<std::string> vfield_strings(const NormalSystem& ns, const VField& vf) {
  std::vector<std::string> out;
  out.reserve(vf.a.size());
  NameFn nf = ns.names();
  for (size_t i = 0; i < vf.a.size(); ++i)
    out.push_back("a" + std::to_string(i + 1) + " = " + to_string(vf.a[i], nf));
  return out;
}

Expr field_apply(const SparseField& x, const Expr& e) {
  Expr acc;
  for (const auto& [c, coeff] : x) {
    if (e.depends_on(c)) acc = acc + coeff * e.partial(c);
  }
  return acc;
}

SparseField lie_bracket(const SparseField& x, const SparseField& y) {
  SparseField out;
  auto coeff_of = [](const SparseField& f, Sym s) {
    auto it = f.find(s);
    return it == f.end() ? Expr() : it->second;
  };
  for (const auto& [c, yc] : y) {
    Expr v = field_apply(x, yc) - field_apply(y, coeff_of(x, c));
    if (!v.is_zero()) out[c] = v;
  }
  for (const auto& [c, xc] : x) {
    if (y.count(c)) continue;
    Expr v = -field_apply(y, xc);
    if (!v.is_zero()) out[c] = v;
  }
  return out;
}

SparseField bracket_with_cartan(const ExplicitForm& ex, const SparseField& x) {
  SparseField out;
  auto coeff_of = [&x](Sym s) {
    auto it = x.find(s);
    return it == x.end() ? Expr() : it->second;
  };
  for (int i = 1; i <= ex.n; ++i) {
    Sym st = Sym::jet(i, 0);
    Expr v = field_apply(x, ex.f.at(i - 1)) - ex.tau_apply(coeff_of(st));
    if (!v.is_zero()) out[st] = v;
  }
  int maxk = -1;
  for (const auto& [c, coeff] : x)
    if (c.kind() == SymKind::Ctrl) maxk = std::max(maxk, c.k());
  for (int j = 1; j <= ex.m; ++j) {
    for (int k = 0; k <= maxk; ++k) {
      Expr v = coeff_of(Sym::ctrl(j, k + 1)) - ex.tau_apply(coeff_of(Sym::ctrl(j, k)));
      if (!v.is_zero()) out[Sym::ctrl(j, k)] = v;
    }
  }
  return out;
}

SparseField hat_tau_iterate(const ExplicitForm& ex, int j, int k) {
  if (j < 1 || j > ex.m) throw symbolic_error("control index out of range");
  SparseField x{{Sym::ctrl(j, 0), Expr::integer(1)}};
  for (int step = 0; step < k; ++step) x = bracket_with_cartan(ex, x);
  return x;
}

} // namespace jetsym
