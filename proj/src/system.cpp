#include "jetsym/system.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "jetsym/linalg.hpp"

namespace jetsym {

namespace {

struct Token {
  enum Kind { Ident, Int, Punct, End } kind = End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at_punct(const char* p) const {
    return tok_.kind == Token::Punct && tok_.text == p;
  }
  bool at_ident(const char* w) const {
    return tok_.kind == Token::Ident && tok_.text == w;
  }
  Token expect_punct(const char* p) {
    if (!at_punct(p))
      throw parse_error("SyntaxError", std::string("expected '") + p + "'",
                        tok_.line, tok_.col);
    return take();
  }

 private:
  void advance() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_, col_ = 1, ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_, ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{Token::End, "", line_, col_};
    if (pos_ >= s_.size()) return;
    char c = s_[pos_];
    tok_.line = line_;
    tok_.col = col_;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string w;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
              s_[pos_] == '_')) {
        w += s_[pos_++];
        ++col_;
      }
      tok_ = Token{Token::Ident, w, tok_.line, tok_.col};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string w;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        w += s_[pos_++];
        ++col_;
      }
      tok_ = Token{Token::Int, w, tok_.line, tok_.col};
    } else {
      tok_ = Token{Token::Punct, std::string(1, c), tok_.line, tok_.col};
      ++pos_, ++col_;
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class ExprParser {
 public:
  ExprParser(Lexer& lx, const SymResolver& resolve)
      : lx_(lx), resolve_(resolve) {}

  Expr parse() { return sum(); }

 private:
  Expr sum() {
    Expr e = product();
    while (lx_.at_punct("+") || lx_.at_punct("-")) {
      bool plus = lx_.take().text == "+";
      Expr rhs = product();
      e = plus ? e + rhs : e - rhs;
    }
    return e;
  }

  Expr product() {
    Expr e = power();
    while (lx_.at_punct("*") || lx_.at_punct("/")) {
      Token op = lx_.take();
      Expr rhs = power();
      if (op.text == "*") {
        e = e * rhs;
      } else {
        if (rhs.is_zero())
          throw parse_error("SyntaxError", "division by zero", op.line, op.col);
        e = e / rhs;
      }
    }
    return e;
  }

  Expr power() {
    Expr base = atom();
    if (lx_.at_punct("^")) {
      Token op = lx_.take();
      bool neg = false;
      if (lx_.at_punct("-")) {
        lx_.take();
        neg = true;
      }
      Token e = lx_.take();
      if (e.kind != Token::Int)
        throw parse_error("SyntaxError", "expected integer exponent", e.line,
                          e.col);
      int exp = std::stoi(e.text);
      if (neg && base.is_zero())
        throw parse_error("SyntaxError", "zero to a negative power", op.line,
                          op.col);
      return base.pow(neg ? -exp : exp);
    }
    return base;
  }

  Expr atom() {
    Token t = lx_.peek();
    if (t.kind == Token::Punct && t.text == "(") {
      lx_.take();
      Expr e = sum();
      lx_.expect_punct(")");
      return e;
    }
    if (t.kind == Token::Punct && t.text == "-") {
      lx_.take();
      return -power();
    }
    if (t.kind == Token::Int) {
      lx_.take();
      return Expr::rational(Rat(t.text));
    }
    if (t.kind == Token::Ident) {
      lx_.take();
      if (t.text == "D") {
        lx_.expect_punct("(");
        Token id = lx_.take();
        if (id.kind != Token::Ident)
          throw parse_error("SyntaxError", "expected identifier in D(...)",
                            id.line, id.col);
        lx_.expect_punct(",");
        Token ordt = lx_.take();
        if (ordt.kind != Token::Int)
          throw parse_error("SyntaxError", "expected derivative order in D(...)",
                            ordt.line, ordt.col);
        lx_.expect_punct(")");
        int ord = std::stoi(ordt.text);
        return Expr::var(resolve_(id.text, ord, id.line, id.col));
      }
      int ord = 0;
      while (lx_.at_punct("'")) {
        lx_.take();
        ++ord;
      }
      return Expr::var(resolve_(t.text, ord, t.line, t.col));
    }
    throw parse_error("SyntaxError", "unexpected token '" + t.text + "'",
                      t.line, t.col);
  }

  Lexer& lx_;
  const SymResolver& resolve_;
};

[[noreturn]] void undeclared(const std::string& name, int line, int col) {
  if (name == "t")
    throw parse_error("NonAutonomous",
                      "'t' is not a coordinate; only autonomous systems are "
                      "supported",
                      line, col);
  throw parse_error("UndeclaredSymbol", "unknown identifier '" + name + "'",
                    line, col);
}

} // namespace

Expr parse_expression(const std::string& text, const SymResolver& resolve) {
  Lexer lx(text);
  ExprParser p(lx, resolve);
  Expr e = p.parse();
  const Token& t = lx.peek();
  if (t.kind != Token::End)
    throw parse_error("SyntaxError", "trailing input '" + t.text + "'", t.line,
                      t.col);
  return e;
}

std::vector<std::string> SystemDef::decl_order() const {
  std::vector<std::string> all = free_vars;
  all.insert(all.end(), dep_vars.begin(), dep_vars.end());
  return all;
}

SystemDef parse_system(const std::string& text) {
  Lexer lx(text);
  SystemDef def;

  auto take_ident = [&](const char* what) {
    Token t = lx.take();
    if (t.kind != Token::Ident)
      throw parse_error("SyntaxError", std::string("expected ") + what, t.line,
                        t.col);
    return t;
  };

  if (!lx.at_ident("system")) {
    const Token& t = lx.peek();
    throw parse_error("SyntaxError", "expected 'system'", t.line, t.col);
  }
  lx.take();
  def.name = take_ident("system name").text;
  lx.expect_punct(";");

  std::set<std::string> declared;
  auto declare_list = [&](std::vector<std::string>& into) {
    lx.take(); // the keyword
    while (lx.peek().kind == Token::Ident) {
      Token t = lx.take();
      if (t.text == "D" || t.text == "t" || t.text == "system" ||
          t.text == "free" || t.text == "dep" || t.text == "controls" ||
          t.text == "eq")
        throw parse_error("SyntaxError", "reserved word '" + t.text + "'",
                          t.line, t.col);
      if (!declared.insert(t.text).second)
        throw parse_error("SyntaxError", "duplicate declaration of '" + t.text +
                                             "'",
                          t.line, t.col);
      into.push_back(t.text);
    }
    if (into.empty()) {
      const Token& t = lx.peek();
      throw parse_error("SyntaxError", "empty declaration list", t.line, t.col);
    }
    lx.expect_punct(";");
  };

  while (true) {
    if (lx.at_ident("free"))
      declare_list(def.free_vars);
    else if (lx.at_ident("dep"))
      declare_list(def.dep_vars);
    else if (lx.at_ident("controls"))
      declare_list(def.controls);
    else
      break;
  }
  if (declared.empty()) {
    const Token& t = lx.peek();
    throw parse_error("SyntaxError", "system declares no variables", t.line,
                      t.col);
  }

  // Resolver for equation right-hand sides against the declarations.
  std::map<std::string, int> var_index;
  {
    int idx = 1;
    for (const auto& v : def.decl_order()) var_index[v] = idx++;
  }
  std::map<std::string, int> ctrl_index;
  {
    int idx = 1;
    for (const auto& v : def.controls) ctrl_index[v] = idx++;
  }
  SymResolver resolve = [&](const std::string& name, int ord, int line,
                            int col) -> Sym {
    if (auto it = var_index.find(name); it != var_index.end())
      return Sym::jet(it->second, ord);
    if (auto it = ctrl_index.find(name); it != ctrl_index.end())
      return Sym::ctrl(it->second, ord);
    undeclared(name, line, col);
  };

  while (lx.at_ident("eq")) {
    lx.take();
    SystemDef::Equation eq;
    Token id = take_ident("equation left-hand side");
    eq.lhs = id.text;
    eq.line = id.line;
    if (id.text == "D") {
      lx.expect_punct("(");
      Token v = take_ident("identifier in D(...)");
      eq.lhs = v.text;
      lx.expect_punct(",");
      Token ordt = lx.take();
      if (ordt.kind != Token::Int)
        throw parse_error("SyntaxError", "expected derivative order", ordt.line,
                          ordt.col);
      eq.lhs_ord = std::stoi(ordt.text);
      lx.expect_punct(")");
    } else {
      eq.lhs_ord = 0;
      while (lx.at_punct("'")) {
        lx.take();
        ++eq.lhs_ord;
      }
    }
    if (!var_index.count(eq.lhs) && !ctrl_index.count(eq.lhs))
      undeclared(eq.lhs, id.line, id.col);
    lx.expect_punct("=");
    ExprParser p(lx, resolve);
    eq.rhs = p.parse();
    lx.expect_punct(";");
    def.equations.push_back(std::move(eq));
  }

  const Token& t = lx.peek();
  if (t.kind != Token::End)
    throw parse_error("SyntaxError", "unexpected '" + t.text + "'", t.line,
                      t.col);
  return def;
}

Expr ExplicitForm::tau_apply(const Expr& e) const {
  Expr r;
  for (Sym s : e.variables()) {
    if (s.kind() == SymKind::Jet) {
      if (s.k() != 0)
        throw symbolic_error("explicit form uses order-0 states only");
      r = r + e.partial(s) * f.at(s.i() - 1);
    } else if (s.kind() == SymKind::Ctrl) {
      r = r + e.partial(s) * Expr::var(Sym::ctrl(s.i(), s.k() + 1));
    }
  }
  return r;
}

NameFn ExplicitForm::names() const {
  auto states = state_names;
  auto ctrls = control_names;
  return [states, ctrls](Sym s) -> std::string {
    if (s.kind() == SymKind::Jet && s.i() >= 1 &&
        s.i() <= static_cast<int>(states.size()))
      return jet_suffix_name(states[s.i() - 1], s.k());
    if (s.kind() == SymKind::Ctrl && s.i() >= 1 &&
        s.i() <= static_cast<int>(ctrls.size()))
      return jet_suffix_name(ctrls[s.i() - 1], s.k());
    return std::string();
  };
}

Expr NormalSystem::tau_of_jet(Sym s) const {
  int i = s.i(), k = s.k();
  if (i <= m) return Expr::var(Sym::jet(i, k + 1));
  if (k > 0)
    throw symbolic_error("dependent variable above order 0 is not canonical");
  return f_of(i);
}

Expr NormalSystem::tau_apply(const Expr& e) const {
  Expr r;
  for (Sym s : e.variables()) {
    if (s.kind() == SymKind::Ctrl)
      throw symbolic_error("control symbol outside the explicit form");
    if (s.kind() != SymKind::Jet) continue;
    r = r + e.partial(s) * tau_of_jet(s);
  }
  return r;
}

Expr NormalSystem::tau_power(const Expr& e, int k) const {
  Expr r = e;
  for (int i = 0; i < k; ++i) r = tau_apply(r);
  return r;
}

ExplicitForm NormalSystem::explicit_form() const {
  ExplicitForm ex;
  ex.n = n;
  ex.m = m;
  ex.state_names = var_names;
  for (int j = 1; j <= m; ++j) ex.control_names.push_back("u" + std::to_string(j));
  std::map<Sym, Expr> sub;
  for (int j = 1; j <= m; ++j)
    sub.emplace(Sym::jet(j, 1), Expr::var(Sym::ctrl(j, 0)));
  for (int i = 1; i <= n; ++i) {
    if (i <= m)
      ex.f.push_back(Expr::var(Sym::ctrl(i, 0)));
    else
      ex.f.push_back(f_of(i).substitute(sub));
  }
  return ex;
}

NameFn NormalSystem::names() const {
  auto vars = var_names;
  return [vars](Sym s) -> std::string {
    if (s.kind() == SymKind::Jet && s.i() >= 1 &&
        s.i() <= static_cast<int>(vars.size()))
      return jet_suffix_name(vars[s.i() - 1], s.k());
    return std::string();
  };
}

int NormalSystem::var_index(const std::string& name) const {
  for (int i = 0; i < n; ++i)
    if (var_names[i] == name) return i + 1;
  return 0;
}

Expr NormalSystem::parse_expr(const std::string& text) const {
  SymResolver resolve = [this](const std::string& name, int ord, int line,
                               int col) -> Sym {
    int idx = var_index(name);
    if (idx == 0) undeclared(name, line, col);
    if (idx > m && ord > 0)
      throw parse_error("SyntaxError",
                        "dependent variable '" + name +
                            "' only exists at order 0 in canonical coordinates",
                        line, col);
    return Sym::jet(idx, ord);
  };
  return parse_expression(text, resolve);
}

namespace {

NormalSystem normalize_implicit(const SystemDef& def) {
  int m = static_cast<int>(def.free_vars.size());
  int n = m + static_cast<int>(def.dep_vars.size());
  if (n == 0)
    throw normalization_error("NormalizationFailure", "no variables declared");

  // Declaration index equals normalized index: free variables first.
  std::map<std::string, int> idx;
  {
    int i = 1;
    for (auto& v : def.decl_order()) idx[v] = i++;
  }

  std::vector<Expr> f(n - m);
  std::vector<bool> seen(n - m, false);
  for (auto& eq : def.equations) {
    int i = idx.at(eq.lhs);
    if (i <= m)
      throw normalization_error(
          "NormalizationFailure",
          "equation for free variable '" + eq.lhs + "' (line " +
              std::to_string(eq.line) + "); free variables carry no equation");
    if (eq.lhs_ord != 1)
      throw normalization_error(
          "NormalizationFailure",
          "left-hand side of '" + eq.lhs +
              "' must be a first derivative (line " + std::to_string(eq.line) +
              ")");
    if (seen[i - m - 1])
      throw normalization_error("DuplicateEquation",
                                "second equation for '" + eq.lhs + "' (line " +
                                    std::to_string(eq.line) + ")");
    seen[i - m - 1] = true;
    f[i - m - 1] = eq.rhs;
  }
  for (int i = 0; i < n - m; ++i)
    if (!seen[i])
      throw normalization_error("MissingEquation", "dependent variable '" +
                                                       def.dep_vars[i] +
                                                       "' has no equation");

  for (int i = 0; i < n - m; ++i) {
    for (int j = 1; j <= n; ++j) {
      int ord = f[i].order_in(j);
      int limit = j <= m ? 1 : 0;
      if (ord > limit)
        throw normalization_error(
            "NormalizationFailure",
            "right-hand side for '" + def.dep_vars[i] + "' has order " +
                std::to_string(ord) + " in '" + def.decl_order()[j - 1] +
                "' (allowed: " + std::to_string(limit) + ")");
    }
  }

  NormalSystem ns;
  ns.name = def.name;
  ns.n = n;
  ns.m = m;
  ns.var_names = def.decl_order();
  ns.f = std::move(f);
  ns.source = def;
  return ns;
}

NormalSystem normalize_explicit(const SystemDef& def) {
  if (!def.free_vars.empty())
    throw normalization_error(
        "NormalizationFailure",
        "explicit style (controls) cannot also declare free variables");
  int ns_total = static_cast<int>(def.dep_vars.size());
  int mc = static_cast<int>(def.controls.size());
  if (ns_total == 0)
    throw normalization_error("NormalizationFailure",
                              "explicit system declares no states");

  std::map<std::string, int> sidx; // declaration index of states
  {
    int i = 1;
    for (auto& v : def.dep_vars) sidx[v] = i++;
  }

  std::vector<Expr> rhs(ns_total);
  std::vector<bool> seen(ns_total, false);
  for (auto& eq : def.equations) {
    auto it = sidx.find(eq.lhs);
    if (it == sidx.end())
      throw normalization_error("NormalizationFailure",
                                "equation for non-state '" + eq.lhs + "'");
    if (eq.lhs_ord != 1)
      throw normalization_error("NormalizationFailure",
                                "left-hand side of '" + eq.lhs +
                                    "' must be a first derivative");
    if (seen[it->second - 1])
      throw normalization_error("DuplicateEquation",
                                "second equation for '" + eq.lhs + "'");
    seen[it->second - 1] = true;
    rhs[it->second - 1] = eq.rhs;
  }
  for (int i = 0; i < ns_total; ++i)
    if (!seen[i])
      throw normalization_error("MissingEquation",
                                "state '" + def.dep_vars[i] + "' has no equation");

  for (int i = 0; i < ns_total; ++i)
    for (Sym s : rhs[i].variables()) {
      if (s.k() > 0)
        throw normalization_error(
            "NormalizationFailure",
            "right-hand side for '" + def.dep_vars[i] +
                "' differentiates '" +
                (s.kind() == SymKind::Ctrl ? def.controls[s.i() - 1]
                                           : def.dep_vars[s.i() - 1]) +
                "'; explicit form is x' = f(x, u)");
    }

  // Absorb each control that appears as a bare state derivative x_i' = u_j;
  // that state becomes free. Controls without such an equation become fresh
  // trailing free variables. Free slot j always corresponds to control j.
  std::vector<int> absorbed_state(mc, 0); // declaration index or 0
  std::vector<bool> state_absorbed(ns_total, false);
  for (int j = 1; j <= mc; ++j) {
    Expr bare = Expr::var(Sym::ctrl(j, 0));
    for (int i = 0; i < ns_total; ++i) {
      if (!state_absorbed[i] && rhs[i] == bare) {
        absorbed_state[j - 1] = i + 1;
        state_absorbed[i] = true;
        break;
      }
    }
  }

  // New variable order: one free variable per control, then the remaining
  // states in declaration order.
  std::vector<std::string> var_names;
  std::map<Sym, Expr> sub; // old Jet/Ctrl symbols -> new jets
  std::vector<int> new_index_of_state(ns_total, 0);
  for (int j = 1; j <= mc; ++j) {
    int st = absorbed_state[j - 1];
    var_names.push_back(st ? def.dep_vars[st - 1] : def.controls[j - 1]);
    if (st) new_index_of_state[st - 1] = j;
  }
  int next = mc + 1;
  for (int i = 0; i < ns_total; ++i)
    if (!state_absorbed[i]) new_index_of_state[i] = next++;
  int n = next - 1;
  for (int i = 0; i < ns_total; ++i)
    if (!state_absorbed[i]) var_names.push_back(def.dep_vars[i]);

  for (int i = 0; i < ns_total; ++i)
    sub.emplace(Sym::jet(i + 1, 0), Expr::var(Sym::jet(new_index_of_state[i], 0)));
  for (int j = 1; j <= mc; ++j)
    sub.emplace(Sym::ctrl(j, 0), Expr::var(Sym::jet(j, 1)));

  NormalSystem out;
  out.name = def.name;
  out.n = n;
  out.m = mc;
  out.var_names = var_names;
  out.source = def;
  out.f.resize(n - mc);
  for (int i = 0; i < ns_total; ++i) {
    if (state_absorbed[i]) continue;
    out.f[new_index_of_state[i] - mc - 1] = rhs[i].substitute(sub);
  }
  // The substituted right-hand sides are order <= 1 in the free variables and
  // order 0 in the dependent ones by construction; re-check to be safe.
  for (int i = out.m + 1; i <= out.n; ++i) {
    for (int j = 1; j <= out.n; ++j) {
      int limit = j <= out.m ? 1 : 0;
      if (out.f_of(i).order_in(j) > limit)
        throw normalization_error("NormalizationFailure",
                                  "internal: normalized system not canonical");
    }
  }
  return out;
}

} // namespace

NormalSystem normalize(const SystemDef& def) {
  return def.explicit_style() ? normalize_explicit(def)
                              : normalize_implicit(def);
}

ControlValidation validate_full_control(const SystemDef& def, RandomRats& rng) {
  ControlValidation v;
  if (!def.explicit_style()) {
    // Implicit style: in the explicit realization u_j = x_j', each control
    // is itself a state derivative, so the input map has full rank by
    // construction.
    v.m = static_cast<int>(def.free_vars.size());
    v.rank = v.m;
    v.ok = true;
    v.message = "implicit form; controls are the free derivatives";
    return v;
  }
  v.m = static_cast<int>(def.controls.size());
  ExprMatrix jac;
  for (auto& eq : def.equations) {
    std::vector<Expr> row;
    for (int j = 1; j <= v.m; ++j)
      row.push_back(eq.rhs.partial(Sym::ctrl(j, 0)));
    jac.push_back(std::move(row));
  }
  v.rank = generic_rank(jac, rng);
  v.ok = v.rank == v.m;
  v.message = v.ok ? "full control"
                   : "input Jacobian has generic rank " +
                         std::to_string(v.rank) + " < " + std::to_string(v.m);
  return v;
}

} // namespace jetsym
