#include "doctest.h"
#include "jetsym/linalg.hpp"
#include "jetsym/system.hpp"

using namespace jetsym;

namespace {

NormalSystem make(const std::string& text) {
  return normalize(parse_system(text));
}

const char* kProduct =
    "system prod;\n"
    "free x1 x2;\n"
    "dep x3;\n"
    "eq x3' = x1'*x2';\n";

} // namespace

TEST_CASE("implicit declaration parses into canonical form") {
  NormalSystem ns = make(kProduct);
  CHECK(ns.n == 3);
  CHECK(ns.m == 2);
  CHECK(ns.var_names == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(ns.f_of(3) == Expr::var(Sym::jet(1, 1)) * Expr::var(Sym::jet(2, 1)));
}

TEST_CASE("explicit controls are absorbed into free derivatives") {
  // x' = u^2, y' = u: the control is the derivative of y, so y becomes the
  // free variable and the remaining equation reads x' = y'^2.
  NormalSystem ns = make(
      "system sq;\n"
      "dep x y;\n"
      "controls u;\n"
      "eq x' = u^2;\n"
      "eq y' = u;\n");
  CHECK(ns.n == 2);
  CHECK(ns.m == 1);
  CHECK(ns.var_names == std::vector<std::string>{"y", "x"});
  CHECK(ns.f_of(2) == Expr::var(Sym::jet(1, 1)).pow(2));
}

TEST_CASE("controls without a bare-derivative equation become fresh states") {
  NormalSystem ns = make(
      "system aff;\n"
      "dep x;\n"
      "controls u;\n"
      "eq x' = x + u;\n");
  CHECK(ns.n == 2);
  CHECK(ns.m == 1);
  CHECK(ns.var_names == std::vector<std::string>{"u", "x"});
  // x' = x + u with u = (fresh state)' => f depends on the fresh derivative
  CHECK(ns.f_of(2) ==
        Expr::var(Sym::jet(2, 0)) + Expr::var(Sym::jet(1, 1)));
}

TEST_CASE("a system of free variables only has no equations") {
  NormalSystem ns = make("system torus; free x;\n");
  CHECK(ns.n == 1);
  CHECK(ns.m == 1);
  CHECK(ns.f.empty());
}

TEST_CASE("parse errors carry a location and a category") {
  CHECK_THROWS_WITH_AS(parse_system("system ; free x;"),
                       doctest::Contains("SyntaxError"), parse_error);
  try {
    parse_system("system s; free x; dep y; eq y' = x * w;");
    FAIL("expected an undeclared-symbol error");
  } catch (const parse_error& e) {
    CHECK(e.code == "UndeclaredSymbol");
    CHECK(e.line == 1);
  }
  try {
    parse_system("system s; free x; dep y; eq y' = x + t;");
    FAIL("expected a non-autonomous error");
  } catch (const parse_error& e) {
    CHECK(e.code == "NonAutonomous");
  }
}

TEST_CASE("normalization rejects malformed systems") {
  auto code_of = [](const std::string& text) {
    try {
      make(text);
    } catch (const normalization_error& e) {
      return e.code;
    }
    return std::string("(none)");
  };
  CHECK(code_of("system s; free x; dep y; eq y' = x'; eq y' = x;") ==
        "DuplicateEquation");
  CHECK(code_of("system s; free x; dep y z; eq y' = x;") == "MissingEquation");
  CHECK(code_of("system s; free x; dep y; eq y' = x'';") ==
        "NormalizationFailure"); // second-order right-hand side
  CHECK(code_of("system s; free x; dep y z; eq y' = z'; eq z' = x;") ==
        "NormalizationFailure"); // dependent derivative on the right
  CHECK(code_of("system s; free x; dep y; eq x' = y;") ==
        "NormalizationFailure"); // equation attached to a free variable
  CHECK(code_of("system s; free x; dep y; eq y'' = x;") ==
        "NormalizationFailure"); // left-hand side must be first order
}

TEST_CASE("cartan field acts on canonical coordinates") {
  NormalSystem ns = make(kProduct);
  Sym x1 = Sym::jet(1, 0), x3 = Sym::jet(3, 0);
  Sym x1d = Sym::jet(1, 1), x2d = Sym::jet(2, 1);
  Expr tau_x3 = ns.tau_apply(Expr::var(x3));
  CHECK(tau_x3 == Expr::var(x1d) * Expr::var(x2d));
  CHECK(ns.tau_apply(Expr::var(x1d)) == Expr::var(Sym::jet(1, 2)));

  // Leibniz: tau(x1 * x3) = x1' * x3 + x1 * x1' * x2'
  Expr lhs = ns.tau_apply(Expr::var(x1) * Expr::var(x3));
  Expr rhs = Expr::var(x1d) * Expr::var(x3) +
             Expr::var(x1) * Expr::var(x1d) * Expr::var(x2d);
  CHECK(lhs == rhs);

  // second power of tau on x3
  Expr t2 = ns.tau_power(Expr::var(x3), 2);
  CHECK(t2 == Expr::var(Sym::jet(1, 2)) * Expr::var(x2d) +
                  Expr::var(x1d) * Expr::var(Sym::jet(2, 2)));

  CHECK(ns.tau_apply(Expr::integer(5)).is_zero());
}

TEST_CASE("cartan field output stays canonical and raises order by one") {
  NormalSystem ns = make(kProduct);
  Expr e = Expr::var(Sym::jet(3, 0)) * Expr::var(Sym::jet(1, 1));
  Expr te = ns.tau_apply(e);
  for (Sym s : te.variables()) {
    REQUIRE(s.kind() == SymKind::Jet);
    if (s.i() > ns.m) CHECK(s.k() == 0);
  }
  CHECK(te.order_in(1) <= e.order_in(1) + 1);
}

TEST_CASE("explicit realization substitutes controls for free derivatives") {
  NormalSystem ns = make(kProduct);
  ExplicitForm ex = ns.explicit_form();
  REQUIRE(ex.f.size() == 3);
  CHECK(ex.f[0] == Expr::var(Sym::ctrl(1, 0)));
  CHECK(ex.f[1] == Expr::var(Sym::ctrl(2, 0)));
  CHECK(ex.f[2] == Expr::var(Sym::ctrl(1, 0)) * Expr::var(Sym::ctrl(2, 0)));
  // tau on the explicit space: states move by f, controls shift up
  CHECK(ex.tau_apply(Expr::var(Sym::jet(3, 0))) ==
        Expr::var(Sym::ctrl(1, 0)) * Expr::var(Sym::ctrl(2, 0)));
  CHECK(ex.tau_apply(Expr::var(Sym::ctrl(1, 0))) ==
        Expr::var(Sym::ctrl(1, 1)));
}

TEST_CASE("full-control validation ranks the input Jacobian") {
  RandomRats rng(7);
  // control absent from every right-hand side
  SystemDef bad = parse_system(
      "system b; dep x1 x2; controls u;\n"
      "eq x1' = x2;\n"
      "eq x2' = x1;\n");
  auto v = validate_full_control(bad, rng);
  CHECK_FALSE(v.ok);
  CHECK(v.rank == 0);

  SystemDef good = parse_system(
      "system g; dep x y; controls u;\n"
      "eq x' = u^2;\n"
      "eq y' = u;\n");
  auto w = validate_full_control(good, rng);
  CHECK(w.ok);
  CHECK(w.rank == 1);

  auto impl = validate_full_control(parse_system(kProduct), rng);
  CHECK(impl.ok);
  CHECK(impl.rank == 2);
}

TEST_CASE("expression parser handles the full operator set") {
  NormalSystem ns = make(kProduct);
  Expr e = ns.parse_expr("(x1 + 2*x2)^2 - x3/3 + 1/2 - D(x1,3)");
  Expr expect = (Expr::var(Sym::jet(1, 0)) +
                 Expr::integer(2) * Expr::var(Sym::jet(2, 0)))
                    .pow(2) -
                Expr::var(Sym::jet(3, 0)) / Expr::integer(3) +
                Expr::rational(frac(1, 2)) - Expr::var(Sym::jet(1, 3));
  CHECK(e == expect);
  CHECK_THROWS_AS(ns.parse_expr("x3'"), parse_error); // not canonical
}
