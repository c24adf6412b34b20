#include <doctest.h>

#include "jetsym/vfield.hpp"

using namespace jetsym;

namespace {

NormalSystem make(const std::string& text) {
  return normalize(parse_system(text));
}

// x' = y'^2 in canonical form (variable 1 = y free, variable 2 = x).
const char* kSquare =
    "system sq;\n"
    "free y;\n"
    "dep x;\n"
    "eq x' = y'^2;\n";

const char* kProduct =
    "system prod;\n"
    "free x1 x2;\n"
    "dep x3;\n"
    "eq x3' = x1'*x2';\n";

Expr V(Sym s) { return Expr::var(s); }

} // namespace

TEST_CASE("prolongation pushes generators through the cartan field") {
  NormalSystem ns = make("system t1; free x;\n");
  // a = x^2 on a single free variable: delta(x') = 2*x*x',
  // delta(x'') = 2*x'^2 + 2*x*x''.
  VField vf{{V(Sym::jet(1, 0)).pow(2)}};
  DeltaOp d(ns, vf);
  Expr x = V(Sym::jet(1, 0)), xd = V(Sym::jet(1, 1)), xdd = V(Sym::jet(1, 2));
  CHECK(d.image_of(Sym::jet(1, 1)) == Expr::integer(2) * x * xd);
  CHECK(d.apply(xdd) ==
        Expr::integer(2) * xd.pow(2) + Expr::integer(2) * x * xdd);
}

TEST_CASE("delta_apply is a derivation") {
  NormalSystem ns = make(kSquare);
  VField vf{{V(Sym::jet(1, 1)), V(Sym::jet(2, 0)) * V(Sym::jet(1, 0))}};
  Expr e1 = V(Sym::jet(2, 0)) + V(Sym::jet(1, 2));
  Expr e2 = V(Sym::jet(1, 0)).pow(3) - Expr::integer(2);
  CHECK(delta_apply(ns, vf, e1 * e2) ==
        delta_apply(ns, vf, e1) * e2 + e1 * delta_apply(ns, vf, e2));
  CHECK(delta_apply(ns, vf, Expr::rational(frac(3, 7))).is_zero());
}

TEST_CASE("scaling field commutes with the square system") {
  NormalSystem ns = make(kSquare);
  // Scaling x -> lambda^2 x, y -> lambda y: generators (y/2, x).
  VField vf = parse_vfield(ns, "a1 = y/2; a2 = x;");
  CHECK(commutator_residuals(ns, vf) == std::vector<Expr>{Expr()});
  CHECK(is_symmetry(ns, vf));
  CHECK(vf.order() == 0);

  // The affine family (alpha*y + c1, 2*alpha*x + c2) stays symmetric; a
  // mismatched pair leaves the residual (beta - 2*alpha)*y'^2.
  VField good = parse_vfield(ns, "a1 = 3*y + 5; a2 = 6*x + 7;");
  CHECK(is_symmetry(ns, good));
  VField bad = parse_vfield(ns, "a1 = y; a2 = x;");
  auto res = commutator_residuals(ns, bad);
  REQUIRE(res.size() == 1);
  CHECK(res[0] == -V(Sym::jet(1, 1)).pow(2));
  CHECK_FALSE(is_symmetry(ns, bad));
}

TEST_CASE("first order symmetry of the product system") {
  NormalSystem ns = make(kProduct);
  VField vf = parse_vfield(ns, "a1 = x2'; a2 = x2; a3 = x3 + x2'^2/2;");
  CHECK(vf.order() == 1);
  CHECK(is_symmetry(ns, vf));
  // Dropping the correction term breaks the commutation.
  VField broken = parse_vfield(ns, "a1 = x2'; a2 = x2; a3 = x3;");
  auto res = commutator_residuals(ns, broken);
  REQUIRE(res.size() == 1);
  CHECK(res[0] == -(V(Sym::jet(2, 1)) * V(Sym::jet(2, 2))));
}

TEST_CASE("brackets of shift fields on two free variables") {
  NormalSystem ns = make("system t2; free x1 x2;\n");
  VField d1{{V(Sym::jet(2, 1)), Expr()}};
  VField d2{{Expr(), V(Sym::jet(1, 1))}};
  VField br = lie_bracket(ns, d1, d2);
  CHECK(br.a[0] == -V(Sym::jet(1, 2)));
  CHECK(br.a[1] == V(Sym::jet(2, 2)));
  VField rb = lie_bracket(ns, d2, d1);
  CHECK(rb.a[0] == V(Sym::jet(1, 2)));
  CHECK(rb.a[1] == -V(Sym::jet(2, 2)));
}

TEST_CASE("generator brackets satisfy the jacobi identity on free systems") {
  NormalSystem ns = make("system t1; free x;\n");
  Expr x = V(Sym::jet(1, 0)), xd = V(Sym::jet(1, 1)), xdd = V(Sym::jet(1, 2));
  VField fx{{x * xd}}, fy{{x.pow(2)}}, fz{{xdd}};
  VField j = lie_bracket(ns, fx, lie_bracket(ns, fy, fz));
  j = combine(j, Expr::integer(1),
              lie_bracket(ns, fy, lie_bracket(ns, fz, fx)), Expr::integer(1));
  j = combine(j, Expr::integer(1),
              lie_bracket(ns, fz, lie_bracket(ns, fx, fy)), Expr::integer(1));
  for (const auto& c : j.a) CHECK(c.is_zero());
}

TEST_CASE("vfield text form round trip and errors") {
  NormalSystem ns = make(kSquare);
  VField vf = parse_vfield(ns, "a2 = x; a1 = y/2;  # scaling\n");
  CHECK(vfield_strings(ns, vf) ==
        std::vector<std::string>{"a1 = 1/2*y", "a2 = x"});
  CHECK_THROWS_AS(parse_vfield(ns, "a1 = y;"), parse_error);
  CHECK_THROWS_AS(parse_vfield(ns, "a1 = y; a1 = x;"), parse_error);
  CHECK_THROWS_AS(parse_vfield(ns, "a1 = y; a3 = x;"), parse_error);
  CHECK_THROWS_AS(parse_vfield(ns, "b1 = y; a2 = x;"), parse_error);
  CHECK_THROWS_AS(parse_vfield(ns, "a1 = y; a2 = x'';"), parse_error);
}

TEST_CASE("control direction iterates close at the accessibility span") {
  NormalSystem ns = make(
      "system sq;\n"
      "dep x y;\n"
      "controls u;\n"
      "eq x' = u^2;\n"
      "eq y' = u;\n");
  ExplicitForm ex = ns.explicit_form();
  REQUIRE(ex.n == 2);
  REQUIRE(ex.m == 1);
  Sym y = Sym::jet(1, 0), x = Sym::jet(2, 0);
  Sym u = Sym::ctrl(1, 0), ud = Sym::ctrl(1, 1), udd = Sym::ctrl(1, 2);

  SparseField h0 = hat_tau_iterate(ex, 1, 0);
  CHECK(h0 == SparseField{{u, Expr::integer(1)}});
  SparseField h1 = hat_tau_iterate(ex, 1, 1);
  CHECK(h1 == SparseField{{y, Expr::integer(1)}, {x, Expr::integer(2) * V(u)}});
  SparseField h2 = hat_tau_iterate(ex, 1, 2);
  CHECK(h2 == SparseField{{x, Expr::integer(-2) * V(ud)}});
  SparseField h3 = hat_tau_iterate(ex, 1, 3);
  CHECK(h3 == SparseField{{x, Expr::integer(2) * V(udd)}});

  // [d/du, hat] picks up only the x direction.
  SparseField mixed = lie_bracket(h0, h1);
  CHECK(mixed == SparseField{{x, Expr::integer(2)}});
  // Antisymmetry on the sparse side.
  SparseField swapped = lie_bracket(h1, h0);
  CHECK(swapped == SparseField{{x, Expr::integer(-2)}});
}

TEST_CASE("sparse fields act as derivations on the explicit space") {
  SparseField f{{Sym::jet(1, 0), V(Sym::ctrl(1, 0)).pow(2)},
                {Sym::jet(2, 0), V(Sym::ctrl(1, 0))}};
  Expr e = V(Sym::jet(1, 0)) * V(Sym::jet(2, 0));
  CHECK(field_apply(f, e) ==
        V(Sym::ctrl(1, 0)).pow(2) * V(Sym::jet(2, 0)) +
            V(Sym::ctrl(1, 0)) * V(Sym::jet(1, 0)));
  CHECK(field_apply(f, Expr::integer(4)).is_zero());
}
