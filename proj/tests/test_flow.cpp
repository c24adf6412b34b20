#include <doctest.h>

#include <cmath>

#include "jetsym/flow.hpp"

using namespace jetsym;

namespace {

NormalSystem make(const std::string& text) {
  return normalize(parse_system(text));
}

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

const char* kTorus1 =
    "system t1;\n"
    "free x;\n";

VField first_order_scaling(const NormalSystem& ns) {
  return parse_vfield(ns, "a1 = x2'; a2 = x2; a3 = x3 + x2'^2/2;");
}

double sup_err(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    e = std::max(e, std::fabs(a[i] - b[i]));
  return e;
}

} // namespace

TEST_CASE("closure of the first-order product symmetry needs one extra jet") {
  auto ns = make(kProduct);
  VField vf = first_order_scaling(ns);
  REQUIRE(is_symmetry(ns, vf));

  auto ff = close_finite_system(ns, vf);
  CHECK(ff.coordinates == std::vector<Sym>{Sym::jet(1, 0), Sym::jet(2, 0),
                                           Sym::jet(3, 0), Sym::jet(2, 1)});
  // delta x2' = tau(x2) = x2'
  CHECK(ff.rhs[3] == Expr::var(Sym::jet(2, 1)));
  CHECK(ff.index_of(Sym::jet(2, 2)) == -1);

  // closure certificate: everything an image mentions is itself listed
  for (const auto& [v, deps] : ff.dependencies) {
    CHECK(ff.index_of(v) >= 0);
    for (Sym w : deps) CHECK(ff.index_of(w) >= 0);
  }
}

TEST_CASE("order-zero symmetries close over the states alone") {
  auto ns = make(kProduct);
  VField trans = parse_vfield(ns, "a1 = 0; a2 = 0; a3 = 1;");
  REQUIRE(is_symmetry(ns, trans));

  auto ff = close_finite_system(ns, trans);
  CHECK(ff.coordinates.size() == 3);
  CHECK(ff.rhs[0].is_zero());
  CHECK(ff.rhs[2] == Expr::integer(1));
}

TEST_CASE("seed coordinates are closed along with the states") {
  auto ns = make(kProduct);
  auto ff = close_finite_system(ns, first_order_scaling(ns), 50,
                                {Sym::jet(1, 1)});
  CHECK(ff.coordinates == std::vector<Sym>{Sym::jet(1, 0), Sym::jet(2, 0),
                                           Sym::jet(3, 0), Sym::jet(1, 1),
                                           Sym::jet(2, 1), Sym::jet(2, 2)});
  // delta x1' = tau(x2') = x2''
  CHECK(ff.rhs[3] == Expr::var(Sym::jet(2, 2)));
}

TEST_CASE("closure cap flags the non-integrable torus candidate") {
  auto ns = make(kTorus1);
  VField wild{{Expr::var(Sym::jet(1, 2))}};
  REQUIRE(is_symmetry(ns, wild)); // no equations, every field commutes

  CHECK_THROWS_AS(close_finite_system(ns, wild), closure_cap_exceeded);
  CHECK_THROWS_WITH(close_finite_system(ns, wild, 6),
                    "ClosureCapExceeded: more than 6 coordinates needed; the "
                    "field is likely not integrable");
}

TEST_CASE("numeric evaluation guards small denominators") {
  Sym x = Sym::jet(1, 0);
  Expr e =
      (Expr::var(x) + Expr::integer(1)) / (Expr::var(x) - Expr::integer(1));
  CHECK(numeric_eval(e, {{x, 3.0}}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(numeric_eval(e, {{x, 1.0 + 5e-13}}), singularity_encountered);
  CHECK_THROWS_AS(numeric_eval(e, {}), symbolic_error);
}

TEST_CASE("the square-system scaling flow matches its exponential form") {
  auto ns = make(kSquare);
  VField vf = parse_vfield(ns, "a1 = y; a2 = 2*x;");
  REQUIRE(is_symmetry(ns, vf));

  auto ff = close_finite_system(ns, vf);
  REQUIRE(ff.coordinates == std::vector<Sym>{Sym::jet(1, 0), Sym::jet(2, 0)});

  std::vector<double> p0 = {1.5, -0.7};
  auto res = rk4_flow(ff, p0, 1.0, 1000);
  CHECK(res.samples.size() == 1001);
  CHECK(res.samples.front().x == p0); // exact, no arithmetic on the input
  CHECK(res.step == doctest::Approx(0.001));
  CHECK(res.method == "rk4");
  CHECK(res.samples.back().s == doctest::Approx(1.0));

  double e1 = std::exp(1.0);
  std::vector<double> want = {1.5 * e1, -0.7 * e1 * e1};
  CHECK(sup_err(res.endpoint(), want) <= 1e-8);
}

TEST_CASE("translation flows are exact to rounding") {
  auto ns = make(kProduct);
  auto ff =
      close_finite_system(ns, parse_vfield(ns, "a1 = 0; a2 = 0; a3 = 1;"));
  auto res = rk4_flow(ff, {0.3, -1.2, 0.8}, 0.7, 10);
  CHECK(res.endpoint()[0] == 0.3);
  CHECK(res.endpoint()[1] == -1.2);
  CHECK(std::fabs(res.endpoint()[2] - 1.5) <= 1e-12);
}

TEST_CASE("the first-order product flow matches its closed form") {
  auto ns = make(kProduct);
  auto ff = close_finite_system(ns, first_order_scaling(ns));

  // coordinates x1, x2, x3, x2'
  std::vector<double> p0 = {0.3, -1.2, 0.8, 0.6};
  double s = 0.9;
  auto got = rk4_flow(ff, p0, s, 400).endpoint();

  double es = std::exp(s);
  std::vector<double> want = {0.3 + 0.6 * (es - 1.0), -1.2 * es,
                              0.8 * es + 0.18 * (es * es - es), 0.6 * es};
  CHECK(sup_err(got, want) <= 1e-8);
}

TEST_CASE("zero flow parameter returns the point without integrating") {
  auto ns = make(kTorus1);
  VField inv{{Expr::integer(1) / Expr::var(Sym::jet(1, 0))}};
  auto ff = close_finite_system(ns, inv);

  auto res = rk4_flow(ff, {0.0}, 0.0, 50);
  REQUIRE(res.samples.size() == 1);
  CHECK(res.samples[0].s == 0.0);
  CHECK(res.samples[0].x == std::vector<double>{0.0});
  CHECK(res.step == 0.0);

  CHECK_THROWS_AS(rk4_flow(ff, {0.0}, 1.0, 50), singularity_encountered);

  // away from the pole the rational flow behaves: x' = 1/x, x(0) = 2
  auto ok = rk4_flow(ff, {2.0}, 1.5, 400);
  CHECK(std::fabs(ok.endpoint()[0] - std::sqrt(7.0)) <= 1e-8);
}

TEST_CASE("flow argument validation") {
  auto ns = make(kProduct);
  auto ff =
      close_finite_system(ns, parse_vfield(ns, "a1 = 0; a2 = 0; a3 = 1;"));
  CHECK_THROWS_AS(rk4_flow(ff, {0.0, 0.0, 0.0}, 1.0, 0), symbolic_error);
  CHECK_THROWS_AS(rk4_flow(ff, {0.0}, 1.0, 5), symbolic_error);
}

TEST_CASE("group law holds for the affine square-system flows") {
  auto ns = make(kSquare);
  VField vf = parse_vfield(ns, "a1 = y + 1; a2 = 2*x + 3;");
  REQUIRE(is_symmetry(ns, vf));
  auto ff = close_finite_system(ns, vf);
  std::vector<double> p0 = {0.4, 1.1};

  CHECK(group_law_check(ff, p0, 0.3, 0.5, 200, 1e-6).pass);

  // inverse law: running backwards recovers the start
  CHECK(group_law_check(ff, p0, 0.45, -0.45, 200, 1e-6).pass);

  auto zero = group_law_check(ff, p0, 0.0, 0.0, 10, 1e-6);
  CHECK(zero.pass);
  CHECK(zero.error == 0.0);
}

TEST_CASE("group law on the product flow improves sixteen-fold per halving") {
  auto ns = make(kProduct);
  auto ff = close_finite_system(ns, first_order_scaling(ns));
  std::vector<double> p0 = {0.3, -1.2, 0.8, 0.6};

  CHECK(group_law_check(ff, p0, 0.4, 0.7, 64, 1e-6).pass);

  double coarse = group_law_check(ff, p0, 0.4, 0.7, 8, 1e-6).error;
  double fine = group_law_check(ff, p0, 0.4, 0.7, 16, 1e-6).error;
  REQUIRE(fine > 1e-13); // the defect must sit well above rounding noise
  double factor = coarse / fine;
  CHECK(factor >= 8.0);
  CHECK(factor <= 32.0);
}

TEST_CASE("flows of commuting scalings compose like their sum") {
  auto ns = make(kProduct);
  VField a = parse_vfield(ns, "a1 = x1; a2 = 0; a3 = x3;");
  VField b = parse_vfield(ns, "a1 = 0; a2 = x2; a3 = x3;");
  REQUIRE(is_symmetry(ns, a));
  REQUIRE(is_symmetry(ns, b));
  CHECK(lie_bracket(ns, a, b) == VField::zero(ns));

  VField sum = combine(a, Expr::integer(1), b, Expr::integer(1));
  auto ffa = close_finite_system(ns, a);
  auto ffb = close_finite_system(ns, b);
  auto ffs = close_finite_system(ns, sum);

  std::vector<double> p0 = {0.5, -0.9, 1.3};
  double s = 0.8;
  auto joint = rk4_flow(ffs, p0, s, 512).endpoint();
  auto comp =
      rk4_flow(ffb, rk4_flow(ffa, p0, s, 512).endpoint(), s, 512).endpoint();
  CHECK(sup_err(joint, comp) <= 1e-9);

  double es = std::exp(s);
  std::vector<double> want = {0.5 * es, -0.9 * es, 1.3 * es * es};
  CHECK(sup_err(joint, want) <= 1e-9);
}

TEST_CASE("equivariance of the square-system scaling flow") {
  auto ns = make(kSquare);
  VField vf = parse_vfield(ns, "a1 = y; a2 = 2*x;");
  std::vector<std::vector<double>> u = {{0.8, 0.5, -0.25}};
  std::vector<double> p0 = {0.8, 0.45};

  auto r = equivariance_check(ns, vf, p0, u, 1.0, 0.4, 1e-6);
  CHECK(r.pass);
  CHECK(r.endpoint_error <= 1e-6);
  CHECK(r.residual_error <= 1e-5);

  auto id = equivariance_check(ns, vf, p0, u, 1.0, 0.0, 1e-6);
  CHECK(id.pass);
  CHECK(id.endpoint_error == 0.0); // the zero flow is the identity, exactly
}

TEST_CASE("equivariance transports product-system trajectories") {
  auto ns = make(kProduct);
  std::vector<std::vector<double>> u = {{0.3, 0.4, 0.1},
                                        {-1.2, 0.6, 0.0, -0.2}};
  std::vector<double> p0 = {0.3, -1.2, 0.8};

  auto r = equivariance_check(ns, first_order_scaling(ns), p0, u, 1.0, 0.5,
                              1e-6);
  CHECK(r.pass);

  VField scaling = parse_vfield(ns, "a1 = x1; a2 = 0; a3 = x3;");
  auto rs = equivariance_check(ns, scaling, p0, u, 1.0, 0.5, 1e-5);
  CHECK(rs.pass);

  // negative control: perturbing one generator must break the transport
  VField bad = parse_vfield(ns, "a1 = x2'; a2 = x2; a3 = x3 + x2'^2/2 + x2/5;");
  CHECK_FALSE(is_symmetry(ns, bad));
  auto rb = equivariance_check(ns, bad, p0, u, 1.0, 0.5, 1e-6);
  CHECK_FALSE(rb.pass);
  CHECK(rb.residual_error > 1e-5);
}

TEST_CASE("equivariance validates its inputs") {
  auto ns = make(kSquare);
  VField vf = parse_vfield(ns, "a1 = y; a2 = 2*x;");
  std::vector<std::vector<double>> u = {{0.8, 0.5}};
  CHECK_THROWS_AS(equivariance_check(ns, vf, {0.8}, u, 1.0, 0.4, 1e-6),
                  symbolic_error);
  CHECK_THROWS_AS(equivariance_check(ns, vf, {0.7, 0.45}, u, 1.0, 0.4, 1e-6),
                  symbolic_error);
  CHECK_THROWS_AS(equivariance_check(ns, vf, {0.8, 0.45}, {}, 1.0, 0.4, 1e-6),
                  symbolic_error);
  CHECK_THROWS_AS(equivariance_check(ns, vf, {0.8, 0.45}, u, 0.0, 0.4, 1e-6),
                  symbolic_error);
}
