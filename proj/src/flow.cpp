#include "jetsym/flow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace jetsym {

namespace {

constexpr double kDenominatorFloor = 1e-12;

double poly_eval_d(const Poly& p, const std::map<Sym, double>& point) {
  double acc = 0.0;
  for (const auto& [mono, coef] : p.terms()) {
    double term = coef.get_d();
    for (const auto& [s, e] : mono.f) {
      auto it = point.find(s);
      if (it == point.end())
        throw symbolic_error("no value supplied for " + default_sym_name(s));
      term *= std::pow(it->second, e);
    }
    acc += term;
  }
  return acc;
}

std::vector<double> axpy(const std::vector<double>& y, double h,
                         const std::vector<double>& k) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

std::vector<double> field_rhs(const FiniteFlowField& field,
                              const std::vector<double>& y) {
  std::map<Sym, double> pt;
  for (std::size_t i = 0; i < field.coordinates.size(); ++i)
    pt[field.coordinates[i]] = y[i];
  std::vector<double> out(field.rhs.size());
  for (std::size_t i = 0; i < field.rhs.size(); ++i)
    out[i] = numeric_eval(field.rhs[i], pt);
  return out;
}

// Coefficients of the k-th derivative of a polynomial in t.
std::vector<double> poly_derive(std::vector<double> c, int k) {
  for (int r = 0; r < k; ++r) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i)
      d.push_back(static_cast<double>(i) * c[i]);
    c = std::move(d);
  }
  return c;
}

double poly_at(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

} // namespace

int FiniteFlowField::index_of(Sym v) const {
  auto it = std::find(coordinates.begin(), coordinates.end(), v);
  return it == coordinates.end() ? -1 : static_cast<int>(it - coordinates.begin());
}

double numeric_eval(const Expr& e, const std::map<Sym, double>& point) {
  double den = poly_eval_d(e.den(), point);
  if (std::fabs(den) < kDenominatorFloor)
    throw singularity_encountered("denominator magnitude below 1e-12");
  return poly_eval_d(e.num(), point) / den;
}

FiniteFlowField close_finite_system(const NormalSystem& ns, const VField& vf,
                                    int cap, const std::vector<Sym>& seeds) {
  if (static_cast<int>(vf.a.size()) != ns.n)
    throw symbolic_error("field has the wrong number of components");
  DeltaOp delta(ns, vf);

  FiniteFlowField out;
  for (int i = 1; i <= ns.n; ++i) out.coordinates.push_back(Sym::jet(i, 0));
  for (Sym s : seeds)
    if (out.index_of(s) < 0) out.coordinates.push_back(s);

  for (std::size_t q = 0; q < out.coordinates.size(); ++q) {
    Sym v = out.coordinates[q];
    Expr img = delta.image_of(v);
    out.rhs.push_back(img);
    out.dependencies[v] = img.variables();
    for (Sym w : out.dependencies[v]) {
      if (out.index_of(w) >= 0) continue;
      out.coordinates.push_back(w);
      if (static_cast<int>(out.coordinates.size()) > cap)
        throw closure_cap_exceeded("more than " + std::to_string(cap) +
                                   " coordinates needed; the field is likely "
                                   "not integrable");
    }
  }
  return out;
}

FlowResult rk4_flow(const FiniteFlowField& field, const std::vector<double>& p0,
                    double s, int steps) {
  if (steps < 1) throw symbolic_error("step count must be at least 1");
  if (p0.size() != field.coordinates.size())
    throw symbolic_error("initial point has the wrong dimension");

  FlowResult out;
  if (s == 0.0) {
    out.samples.push_back({0.0, p0});
    return out;
  }

  const double h = s / steps;
  out.step = h;
  out.samples.push_back({0.0, p0});
  std::vector<double> y = p0;
  for (int k = 1; k <= steps; ++k) {
    auto k1 = field_rhs(field, y);
    auto k2 = field_rhs(field, axpy(y, h / 2, k1));
    auto k3 = field_rhs(field, axpy(y, h / 2, k2));
    auto k4 = field_rhs(field, axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    out.samples.push_back({k * h, y});
  }
  return out;
}

GroupLawResult group_law_check(const FiniteFlowField& field,
                               const std::vector<double>& p0, double s1,
                               double s2, int steps, double tol) {
  auto both = rk4_flow(field, p0, s1 + s2, steps).endpoint();
  auto leg1 = rk4_flow(field, p0, s1, steps).endpoint();
  auto legs = rk4_flow(field, leg1, s2, steps).endpoint();
  double err = 0.0;
  for (std::size_t i = 0; i < both.size(); ++i)
    err = std::max(err, std::fabs(both[i] - legs[i]));
  return {err <= tol, err};
}

EquivarianceResult equivariance_check(
    const NormalSystem& ns, const VField& vf, const std::vector<double>& p0,
    const std::vector<std::vector<double>>& control, double T, double s,
    double tol, int traj_steps, int flow_steps) {
  if (static_cast<int>(p0.size()) != ns.n)
    throw symbolic_error("initial point has the wrong dimension");
  if (static_cast<int>(control.size()) != ns.m)
    throw symbolic_error("one control polynomial per free variable required");
  if (traj_steps < 1 || flow_steps < 1)
    throw symbolic_error("step count must be at least 1");
  if (!(T > 0.0)) throw symbolic_error("final time must be positive");
  for (int j = 0; j < ns.m; ++j)
    if (std::fabs(p0[j] - poly_at(control[j], 0.0)) > 1e-9)
      throw symbolic_error(
          "initial point disagrees with the control sample at t = 0");

  // The closed system must carry every jet the equations mention, so the flow
  // can transport the control jets of a trajectory.
  std::set<Sym> seedset;
  for (int i = ns.m + 1; i <= ns.n; ++i)
    for (Sym v : ns.f_of(i).variables()) seedset.insert(v);
  FiniteFlowField ext = close_finite_system(
      ns, vf, 50, std::vector<Sym>(seedset.begin(), seedset.end()));

  // Control derivatives for every free jet in sight, as coefficient lists.
  std::map<Sym, std::vector<double>> jets;
  for (Sym v : ext.coordinates)
    if (v.i() <= ns.m) jets[v] = poly_derive(control[v.i() - 1], v.k());
  for (Sym v : seedset)
    if (v.i() <= ns.m && !jets.count(v))
      jets[v] = poly_derive(control[v.i() - 1], v.k());

  const int nd = ns.n - ns.m;
  auto traj_rhs = [&](double t, const std::vector<double>& dep) {
    std::map<Sym, double> pt;
    for (const auto& [v, c] : jets) pt[v] = poly_at(c, t);
    for (int i = 0; i < nd; ++i) pt[Sym::jet(ns.m + 1 + i, 0)] = dep[i];
    std::vector<double> out(nd);
    for (int i = 0; i < nd; ++i) out[i] = numeric_eval(ns.f_of(ns.m + 1 + i), pt);
    return out;
  };
  // All control evaluations, in both integration passes, use the same
  // fine-grid times so that the s = 0 flow reproduces the reference walk bit
  // for bit.
  const int N = traj_steps;
  const double h = T / N;
  auto tq = [&](int q) { return q * (h / 2); };
  auto traj_step = [&](std::vector<double> dep, double ta, double tb, double tc,
                       double hh) {
    auto k1 = traj_rhs(ta, dep);
    auto k2 = traj_rhs(tb, axpy(dep, hh / 2, k1));
    auto k3 = traj_rhs(tb, axpy(dep, hh / 2, k2));
    auto k4 = traj_rhs(tc, axpy(dep, hh, k3));
    for (std::size_t i = 0; i < dep.size(); ++i)
      dep[i] += hh / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return dep;
  };

  // Reference run over nodes of step h; midpoint states come from a single
  // half step so the fine grid (spacing h/2) is filled without altering the
  // node sequence.
  std::vector<std::vector<double>> dep_fine(2 * N + 1);
  std::vector<double> dep(p0.begin() + ns.m, p0.end());
  dep_fine[0] = dep;
  for (int k = 0; k < N; ++k) {
    int q = 2 * k;
    dep_fine[q + 1] =
        traj_step(dep, tq(q), tq(q) + h / 4, tq(q + 1), h / 2);
    dep = traj_step(dep, tq(q), tq(q + 1), tq(q + 2), h);
    dep_fine[q + 2] = dep;
  }

  // Push every fine-grid point of the curve through the flow.
  std::vector<std::vector<double>> flowed(2 * N + 1);
  for (int q = 0; q <= 2 * N; ++q) {
    std::vector<double> pt(ext.coordinates.size());
    for (std::size_t c = 0; c < ext.coordinates.size(); ++c) {
      Sym v = ext.coordinates[c];
      pt[c] = v.i() <= ns.m ? poly_at(jets.at(v), tq(q))
                            : dep_fine[q][v.i() - ns.m - 1];
    }
    flowed[q] = rk4_flow(ext, pt, s, flow_steps).endpoint();
  }

  // Re-integrate with the flowed controls; their values live on the fine grid,
  // which is exactly what the RK4 stages of an h-step walk consume.
  auto hat_rhs = [&](int q, const std::vector<double>& dep2) {
    std::map<Sym, double> pt;
    for (const auto& [v, c] : jets)
      pt[v] = flowed[q][static_cast<std::size_t>(ext.index_of(v))];
    for (int i = 0; i < nd; ++i) pt[Sym::jet(ns.m + 1 + i, 0)] = dep2[i];
    std::vector<double> out(nd);
    for (int i = 0; i < nd; ++i) out[i] = numeric_eval(ns.f_of(ns.m + 1 + i), pt);
    return out;
  };
  std::vector<double> hat(nd);
  for (int i = 0; i < nd; ++i)
    hat[i] = flowed[0][static_cast<std::size_t>(
        ext.index_of(Sym::jet(ns.m + 1 + i, 0)))];
  for (int k = 0; k < N; ++k) {
    int q = 2 * k;
    auto k1 = hat_rhs(q, hat);
    auto k2 = hat_rhs(q + 1, axpy(hat, h / 2, k1));
    auto k3 = hat_rhs(q + 1, axpy(hat, h / 2, k2));
    auto k4 = hat_rhs(q + 2, axpy(hat, h, k3));
    for (int i = 0; i < nd; ++i)
      hat[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }

  EquivarianceResult res;
  for (int i = 0; i < nd; ++i) {
    double want = flowed[2 * N][static_cast<std::size_t>(
        ext.index_of(Sym::jet(ns.m + 1 + i, 0)))];
    res.endpoint_error = std::max(res.endpoint_error, std::fabs(hat[i] - want));
  }

  // The flowed curve itself must solve the system: compare central differences
  // of the dependent components against the equations.
  for (int q = 1; q < 2 * N; ++q) {
    std::map<Sym, double> pt;
    for (std::size_t c = 0; c < ext.coordinates.size(); ++c)
      pt[ext.coordinates[c]] = flowed[q][c];
    for (int i = 0; i < nd; ++i) {
      int c = ext.index_of(Sym::jet(ns.m + 1 + i, 0));
      double fd = (flowed[q + 1][static_cast<std::size_t>(c)] -
                   flowed[q - 1][static_cast<std::size_t>(c)]) /
                  h;
      double fv = numeric_eval(ns.f_of(ns.m + 1 + i), pt);
      res.residual_error = std::max(res.residual_error, std::fabs(fd - fv));
    }
  }

  res.pass = res.endpoint_error <= tol && res.residual_error <= 10 * tol;
  return res;
}

} // namespace jetsym
