#ifndef JETSYM_FLOW_HPP
#define JETSYM_FLOW_HPP

#include <map>
#include <string>
#include <vector>

#include "jetsym/vfield.hpp"

namespace jetsym {

struct closure_cap_exceeded : symbolic_error {
  explicit closure_cap_exceeded(const std::string& w)
      : symbolic_error("ClosureCapExceeded: " + w) {}
};

struct singularity_encountered : symbolic_error {
  explicit singularity_encountered(const std::string& w)
      : symbolic_error("SingularityEncountered: " + w) {}
};

// A finite autonomous ODE system for the flow of a field: coordinates closed
// under the field together with the per-coordinate images dx/ds = delta(x).
// `dependencies` records which coordinates each image draws on; every entry is
// itself listed, which is the closure certificate.
struct FiniteFlowField {
  std::vector<Sym> coordinates;
  std::vector<Expr> rhs;
  std::map<Sym, std::vector<Sym>> dependencies;

  int index_of(Sym v) const; // -1 when absent
};

// Closes {x_1..x_n} (plus optional extra seed jets) under delta by repeatedly
// adding every jet a computed image mentions. Throws closure_cap_exceeded once
// more than `cap` coordinates are needed; for a verified symmetry that is
// strong evidence the field is not integrable.
FiniteFlowField close_finite_system(const NormalSystem& ns, const VField& vf,
                                    int cap = 50,
                                    const std::vector<Sym>& seeds = {});

// Float64 evaluation. Throws singularity_encountered when a denominator
// magnitude falls below 1e-12, symbolic_error when a symbol has no value.
double numeric_eval(const Expr& e, const std::map<Sym, double>& point);

struct FlowSample {
  double s = 0.0;
  std::vector<double> x;
};

struct FlowResult {
  std::vector<FlowSample> samples; // samples.front() is the initial point
  double step = 0.0;
  std::string method = "rk4";

  const std::vector<double>& endpoint() const { return samples.back().x; }
};

// Classical fixed-step Runge-Kutta for dx/ds = rhs(x) with step s/steps.
// s = 0 returns the initial point alone, without evaluating anything.
FlowResult rk4_flow(const FiniteFlowField& field, const std::vector<double>& p0,
                    double s, int steps);

struct GroupLawResult {
  bool pass = false;
  double error = 0.0; // sup-norm defect between the two composite endpoints
};

// Compares flow(s1+s2) against flow(s2) after flow(s1); every leg is
// integrated with the same number of steps.
GroupLawResult group_law_check(const FiniteFlowField& field,
                               const std::vector<double>& p0, double s1,
                               double s2, int steps, double tol);

struct EquivarianceResult {
  bool pass = false;
  double endpoint_error = 0.0; // flowed endpoint vs re-integrated endpoint
  double residual_error = 0.0; // finite-difference system residual
};

// Checks that the flow maps trajectories to trajectories: integrate the system
// from p0 under the polynomial controls over [0, T], push the sampled curve
// through the flow at parameter s, then re-integrate from the flowed initial
// point with the flowed controls and compare endpoints (pass needs the defect
// within tol). The flowed curve must also satisfy the system equations, which
// is checked by central differences against tol*10.
//
// `control[j]` holds the coefficients of u_{j+1}(t) in increasing powers of t;
// p0 holds initial values for x_1..x_n and must agree with the controls at
// t = 0.
EquivarianceResult equivariance_check(
    const NormalSystem& ns, const VField& vf, const std::vector<double>& p0,
    const std::vector<std::vector<double>>& control, double T, double s,
    double tol, int traj_steps = 400, int flow_steps = 128);

} // namespace jetsym

#endif
