#ifndef JETSYM_INTEGRAB_HPP
#define JETSYM_INTEGRAB_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "jetsym/vfield.hpp"

namespace jetsym {

struct invalid_partition : symbolic_error {
  explicit invalid_partition(const std::string& w)
      : symbolic_error("InvalidPartition: " + w) {}
};

enum class GrowthVerdict { Bounded, StrictlyGrowing, Undetermined };
const char* growth_name(GrowthVerdict g);

// Orders of the iterated images delta^k x_i, plus the induced control rows
// delta^k x_j' = tau(delta^k x_j) for the free variables.
struct OrderProfile {
  std::vector<std::vector<int>> state_orders;   // [i-1][k], 0 <= k <= completed
  std::vector<std::vector<int>> control_orders; // [j-1][k], j <= m
  int completed = 0; // number of delta applications actually performed
  int e = 0;         // largest recorded order; meaningful when bounded
  GrowthVerdict growth = GrowthVerdict::Undetermined;
};

// Applies the field K times to every coordinate, recording expression orders.
// When an intermediate image exceeds monomial_cap monomials the remaining
// iterations are skipped and the growth verdict degrades to undetermined.
OrderProfile iterated_orders(const NormalSystem& ns, const VField& vf, int K,
                             std::size_t monomial_cap = 100000);

// Bound on the number of iterations that can produce new functional
// dependencies: n - m + n(n+1)*varpi/2, with varpi the field order.
int default_iteration_cap(int n, int m, int varpi);

enum class IntegrabilityStatus {
  IntegrableEvidence,
  NotIntegrable,
  Undetermined,
};
const char* integrability_name(IntegrabilityStatus s);

struct IntegrabilityVerdict {
  IntegrabilityStatus status = IntegrabilityStatus::Undetermined;
  std::string witness;     // dependency description or growth trace
  std::vector<int> ranks;  // Jacobian rank of {delta^j x_i : j <= k} per k
  OrderProfile profile;
};

// Functional-dependence test: the ranks of the Jacobians of the iterated
// images must stop growing for an integrable field. Two consecutive equal
// ranks, re-certified through vanishing bordered minors (numerically at five
// random rational points, then symbolically), count as evidence; orders that
// grow strictly through the whole certified window rule integrability out,
// as does any positive-order field on a single-input system. K < 0 selects
// the default cap.
IntegrabilityVerdict integrability_verdict(const NormalSystem& ns,
                                           const VField& vf, int K = -1);

enum class TameVerdict { TameCompatible, NotTameInTheseCoordinates };
const char* tame_name(TameVerdict t);

struct TameReport {
  TameVerdict verdict = TameVerdict::TameCompatible;
  int dim = 0;        // rank of the order-zero block of the generated algebra
  int generators = 0; // commutators [delta, d/dx_i^(k)] actually formed
  std::string note;
};

// Necessary-side criterion for triangularity in some order-zero coordinate
// change: the Lie algebra generated by the commutators of the field with the
// higher-order coordinate directions must not act with full rank on the
// order-zero slice. Bracket generation is capped at bracket_cap rounds.
TameReport tame_test(const NormalSystem& ns, const VField& vf,
                     int bracket_cap = 3);

struct CommutingFamilyReport {
  std::vector<std::vector<bool>> commutes; // pairwise table, diagonal true
  bool all_commute = false;
  bool joint_flow_suggested = false;       // commuting family, test flows jointly
  std::vector<std::string> notes;          // one entry per non-commuting pair
};

// Pairwise bracket table for a family of verified symmetries. A fully
// commuting family certifies that rational linear combinations remain
// symmetries; non-commuting pairs get their bracket checked for
// integrability, since the bracket of integrable symmetries may fail to be
// integrable.
CommutingFamilyReport commuting_family(const NormalSystem& ns,
                                       const std::vector<VField>& fields);

// Degree of the triangular-symmetry ideal for a dependency partition with
// block sizes c_1..c_s and field order varpi: (m - c_s)(varpi + 1) + c_s.
int tame_growth_degree(const std::vector<int>& partition, int varpi);

// Lower bound (m - 1)(varpi - e + 1) + 1 for the degree of a symmetry ideal
// admitting a prime component through flat coordinates.
int growth_degree_lower_bound(int m, int varpi, int e);

} // namespace jetsym

#endif
