// Mean-field dynamics of the ternary weights (v0, veta, v1):
//
//   dv0/dt   = (1-eta) veta - 2 r eta v0 (v1 + eta veta)
//   dveta/dt = -veta + 2r (eta^2 v0 veta + (1-eta)^2 v1 veta + v0 v1)
//   dv1/dt   = eta veta - 2 r (1-eta) v1 (v0 + (1-eta) veta)
//
// plus the closed-form interior equilibrium, existence/coupling thresholds,
// the Jacobian of the system projected onto (v0, v1) (veta = 1 - v0 - v1),
// and eigenvalue-based classification of all equilibria.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parasim/model.hpp"

namespace parasim::ode {

TernaryWeights rhs(const TernaryWeights& v, double eta, double r);

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double init_step = 0.0;    // <= 0: chosen automatically
  long max_steps = 4000000;  // accepted + rejected
};

// Dense solution on [t0, t_end]: accepted Runge-Kutta nodes with derivative
// values, queryable anywhere in between by cubic Hermite interpolation.
class Path {
 public:
  TernaryWeights at(double t) const;
  double t0() const { return knot_t_.front(); }
  double t_end() const { return knot_t_.back(); }
  size_t steps() const { return knot_t_.size() - 1; }

  // Conservation diagnostics, recorded per accepted step *before* the
  // simplex-sum renormalization is applied.
  double max_sum_drift() const { return max_sum_drift_; }
  double min_component() const { return min_component_; }

 private:
  friend Path integrate(const TernaryWeights&, double, double, double,
                        const IntegrateOptions&);
  std::vector<double> knot_t_;
  std::vector<TernaryWeights> knot_v_;
  std::vector<TernaryWeights> knot_f_;
  double max_sum_drift_ = 0.0;
  double min_component_ = 0.0;
};

// Adaptive Dormand-Prince 5(4) from t=0 to t_end (t_end >= 0).  After each
// accepted step the state is renormalized onto the simplex whenever
// |v0+veta+v1 - 1| > 1e-12.  Throws std::runtime_error on step underflow or
// step-count exhaustion.
Path integrate(const TernaryWeights& v0, double t_end, double eta, double r,
               const IntegrateOptions& opts = {});

// Interior equilibrium closed form; nullopt when any component leaves the
// open simplex (equivalently r <= existence threshold at this eta).
std::optional<TernaryWeights> interior_equilibrium(double eta, double r);

// Smallest r for which the interior equilibrium exists:
// max{(2 eta - 1)/(2 eta (1-eta)^2), (1 - 2 eta)/(2 (1-eta) eta^2)} (0 at
// eta = 1/2).
double existence_threshold(double eta);

// Reinfection threshold sufficient for the host-level coupling argument:
// max{eta/(2 (1-eta)^2), (1-eta)/(2 eta^2)}; never below the existence
// threshold.
double coupling_threshold(double eta);

// Jacobian of the projected system d(v0, v1)/dt at (v0, v1); row-major.
struct Jacobian2 {
  double j00, j01, j10, j11;
};
Jacobian2 jacobian_projected(double v0, double v1, double eta, double r);

struct EquilibriumInfo {
  TernaryWeights v;
  std::complex<double> lambda1, lambda2;  // eigenvalues of the projected Jacobian
  std::string classification;             // stable | unstable | saddle | non-classified
};

struct EquilibriumReport {
  double eta = 0.0;
  double r = 0.0;
  double r_star = 0.0;            // existence threshold
  EquilibriumInfo all_b;          // (1, 0, 0)
  EquilibriumInfo all_a;          // (0, 0, 1)
  std::optional<EquilibriumInfo> interior;
};

// Eigenvalues and stability classes of the boundary equilibria and (when
// present) the interior one.  Eigenvalue real parts within 1e-9 of zero give
// "non-classified".
EquilibriumReport classify_equilibria(double eta, double r);

}  // namespace parasim::ode
