// Core model parameters, derived scales, classification windows and the
// assumption report shared by every other module.
//
// The model: M hosts, each carrying N parasites of two types (A and B).
// x_i = k_i/N is the type-A frequency in host i.  Within-host dynamics are a
// Moran process at speed g_N with weak balancing selection of strength
// s_N = N^-b toward the preferred frequency eta; hosts are reinfected at rate
// r_N = r*N^b (donor sampled uniformly over hosts, including the recipient)
// and die/are replaced at rate 1 (the colonizing parasite is drawn from a
// uniformly sampled donor).  Optional mutation flips single parasites at
// per-event rate u_N * g_N * N per host side.

#pragma once

#include <string>
#include <vector>

namespace parasim {

// A point in (or near) the 3-simplex: masses on the pure-B state, the eta
// window and the pure-A state.
struct TernaryWeights {
  double z0 = 0.0;
  double zeta = 0.0;
  double z1 = 0.0;
};

// Host classification of x = k/N.
enum class HostClass { Zero, EtaWindow, One, Transient };

// Per-sample class masses including the transient remainder; sums to 1.
struct ClassMasses {
  double z0 = 0.0;
  double zeta = 0.0;
  double z1 = 0.0;
  double ztrans = 0.0;
};

struct ClassificationWindows {
  // U = (u_lo, u_hi), open: the eta window used for classification.
  double u_lo = 0.0;
  double u_hi = 1.0;
  // D = [d_lo, d_hi], closed: the inner target window, strictly inside U.
  double d_lo = 0.0;
  double d_hi = 1.0;
};

struct ModelParams {
  int N = 100;        // parasites per host
  int M = 10;         // hosts
  double eta = 0.5;   // preferred type-A frequency, 0 < eta < 1
  double b = 0.5;     // selection exponent, s_N = N^-b, 0 < b < 1
  double r = 1.0;     // reinfection constant, r_N = r * N^b, r >= 0
  double g_N = 0.0;   // within-host speed; <= 0 selects default_g_N(...)
  double a = 0.3;     // window exponent: U half-width s_N^a
  double eps = 0.1;   // assumption margin exponent
  double eps1 = 0.05; // inner-window exponent: D half-width s_N^(a+eps1)
  double u_N = 0.0;   // mutation probability scale, >= 0
};

// Derived quantities; all deterministic functions of ModelParams.
struct Scales {
  double s_N = 0.0;     // N^-b
  double r_N = 0.0;     // r * N^b  (so r_N * s_N == r)
  double g_N = 0.0;     // effective within-host speed (default applied)
  double theta_N = 0.0; // u_N * N * M * g_N, total mutation rate
  ClassificationWindows windows;
};

// Default within-host speed satisfying the finite-N growth-condition proxy
// with margin: N^(b*max(3, 2+a) + 2*eps).
double default_g_N(int N, double b, double a, double eps);

// Validates parameters (throws std::invalid_argument) and derives scales and
// windows.  Windows are clipped into [0,1] keeping the strict nesting
// 0 <= u_lo < d_lo <= eta <= d_hi < u_hi <= 1.
Scales derive_scales(const ModelParams& p);

// One line of the assumption report.  margin > 0 iff satisfied; for the
// growth conditions the margin is the log-ratio of g_N to the bound, for the
// window-exponent check it is linear.
struct AssumptionEntry {
  std::string name;
  bool satisfied = false;
  double margin = 0.0;
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool all_satisfied() const;
};

// Checks the scaling-assumption proxies at finite N.  Diagnostic only: a
// violated entry never blocks simulation.
//   A1   : s_N = N^-b                  (holds by construction)
//   A2   : r_N * s_N = r               (holds by construction)
//   A3i  : g_N > N^(3b+eps)
//   A3ii : g_N < exp(N^(1-b(1+eps)))
//   A3pi : g_N > N^(b*max(3,2+a)+eps)
//   A3pii: g_N < exp(N^(1-b(2a+1+eps)))
//   window_exponent: a < (1-b)/(2b)
AssumptionReport validate_assumptions(const ModelParams& p);

// Classifies a within-host frequency against the windows.  Exact boundary
// states first: x == 0 -> Zero, x == 1 -> One; then the open window U;
// anything else is Transient.
HostClass classify_state(double x, const ClassificationWindows& w);

// Pools per-host classifications of k_i/N into class masses (sum 1).
ClassMasses classify_hosts(const std::vector<int>& k, int N,
                           const ClassificationWindows& w);

}  // namespace parasim
