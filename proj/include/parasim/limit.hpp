#pragma once

// Simulators for the large-N limit objects: the M-host ternary jump process
// (host states in {0, eta, 1}), its aggregated count process on the 1/M
// simplex grid (with an exact finite-M law via uniformization), the
// single-host time-inhomogeneous process V driven by a mean-field path, and
// the backward ancestral-tree sampler with its unbiased estimator of the
// mean-field solution.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parasim/model.hpp"
#include "parasim/rng.hpp"
#include "parasim/trajectory.hpp"

namespace parasim::limit {

enum class HostTernary : int { Zero = 0, Eta = 1, One = 2 };

inline double ternary_value(HostTernary s, double eta) {
  return s == HostTernary::Zero ? 0.0 : (s == HostTernary::Eta ? eta : 1.0);
}

// ---------------------------------------------------------------------------
// M-host ternary process.  Host i flips to 1 at rate (1/M) sum_j y_j and to
// 0 at rate (1/M) sum_j (1 - y_j) (host replacement; may be a no-op), moves
// 0 -> eta at rate (2 r eta / M) sum_j y_j and 1 -> eta at rate
// (2 r (1-eta) / M) sum_j (1 - y_j) (effective reinfection), where eta
// contributes the value eta to the sums.  Event kinds map onto the finite
// model's taxonomy: flips are ReplaceTo1/ReplaceTo0, moves into eta are
// ReinfectUp (from 0) and ReinfectDown (from 1).
Trajectory simulate_ym(int M, double eta, double r,
                       const std::vector<HostTernary>& init, double t_end,
                       double sample_dt, uint64_t seed,
                       std::vector<EventRecord>* event_log = nullptr);

// ---------------------------------------------------------------------------
// Aggregated counts (c0, ce, c1), c0 + ce + c1 = M, moving by the six jump
// rates of the count process (z = counts / M):
//   (+1,-1, 0)  M z_e (z_0 + (1-eta) z_e)         eta-host replaced by 0
//   (+1, 0,-1)  M (z_e (1-eta) z_1 + z_0 z_1)     1-host replaced by 0
//   (-1, 0,+1)  M (z_1 z_0 + z_e eta z_0)         0-host replaced by 1
//   (-1,+1, 0)  2 r M (eta z_1 + eta^2 z_e) z_0   0-host reinfected to eta
//   ( 0,+1,-1)  2 r M ((1-eta) z_0 + (1-eta)^2 z_e) z_1
//   ( 0,-1,+1)  M z_e (z_1 + eta z_e)             eta-host replaced by 1
struct ZmCounts {
  int c0 = 0;
  int ce = 0;
  int c1 = 0;
};

// Converts grid weights to counts; throws std::invalid_argument when any
// M*component is farther than 1e-9 from an integer.
ZmCounts zm_counts_from_weights(int M, const TernaryWeights& z);

Trajectory simulate_zm(int M, double eta, double r, const ZmCounts& init,
                       double t_end, double sample_dt, uint64_t seed,
                       std::vector<EventRecord>* event_log = nullptr);

// Exact marginal law of the count process at time t via uniformization,
// truncated when the accumulated Poisson weight exceeds 1 - tol.  Throws
// std::runtime_error if the uniformization horizon Lambda*t exceeds 600
// (numerically out of range for the plain Poisson recurrence).
class ZmLaw {
 public:
  ZmLaw(int M) : M_(M), p_(static_cast<size_t>(M + 1) * (M + 1), 0.0) {}
  int M() const { return M_; }
  double prob(int c0, int ce) const {
    return p_[static_cast<size_t>(c0) * (M_ + 1) + ce];
  }
  double& prob_ref(int c0, int ce) {
    return p_[static_cast<size_t>(c0) * (M_ + 1) + ce];
  }
  // Expected class weights (E c0, E ce, E c1) / M.
  TernaryWeights mean_weights() const;
  double total() const;  // should be 1 within the truncation tolerance

 private:
  int M_;
  std::vector<double> p_;  // dense over (c0, ce); states with c0+ce>M stay 0
};

ZmLaw zm_exact_law(int M, double eta, double r, const ZmCounts& init,
                   double t, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Single-host process V driven by a deterministic ternary-weight path
// (v0, veta, v1)(s): jumps to 0 at rate v0 + (1-eta) veta, to 1 at rate
// v1 + eta veta, from 0 to eta at rate 2 r eta (v1 + eta veta), from 1 to
// eta at rate 2 r (1-eta) (v0 + (1-eta) veta).  Simulated by thinning
// against the envelope 1 + 2r (the true total rate never exceeds it on the
// simplex).
struct VPath {
  std::vector<double> t;            // jump times, t[0] == 0
  std::vector<HostTernary> state;   // state on [t[i], t[i+1])
  double t_end = 0.0;
  HostTernary at(double time) const;
  // Occupation fractions of the three states on [0, t_end].
  TernaryWeights occupation() const;
};

VPath simulate_v(double eta, double r,
                 const std::function<TernaryWeights(double)>& v_path,
                 HostTernary init, double t_end, Rng& rng);

// ---------------------------------------------------------------------------
// Backward ancestral tree on [0, t]: a single distinguished line starts at
// the root; every line is hit at rate 1 + 2r, the hit being a host
// replacement (HR) with probability 1/(1+2r) and a potential effective
// reinfection (PER) otherwise.  A PER splits every line (host branch keeps
// the line id, incoming donor branch gets a new one).  An HR on a
// non-distinguished line discards the host's past and continues the same
// line down the donor branch; an HR on the distinguished line keeps both
// branches, but the state above it still depends only on the donor branch.
// Leaves draw i.i.d. states from v0; states propagate rootward with the
// coin-toss rules:
//   HR: donor 0 -> 0, donor 1 -> 1, donor eta -> 1 w.p. eta else 0;
//   PER on host 0, donor 1:   -> eta w.p. eta
//   PER on host 1, donor 0:   -> eta w.p. 1-eta
//   PER on host 0, donor eta: -> eta w.p. eta^2
//   PER on host 1, donor eta: -> eta w.p. (1-eta)^2
//   all other combinations leave the host state unchanged.

enum class TreeEventKind { HR, PER };

struct TreeEvent {
  double time = 0.0;   // in (0, t); leaves live at time 0, the root at t
  TreeEventKind kind = TreeEventKind::HR;
  int line = 0;        // host-side line
  int child = -1;      // donor-side line id; -1 when adopted in place
};

struct TreeSampleRecord {
  double t = 0.0;
  std::vector<TreeEvent> events;        // sorted by decreasing time
  std::vector<HostTernary> leaf_state;  // one leaf per line, by line id
  std::vector<uint8_t> coins;           // propagation coin outcomes, in order
  HostTernary root_state = HostTernary::Zero;
  int line_count = 0;
};

// Full tree sample with event record.  Throws std::runtime_error when the
// line count exceeds max_lines (memory guard; the estimate is never biased
// by silent truncation).
TreeSampleRecord sample_tree(double t, double eta, double r,
                             const TernaryWeights& v0, Rng& rng,
                             size_t max_lines = 1000000);

// Root state only; skips the distinguished line's dead continuation below HR
// events (it never influences the root state).
HostTernary sample_root_state(double t, double eta, double r,
                              const TernaryWeights& v0, Rng& rng);

// Expected number of leaves of the full tree at depth t: PER events branch
// every line (rate 2r) and HR events branch only the distinguished line
// (rate 1), giving (1 + 1/(2r)) e^{2rt} - 1/(2r), with the r -> 0 limit
// 1 + t.
double expected_line_count(double t, double r);

struct TreeEstimate {
  TernaryWeights estimate;
  double se0 = 0.0;
  double se_eta = 0.0;
  double se1 = 0.0;
  size_t n_samples = 0;
};

// Monte Carlo estimate of the mean-field solution at time t from n_samples
// independent root states (per-sample RNG streams derived from seed, so the
// result is independent of any replicate scheduling).
TreeEstimate estimate_v_tree(double t, double eta, double r,
                             const TernaryWeights& v0, size_t n_samples,
                             uint64_t seed);

// One JSON object per tree: {"t":..., "root":"...", "lines":n, "events":[...]}.
std::string tree_jsonl(const TreeSampleRecord& rec);

}  // namespace parasim::limit
