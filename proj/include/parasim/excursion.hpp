#pragma once

// Exact and asymptotic single-host quantities for the within-host birth-death
// chain: ruin probabilities, probability of reaching the balanced window,
// conditional hitting-time statistics, non-effective excursion lengths,
// escape fractions from the confinement window, and random-walk exit moments.

#include <cstddef>
#include <cstdint>

namespace parasim::excursion {

// Within-host birth-death chain on k in {0, ..., N}.  Rates
//   lambda_k = g_N * [ (k(N-k)/N) * (1 + s_N*(eta - k/N)) + rp1 ]
//   mu_k     = g_N * [ (k(N-k)/N) * (1 - s_N*(eta - k/N)) + rp2 ]
// with reinfection floors rp1, rp2 in [0, r_N/g_N].  With rp1 = rp2 = 0 the
// boundary states 0 and N are absorbing.
struct BirthDeathSpec {
  int N = 100;
  double g_N = 1.0;
  double s_N = 0.0;
  double eta = 0.5;
  double rp1 = 0.0;
  double rp2 = 0.0;

  double lambda(int k) const;
  double mu(int k) const;
  void validate() const;  // throws std::invalid_argument on bad fields
};

enum class Side { FromZero, FromOne };

// Conditioning strategy for time_to_balance_mc.  Auto picks the Doob
// h-transform for N >= 10^4 (where plain rejection becomes wasteful) and
// rejection sampling otherwise.
enum class Conditioning { Auto, Rejection, DoobTransform };

// Monte Carlo (or exact) hitting statistics.  Time quantiles are conditional
// on the hitting event; height quantiles are filled by excursion_length_mc
// only (conditional maximum frequency reached before extinction).
struct HittingStats {
  double probability = 0.0;      // hitting probability (exact for Doob path)
  double std_error = 0.0;        // binomial SE of the estimate; 0 if exact
  double q05 = 0.0;              // conditional time quantiles
  double q50 = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
  std::size_t n_samples = 0;     // number of conditioned samples collected
  double time_bound = 0.0;       // reference bound used for fraction_below
  double fraction_below = 0.0;   // fraction of conditioned times < time_bound
  double height_q50 = 0.0;       // conditional max-height quantiles (freq)
  double height_q95 = 0.0;
  double height_q99 = 0.0;
};

// Probability that a +-1 walk with up-probability p, started at 0, hits +n1
// before -n2: ((q/p)^n2 - 1)/((q/p)^(n1+n2) - 1), with the continuity value
// n2/(n1+n2) at p = 1/2.  Stable for extreme p and large n1, n2.
double gamblers_ruin(double p, long long n1, long long n2);

// Exact probability that the chain started at `start` hits `target` before
// `absorb`, via the log-space product formula over chain weights.  Either
// absorb < start < target or target < start < absorb (mirrored).
double balance_prob_exact(const BirthDeathSpec& spec, int start, int target,
                          int absorb);

// Leading-order probability that a single invading parasite drives its host
// to the balanced window: 2*eta*s_N from the all-B boundary (one A parasite),
// 2*(1-eta)*s_N from the all-A boundary.
double balance_prob_asymptotic(double eta, double s_N, Side side);

// Conditional time to reach state `target` (entry point of the balanced
// window D) before absorption at 0, starting from `start`.  Collects n_reps
// conditioned samples; reports quantiles and the fraction below time_bound.
// Rejection sampling retries within per-sample streams; the Doob path
// simulates the h-transformed chain directly (holding rates are unchanged
// because h is harmonic) and reports the exact hitting probability.
// Throws std::runtime_error if the empirical rejection rate exceeds
// 1 - 1e-6.
HittingStats time_to_balance_mc(const BirthDeathSpec& spec, int start,
                                int target, std::size_t n_reps,
                                std::uint64_t seed, double time_bound,
                                Conditioning method = Conditioning::Auto);

// Length of non-effective excursions: start at k = 1, condition on
// absorption at 0 before reaching ceil(eta*N).  Reports conditional tau_0
// quantiles, the fraction below time_bound, and conditional maximum-height
// quantiles.  `probability` is the MC estimate of the non-effective
// fraction.
HittingStats excursion_length_mc(const BirthDeathSpec& spec,
                                 std::size_t n_reps, std::uint64_t seed,
                                 double time_bound);

// Fraction of paths started at `start` (inside the balanced window) that
// leave the open confinement window (u_lo, u_hi) of frequencies before the
// horizon (host time).  `probability` is the escape fraction; time quantiles
// are conditional on escape.
HittingStats eta_escape_mc(const BirthDeathSpec& spec, int start, double u_lo,
                           double u_hi, double horizon, std::size_t n_reps,
                           std::uint64_t seed);

struct ExitMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

// Exit time of the symmetric +-1/N walk (time step 1/N^2 per jump) from the
// centered interval (-h, h): mean h^2, second moment 5h^4/3 - 2h^2/(3N^2),
// variance (2/3)(h^4 - h^2/N^2).  Requires h >= 1/N (h = 1/N is the
// degenerate single-step exit with zero variance).
ExitMoments rw_exit_moments(double h, int N);

}  // namespace parasim::excursion
