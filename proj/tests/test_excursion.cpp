#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "parasim/excursion.hpp"
#include "parasim/rng.hpp"

using namespace parasim;
using namespace parasim::excursion;

namespace {

// Independent oracle: tridiagonal linear solve (Thomas algorithm, long
// double) for the probability of hitting `up` before `down` from 0 in a
// +-1 walk with up-probability p.
double ruin_oracle(double p, int n1, int n2) {
  const int n = n1 + n2 + 1;  // states -n2 .. n1
  std::vector<long double> a(n, 0.0L), b(n, 0.0L), c(n, 0.0L), d(n, 0.0L);
  b[0] = 1.0L;  // h(-n2) = 0
  d[0] = 0.0L;
  b[n - 1] = 1.0L;  // h(n1) = 1
  d[n - 1] = 1.0L;
  for (int i = 1; i < n - 1; ++i) {
    a[i] = -(1.0L - static_cast<long double>(p));
    b[i] = 1.0L;
    c[i] = -static_cast<long double>(p);
    d[i] = 0.0L;
  }
  for (int i = 1; i < n; ++i) {
    const long double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<long double> h(n);
  h[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) h[i] = (d[i] - c[i] * h[i + 1]) / b[i];
  return static_cast<double>(h[n2]);  // start state 0 sits at index n2
}

// Same oracle for a birth-death chain with general rates between two
// absorbing states lo < hi; returns P(hit hi before lo | start).
double bd_oracle(const BirthDeathSpec& spec, int start, int lo, int hi) {
  const int n = hi - lo + 1;
  std::vector<long double> a(n, 0.0L), b(n, 0.0L), c(n, 0.0L), d(n, 0.0L);
  b[0] = 1.0L;
  d[0] = 0.0L;
  b[n - 1] = 1.0L;
  d[n - 1] = 1.0L;
  for (int i = 1; i < n - 1; ++i) {
    const int k = lo + i;
    const long double lk = spec.lambda(k);
    const long double mk = spec.mu(k);
    a[i] = -mk;
    b[i] = lk + mk;
    c[i] = -lk;
  }
  for (int i = 1; i < n; ++i) {
    const long double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<long double> h(n);
  h[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) h[i] = (d[i] - c[i] * h[i + 1]) / b[i];
  return static_cast<double>(h[start - lo]);
}

}  // namespace

TEST_CASE("gamblers ruin frozen value and symmetric case") {
  CHECK(gamblers_ruin(0.6, 2, 1) == doctest::Approx(9.0 / 19.0).epsilon(1e-15));
  CHECK(gamblers_ruin(0.5, 3, 7) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(gamblers_ruin(0.5, 7, 3) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("gamblers ruin matches the linear-solve oracle") {
  for (double p : {0.3, 0.5, 0.7})
    for (int n1 = 1; n1 <= 10; ++n1)
      for (int n2 = 1; n2 <= 10; ++n2)
        CHECK(gamblers_ruin(p, n1, n2) ==
              doctest::Approx(ruin_oracle(p, n1, n2)).epsilon(1e-12));
}

TEST_CASE("gamblers ruin complement identity") {
  // Not reaching +n1 before -n2 under p is reaching +n2 before -n1 for the
  // reflected walk with up-probability 1-p.
  for (double p : {0.2, 0.45, 0.5, 0.55, 0.9})
    for (int n1 : {1, 4, 9})
      for (int n2 : {2, 5})
        CHECK(gamblers_ruin(p, n1, n2) + gamblers_ruin(1.0 - p, n2, n1) ==
              doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gamblers ruin is continuous at p = 1/2 and overflow-safe") {
  const double mid = gamblers_ruin(0.5, 6, 4);
  CHECK(std::abs(gamblers_ruin(0.5 + 1e-9, 6, 4) - mid) < 1e-6);
  CHECK(std::abs(gamblers_ruin(0.5 - 1e-9, 6, 4) - mid) < 1e-6);
  // Deep-deficit regime: (q/p)^(n1+n2) would overflow a double.
  const double tiny = gamblers_ruin(0.4, 5000, 5000);
  CHECK(std::isfinite(tiny));
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-300);
  const double huge = gamblers_ruin(0.6, 5000, 5000);
  CHECK(huge <= 1.0);
  CHECK(huge == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gamblers_ruin(0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gamblers_ruin(0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("balance probability: single-step frozen value") {
  BirthDeathSpec spec;
  spec.N = 4;
  spec.g_N = 1.0;
  spec.s_N = 0.5;
  spec.eta = 0.5;
  // From 1, target 2, absorb 0: lambda_1/(lambda_1+mu_1) = 0.5625.
  CHECK(balance_prob_exact(spec, 1, 2, 0) ==
        doctest::Approx(0.5625).epsilon(1e-15));
}

TEST_CASE("neutral balance probability is start/target") {
  BirthDeathSpec spec;
  spec.N = 200;
  spec.g_N = 3.0;
  spec.s_N = 0.0;
  for (int start : {1, 7, 50})
    CHECK(balance_prob_exact(spec, start, 100, 0) ==
          doctest::Approx(start / 100.0).epsilon(1e-12));
}

TEST_CASE("balance probability matches the linear-solve oracle") {
  BirthDeathSpec spec;
  spec.N = 50;
  spec.g_N = 2.0;
  spec.s_N = 0.2;
  spec.eta = 0.55;
  spec.rp1 = 0.4;
  spec.rp2 = 0.1;
  for (int start : {1, 5, 20})
    CHECK(balance_prob_exact(spec, start, 28, 0) ==
          doctest::Approx(bd_oracle(spec, start, 0, 28)).epsilon(1e-12));
  // Mirrored orientation: descend from N-1 to the target before hitting N.
  for (int start : {49, 45, 30})
    CHECK(balance_prob_exact(spec, start, 28, 50) ==
          doctest::Approx(1.0 - bd_oracle(spec, start, 28, 50))
              .epsilon(1e-12));
}

TEST_CASE("balance probability argument validation") {
  BirthDeathSpec spec;
  spec.N = 50;
  CHECK_THROWS_AS(balance_prob_exact(spec, 5, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(balance_prob_exact(spec, 0, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(balance_prob_exact(spec, 5, 60, 0), std::invalid_argument);
}

TEST_CASE("asymptotic balance probability frozen values") {
  CHECK(balance_prob_asymptotic(0.6, 0.01, Side::FromZero) ==
        doctest::Approx(0.012).epsilon(1e-15));
  CHECK(balance_prob_asymptotic(0.6, 0.01, Side::FromOne) ==
        doctest::Approx(0.008).epsilon(1e-15));
  CHECK_THROWS_AS(balance_prob_asymptotic(0.5, 0.0, Side::FromZero),
                  std::invalid_argument);
}

TEST_CASE("exact over asymptotic ratio approaches one") {
  const double b = 0.55, eta = 0.5;
  double prev_err = 1e9;
  for (int N : {500, 2000, 8000}) {
    BirthDeathSpec spec;
    spec.N = N;
    spec.g_N = 1.0;
    spec.s_N = std::pow(static_cast<double>(N), -b);
    spec.eta = eta;
    const int target = static_cast<int>(std::ceil(eta * N));
    const double exact = balance_prob_exact(spec, 1, target, 0);
    const double asym = balance_prob_asymptotic(eta, spec.s_N, Side::FromZero);
    const double err = std::abs(exact / asym - 1.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.1);
}

TEST_CASE("balance probability is monotone in the selection strength") {
  BirthDeathSpec spec;
  spec.N = 100;
  spec.g_N = 1.0;
  spec.eta = 0.5;
  double prev = 0.0;
  for (double s : {0.0, 0.05, 0.1, 0.2}) {
    spec.s_N = s;
    const double v = balance_prob_exact(spec, 1, 50, 0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("conditioned hitting times: Doob transform agrees with rejection") {
  BirthDeathSpec spec;
  spec.N = 60;
  spec.g_N = 1.0;
  spec.s_N = std::pow(60.0, -0.5);
  spec.eta = 0.5;
  const int target = 30;
  const HittingStats rej =
      time_to_balance_mc(spec, 1, target, 4000, 7, 0.0,
                         Conditioning::Rejection);
  const HittingStats doob =
      time_to_balance_mc(spec, 1, target, 4000, 8, 0.0,
                         Conditioning::DoobTransform);
  // Doob computes the probability exactly; rejection estimates it.
  const double exact = balance_prob_exact(spec, 1, target, 0);
  CHECK(doob.probability == doctest::Approx(exact).epsilon(1e-12));
  CHECK(doob.std_error == 0.0);
  CHECK(std::abs(rej.probability - exact) < 4.0 * rej.std_error + 1e-12);
  // Same law: quantiles agree within Monte Carlo slack.
  CHECK(doob.q50 == doctest::Approx(rej.q50).epsilon(0.15));
  CHECK(doob.q95 == doctest::Approx(rej.q95).epsilon(0.25));
  CHECK(doob.n_samples == 4000);
  CHECK(rej.n_samples == 4000);
}

TEST_CASE("auto conditioning picks the Doob transform for large N") {
  BirthDeathSpec spec;
  spec.N = 20000;
  spec.g_N = 1.0;
  spec.s_N = std::pow(20000.0, -0.5);
  spec.eta = 0.5;
  // Rejection would need ~ 1/h(1) ~ target attempts per accepted sample;
  // Auto must switch to the transform and return quickly.
  const HittingStats st = time_to_balance_mc(spec, 1, 10000, 50, 3, 0.0,
                                             Conditioning::Auto);
  CHECK(st.std_error == 0.0);  // Doob signature
  CHECK(st.n_samples == 50);
  CHECK(st.q50 > 0.0);
}

TEST_CASE("doubling g_N exactly halves conditioned hitting times") {
  BirthDeathSpec spec;
  spec.N = 40;
  spec.g_N = 1.0;
  spec.s_N = 0.1;
  spec.eta = 0.5;
  const HittingStats slow = time_to_balance_mc(spec, 1, 20, 500, 11, 0.0,
                                               Conditioning::DoobTransform);
  spec.g_N = 2.0;
  const HittingStats fast = time_to_balance_mc(spec, 1, 20, 500, 11, 0.0,
                                               Conditioning::DoobTransform);
  // Same seed, same jump chain; holding times scale exactly by 1/2.
  CHECK(fast.q50 == doctest::Approx(0.5 * slow.q50).epsilon(1e-14));
  CHECK(fast.q95 == doctest::Approx(0.5 * slow.q95).epsilon(1e-14));
}

TEST_CASE("time bound bookkeeping") {
  BirthDeathSpec spec;
  spec.N = 40;
  spec.g_N = 1.0;
  spec.s_N = 0.1;
  spec.eta = 0.5;
  const HittingStats st = time_to_balance_mc(spec, 1, 20, 2000, 5, 1e9,
                                             Conditioning::DoobTransform);
  CHECK(st.time_bound == 1e9);
  CHECK(st.fraction_below == 1.0);
  const HittingStats none = time_to_balance_mc(spec, 1, 20, 2000, 5, 1e-12,
                                               Conditioning::DoobTransform);
  CHECK(none.fraction_below == 0.0);
}

TEST_CASE("excursion statistics in the neutral case") {
  BirthDeathSpec spec;
  spec.N = 40;
  spec.g_N = 1.0;
  spec.s_N = 0.0;
  spec.eta = 0.5;  // target ceil(eta N) = 20
  const HittingStats st = excursion_length_mc(spec, 3000, 21, 0.0);
  // A non-effective excursion returns to 0 before reaching the target: from
  // state 1 the martingale gives P(effective) = 1/20.
  CHECK(std::abs(st.probability - (1.0 - 1.0 / 20.0)) <
        4.0 * st.std_error + 1e-12);
  CHECK(st.n_samples == 3000);
  CHECK(st.height_q50 >= 1.0 / 40.0);
  CHECK(st.height_q99 < 20.0 / 40.0);
  CHECK(st.height_q50 <= st.height_q95);
  CHECK(st.height_q95 <= st.height_q99);
  CHECK(st.q05 <= st.q50);
  CHECK(st.q50 <= st.q95);
  CHECK(st.q95 <= st.q99);
}

TEST_CASE("eta-window escape probabilities at the horizon extremes") {
  BirthDeathSpec spec;
  spec.N = 50;
  spec.g_N = 1.0;
  spec.s_N = 0.1;
  spec.eta = 0.5;
  const HittingStats always =
      eta_escape_mc(spec, 25, 0.4, 0.6, 1e12, 500, 9);
  CHECK(always.probability == 1.0);
  const HittingStats never =
      eta_escape_mc(spec, 25, 0.4, 0.6, 1e-12, 500, 9);
  CHECK(never.probability == 0.0);
  CHECK_THROWS_AS(eta_escape_mc(spec, 5, 0.4, 0.6, 1.0, 10, 9),
                  std::invalid_argument);
}

TEST_CASE("random-walk exit moments: frozen values and domain") {
  const ExitMoments a = rw_exit_moments(0.1, 100);
  CHECK(a.mean == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(a.variance == doctest::Approx(6.6e-5).epsilon(1e-12));
  CHECK(a.second_moment ==
        doctest::Approx(a.variance + a.mean * a.mean).epsilon(1e-12));
  // h = 1/N: the exit takes exactly one step, variance collapses to zero.
  const ExitMoments b = rw_exit_moments(0.1, 10);
  CHECK(b.mean == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(b.variance == doctest::Approx(0.0));
  CHECK_THROWS_AS(rw_exit_moments(0.05, 10), std::invalid_argument);
  CHECK_THROWS_AS(rw_exit_moments(0.1, 0), std::invalid_argument);
}

TEST_CASE("random-walk exit moments match a Monte Carlo clock") {
  // T = S/N^2 where S is the number of +-1 steps a simple symmetric walk
  // needs to leave (-m, m), m = h N.
  const double h = 0.2;
  const int N = 10;
  const int m = 2;
  const ExitMoments ana = rw_exit_moments(h, N);
  Rng rng(31, 0);
  const int reps = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    int pos = 0;
    long steps = 0;
    while (pos > -m && pos < m) {
      pos += rng.bernoulli(0.5) ? 1 : -1;
      ++steps;
    }
    const double t = static_cast<double>(steps) / (N * N);
    sum += t;
    sumsq += t * t;
  }
  const double mc_mean = sum / reps;
  const double mc_var = sumsq / reps - mc_mean * mc_mean;
  CHECK(std::abs(mc_mean - ana.mean) <
        4.0 * std::sqrt(ana.variance / reps));
  CHECK(std::abs(mc_var - ana.variance) < 0.05 * ana.variance);
}
