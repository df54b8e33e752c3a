#include "parasim/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parasim/rng.hpp"

namespace parasim::excursion {

double BirthDeathSpec::lambda(int k) const {
  const double x = static_cast<double>(k) / N;
  const double moran = (static_cast<double>(k) * (N - k) / N) *
                       (1.0 + s_N * (eta - x));
  return g_N * (moran + rp1);
}

double BirthDeathSpec::mu(int k) const {
  const double x = static_cast<double>(k) / N;
  const double moran = (static_cast<double>(k) * (N - k) / N) *
                       (1.0 - s_N * (eta - x));
  return g_N * (moran + rp2);
}

void BirthDeathSpec::validate() const {
  if (N < 2) throw std::invalid_argument("BirthDeathSpec: N must be >= 2");
  if (!(g_N > 0.0))
    throw std::invalid_argument("BirthDeathSpec: g_N must be > 0");
  if (!(s_N >= 0.0))
    throw std::invalid_argument("BirthDeathSpec: s_N must be >= 0");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("BirthDeathSpec: eta must be in (0,1)");
  if (rp1 < 0.0 || rp2 < 0.0)
    throw std::invalid_argument("BirthDeathSpec: rp1, rp2 must be >= 0");
  // Rates stay nonnegative iff 1 +- s_N*(eta - k/N) >= 0 over k = 0..N.
  if (s_N * std::max(eta, 1.0 - eta) > 1.0)
    throw std::invalid_argument("BirthDeathSpec: s_N too large, rates negative");
}

double gamblers_ruin(double p, long long n1, long long n2) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("gamblers_ruin: p must be in (0,1)");
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("gamblers_ruin: n1, n2 must be >= 1");
  const double q = 1.0 - p;
  if (p == 0.5)
    return static_cast<double>(n2) / static_cast<double>(n1 + n2);
  const double L = std::log(q) - std::log(p);  // ln(q/p)
  const double a = static_cast<double>(n1 + n2);
  const double m = static_cast<double>(n2);
  if (L <= 0.0) {
    // q <= p: both expm1 arguments are <= 0, no overflow possible.
    return std::expm1(m * L) / std::expm1(a * L);
  }
  // q > p: rewrite to avoid overflow of (q/p)^(n1+n2).
  return std::exp(-static_cast<double>(n1) * L) * std::expm1(-m * L) /
         std::expm1(-a * L);
}

namespace {

double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t m = n / 2;
  return pairwise_sum(a, m) + pairwise_sum(a + m, n - m);
}

// Hitting probability of `target` before 0 from `start` for a birth-death
// chain given by rate callables, 0 < start < target.  Also fills `h_out`
// (if non-null) with h(k) for k = 0..target.
template <class LamF, class MuF>
double hit_prob_core(int start, int target, LamF&& lam, MuF&& mu,
                     std::vector<double>* h_out) {
  std::vector<double> logw(static_cast<std::size_t>(target));
  logw[0] = 0.0;
  double l = 0.0;
  for (int k = 1; k < target; ++k) {
    const double lk = lam(k);
    const double mk = mu(k);
    if (!(lk > 0.0))
      throw std::runtime_error(
          "balance probability: zero birth rate at interior state");
    l += std::log(mk) - std::log(lk);  // -inf once the chain cannot descend
    logw[static_cast<std::size_t>(k)] = l;
  }
  const double lmax = *std::max_element(logw.begin(), logw.end());
  std::vector<double> terms(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i)
    terms[i] = std::exp(logw[i] - lmax);
  const double den = pairwise_sum(terms.data(), terms.size());
  const double num =
      pairwise_sum(terms.data(), static_cast<std::size_t>(start));
  if (h_out) {
    h_out->assign(static_cast<std::size_t>(target) + 1, 0.0);
    double acc = 0.0;
    for (int k = 1; k <= target; ++k) {
      acc += terms[static_cast<std::size_t>(k - 1)];
      (*h_out)[static_cast<std::size_t>(k)] = acc / den;
    }
    (*h_out)[static_cast<std::size_t>(target)] = 1.0;
  }
  return num / den;
}

}  // namespace

double balance_prob_exact(const BirthDeathSpec& spec, int start, int target,
                          int absorb) {
  spec.validate();
  if (absorb < start && start < target) {
    if (target > spec.N)
      throw std::invalid_argument("balance_prob_exact: target out of range");
    return hit_prob_core(
        start - absorb, target - absorb,
        [&](int k) { return spec.lambda(absorb + k); },
        [&](int k) { return spec.mu(absorb + k); }, nullptr);
  }
  if (target < start && start < absorb) {
    // Mirror: reflected index m = absorb - k swaps birth and death.
    if (absorb > spec.N)
      throw std::invalid_argument("balance_prob_exact: absorb out of range");
    return hit_prob_core(
        absorb - start, absorb - target,
        [&](int m) { return spec.mu(absorb - m); },
        [&](int m) { return spec.lambda(absorb - m); }, nullptr);
  }
  throw std::invalid_argument(
      "balance_prob_exact: start must lie strictly between absorb and target");
}

double balance_prob_asymptotic(double eta, double s_N, Side side) {
  if (!(s_N > 0.0 && s_N < 1.0))
    throw std::invalid_argument("balance_prob_asymptotic: s_N must be in (0,1)");
  return side == Side::FromZero ? 2.0 * eta * s_N : 2.0 * (1.0 - eta) * s_N;
}

namespace {

struct PathOutcome {
  bool hit_target = false;
  bool absorbed = false;   // stuck in a zero-rate state other than target
  double time = 0.0;
  int max_state = 0;
};

// Simulate the chain from `start` until it reaches `target`, gets stuck in a
// zero-rate state, or the time exceeds `t_max` (censoring; time left at the
// censoring point).
PathOutcome run_path(const BirthDeathSpec& spec, int start, int target,
                     double t_max, Rng& rng) {
  PathOutcome out;
  int k = start;
  out.max_state = k;
  double t = 0.0;
  while (true) {
    if (k == target) {
      out.hit_target = true;
      out.time = t;
      return out;
    }
    const double lk = spec.lambda(k);
    const double mk = spec.mu(k);
    const double tot = lk + mk;
    if (!(tot > 0.0)) {
      out.absorbed = true;
      out.time = t;
      return out;
    }
    t += rng.exponential(tot);
    if (t > t_max) {
      out.time = t_max;
      return out;  // censored
    }
    k += (rng.uniform() * tot < lk) ? 1 : -1;
    out.max_state = std::max(out.max_state, k);
  }
}

double interp_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

void fill_time_quantiles(HittingStats& st, std::vector<double>& times) {
  std::sort(times.begin(), times.end());
  st.q05 = interp_quantile(times, 0.05);
  st.q50 = interp_quantile(times, 0.50);
  st.q95 = interp_quantile(times, 0.95);
  st.q99 = interp_quantile(times, 0.99);
  if (st.time_bound > 0.0 && !times.empty()) {
    const auto below = std::lower_bound(times.begin(), times.end(),
                                        st.time_bound);
    st.fraction_below = static_cast<double>(below - times.begin()) /
                        static_cast<double>(times.size());
  }
}

}  // namespace

HittingStats time_to_balance_mc(const BirthDeathSpec& spec, int start,
                                int target, std::size_t n_reps,
                                std::uint64_t seed, double time_bound,
                                Conditioning method) {
  spec.validate();
  if (n_reps < 1)
    throw std::invalid_argument("time_to_balance_mc: n_reps must be >= 1");
  if (!(0 < start && start < target && target <= spec.N))
    throw std::invalid_argument("time_to_balance_mc: need 0 < start < target <= N");
  if (method == Conditioning::Auto)
    method = spec.N >= 10000 ? Conditioning::DoobTransform
                             : Conditioning::Rejection;

  HittingStats st;
  st.time_bound = time_bound;
  std::vector<double> times;
  times.reserve(n_reps);

  if (method == Conditioning::Rejection) {
    std::uint64_t attempts = 0;
    for (std::size_t i = 0; i < n_reps; ++i) {
      Rng rng = seed_stream(seed, i);
      while (true) {
        ++attempts;
        if (attempts > 2000000 &&
            static_cast<double>(times.size() + 1) <
                1e-6 * static_cast<double>(attempts))
          throw std::runtime_error(
              "time_to_balance_mc: rejection rate exceeds 1 - 1e-6");
        PathOutcome out = run_path(spec, start, target,
                                   std::numeric_limits<double>::infinity(),
                                   rng);
        if (out.hit_target) {
          times.push_back(out.time);
          break;
        }
      }
    }
    st.probability = static_cast<double>(n_reps) /
                     static_cast<double>(attempts);
    st.std_error = std::sqrt(st.probability * (1.0 - st.probability) /
                             static_cast<double>(attempts));
  } else {
    // Doob h-transform: exact hitting probability and direct sampling of the
    // conditioned chain.  h is harmonic away from {0, target}, so holding
    // rates are unchanged and only the jump direction is reweighted.
    std::vector<double> h;
    const double p_hit = hit_prob_core(
        start, target, [&](int k) { return spec.lambda(k); },
        [&](int k) { return spec.mu(k); }, &h);
    st.probability = p_hit;
    st.std_error = 0.0;
    for (std::size_t i = 0; i < n_reps; ++i) {
      Rng rng = seed_stream(seed, i);
      int k = start;
      double t = 0.0;
      while (k != target) {
        const double lk = spec.lambda(k);
        const double mk = spec.mu(k);
        const double tot = lk + mk;
        t += rng.exponential(tot);
        const double up = lk * h[static_cast<std::size_t>(k) + 1] /
                          (tot * h[static_cast<std::size_t>(k)]);
        k += (rng.uniform() < up) ? 1 : -1;
      }
      times.push_back(t);
    }
  }
  st.n_samples = times.size();
  fill_time_quantiles(st, times);
  return st;
}

HittingStats excursion_length_mc(const BirthDeathSpec& spec,
                                 std::size_t n_reps, std::uint64_t seed,
                                 double time_bound) {
  spec.validate();
  if (n_reps < 1)
    throw std::invalid_argument("excursion_length_mc: n_reps must be >= 1");
  const int target = static_cast<int>(std::ceil(spec.eta * spec.N));
  HittingStats st;
  st.time_bound = time_bound;
  std::vector<double> times;
  std::vector<double> heights;
  times.reserve(n_reps);
  heights.reserve(n_reps);
  std::uint64_t attempts = 0;
  for (std::size_t i = 0; i < n_reps; ++i) {
    Rng rng = seed_stream(seed, i);
    while (true) {
      ++attempts;
      if (attempts > 2000000 &&
          static_cast<double>(times.size() + 1) <
              1e-6 * static_cast<double>(attempts))
        throw std::runtime_error(
            "excursion_length_mc: rejection rate exceeds 1 - 1e-6");
      // Absorption at 0 == hitting "target 0" of the mirrored run; simulate
      // directly and classify by endpoint.
      int k = 1;
      double t = 0.0;
      int max_k = 1;
      bool effective = false;
      while (true) {
        if (k == 0) break;
        if (k >= target) {
          effective = true;
          break;
        }
        const double lk = spec.lambda(k);
        const double mk = spec.mu(k);
        const double tot = lk + mk;
        if (!(tot > 0.0)) {
          effective = true;  // stuck without reaching 0: not a tau_0 sample
          break;
        }
        t += rng.exponential(tot);
        k += (rng.uniform() * tot < lk) ? 1 : -1;
        max_k = std::max(max_k, k);
      }
      if (!effective) {
        times.push_back(t);
        heights.push_back(static_cast<double>(max_k) / spec.N);
        break;
      }
    }
  }
  st.probability =
      static_cast<double>(n_reps) / static_cast<double>(attempts);
  st.std_error = std::sqrt(st.probability * (1.0 - st.probability) /
                           static_cast<double>(attempts));
  st.n_samples = times.size();
  fill_time_quantiles(st, times);
  std::sort(heights.begin(), heights.end());
  st.height_q50 = interp_quantile(heights, 0.50);
  st.height_q95 = interp_quantile(heights, 0.95);
  st.height_q99 = interp_quantile(heights, 0.99);
  return st;
}

HittingStats eta_escape_mc(const BirthDeathSpec& spec, int start, double u_lo,
                           double u_hi, double horizon, std::size_t n_reps,
                           std::uint64_t seed) {
  spec.validate();
  if (n_reps < 1)
    throw std::invalid_argument("eta_escape_mc: n_reps must be >= 1");
  if (!(u_lo < u_hi))
    throw std::invalid_argument("eta_escape_mc: need u_lo < u_hi");
  HittingStats st;
  std::vector<double> times;
  std::size_t escapes = 0;
  const double dN = static_cast<double>(spec.N);
  auto outside = [&](int k) {
    const double x = static_cast<double>(k) / dN;
    return x <= u_lo || x >= u_hi;
  };
  for (std::size_t i = 0; i < n_reps; ++i) {
    Rng rng = seed_stream(seed, i);
    int k = start;
    double t = 0.0;
    if (outside(k))
      throw std::invalid_argument("eta_escape_mc: start not inside (u_lo, u_hi)");
    while (true) {
      const double lk = spec.lambda(k);
      const double mk = spec.mu(k);
      const double tot = lk + mk;
      if (!(tot > 0.0)) break;  // stuck inside the window
      const double dt = rng.exponential(tot);
      if (t + dt > horizon) break;  // censored at the horizon
      t += dt;
      k += (rng.uniform() * tot < lk) ? 1 : -1;
      if (outside(k)) {
        ++escapes;
        times.push_back(t);
        break;
      }
    }
  }
  st.probability =
      static_cast<double>(escapes) / static_cast<double>(n_reps);
  st.std_error = std::sqrt(st.probability * (1.0 - st.probability) /
                           static_cast<double>(n_reps));
  st.n_samples = escapes;
  fill_time_quantiles(st, times);
  return st;
}

ExitMoments rw_exit_moments(double h, int N) {
  if (N < 1) throw std::invalid_argument("rw_exit_moments: N must be >= 1");
  if (!(h * N >= 1.0))
    throw std::invalid_argument("rw_exit_moments: requires h >= 1/N");
  ExitMoments m;
  m.mean = h * h;
  // Factored so the degenerate half-width h = 1/N yields variance 0 exactly
  // (h*h*h*h - h*h/(N*N) rounds to a nonzero residual).
  const double inv_n = 1.0 / static_cast<double>(N);
  m.variance = (2.0 / 3.0) * h * h * (h - inv_n) * (h + inv_n);
  m.second_moment = m.variance + m.mean * m.mean;
  return m;
}

}  // namespace parasim::excursion
