#include "parasim/ssa.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace parasim::ssa {

HostRates host_rates(const std::vector<int>& k, int i, const ModelParams& p,
                     const Scales& sc) {
  if (i < 0 || i >= static_cast<int>(k.size()))
    throw std::invalid_argument("host_rates: host index out of range");
  long long K = 0;
  for (int kj : k) K += kj;
  const double N = static_cast<double>(p.N);
  const double xbar = static_cast<double>(K) / (N * static_cast<double>(p.M));
  const double xi = static_cast<double>(k[static_cast<size_t>(i)]) / N;
  const double moran_core = N * xi * (1.0 - xi);
  HostRates hr;
  hr.up = sc.g_N * (1.0 + sc.s_N * (p.eta - xi)) * moran_core +
          sc.r_N * xbar * (1.0 - xi);
  hr.down = sc.g_N * (1.0 + sc.s_N * (xi - p.eta)) * moran_core +
            sc.r_N * (1.0 - xbar) * xi;
  hr.rep1 = xbar;
  hr.rep0 = 1.0 - xbar;
  hr.mutAB = p.u_N * sc.g_N * N * xi;
  hr.mutBA = p.u_N * sc.g_N * N * (1.0 - xi);
  return hr;
}

Engine::Engine(const ModelParams& p, const std::vector<int>& init,
               uint64_t seed, EngineOptions opts)
    : p_(p), sc_(derive_scales(p)), opts_(opts), rng_(seed, 0) {
  if (static_cast<int>(init.size()) != p.M)
    throw std::invalid_argument("Engine: init size must equal M");
  if (sc_.s_N * std::max(p.eta, 1.0 - p.eta) > 1.0)
    throw std::invalid_argument("Engine: s_N too large, negative Moran rates");
  k_ = init;
  w_.assign(static_cast<size_t>(p.M), 0);
  fenwick_.assign(static_cast<size_t>(p.M) + 1, 0);
  for (int i = 0; i < p.M; ++i) {
    const int ki = k_[static_cast<size_t>(i)];
    if (ki < 0 || ki > p.N)
      throw std::invalid_argument("Engine: init count out of [0, N]");
    K_ += ki;
    const long long wi =
        static_cast<long long>(ki) * static_cast<long long>(p.N - ki);
    w_[static_cast<size_t>(i)] = wi;
    W_ += wi;
  }
  // Build the Fenwick tree in O(M).
  for (int i = 1; i <= p.M; ++i) {
    fenwick_[static_cast<size_t>(i)] += w_[static_cast<size_t>(i - 1)];
    const int j = i + (i & -i);
    if (j <= p.M)
      fenwick_[static_cast<size_t>(j)] += fenwick_[static_cast<size_t>(i)];
  }
}

void Engine::apply_count_change(int host, int new_k) {
  const size_t h = static_cast<size_t>(host);
  const int old_k = k_[h];
  if (new_k == old_k) return;
  const long long new_w =
      static_cast<long long>(new_k) * static_cast<long long>(p_.N - new_k);
  const long long dw = new_w - w_[h];
  k_[h] = new_k;
  K_ += new_k - old_k;
  W_ += dw;
  w_[h] = new_w;
  if (dw != 0) {
    for (int i = host + 1; i <= p_.M; i += i & -i)
      fenwick_[static_cast<size_t>(i)] += dw;
  }
}

int Engine::select_moran_host(uint64_t g) const {
  if (opts_.backend == Backend::DenseScan) {
    unsigned long long cum = 0;
    for (int i = 0; i < p_.M; ++i) {
      cum += static_cast<unsigned long long>(w_[static_cast<size_t>(i)]);
      if (cum > g) return i;
    }
    return p_.M - 1;  // unreachable for g < W_
  }
  // Fenwick descent: smallest host index with prefix weight sum > g.
  int pos = 0;
  int mask = 1;
  while ((mask << 1) <= p_.M) mask <<= 1;
  unsigned long long rest = g;
  for (; mask > 0; mask >>= 1) {
    const int next = pos + mask;
    if (next <= p_.M &&
        static_cast<unsigned long long>(
            fenwick_[static_cast<size_t>(next)]) <= rest) {
      pos = next;
      rest -= static_cast<unsigned long long>(fenwick_[static_cast<size_t>(next)]);
    }
  }
  return pos;  // 0-based host index
}

int Engine::select_weighted_host(uint64_t g, bool weight_is_k) const {
  unsigned long long cum = 0;
  for (int i = 0; i < p_.M; ++i) {
    const long long ki = k_[static_cast<size_t>(i)];
    const long long wi = weight_is_k ? ki : (p_.N - ki);
    cum += static_cast<unsigned long long>(wi);
    if (cum > g) return i;
  }
  return p_.M - 1;
}

ClassMasses Engine::masses() const {
  return classify_hosts(k_, p_.N, sc_.windows);
}

bool Engine::frozen() const {
  if (p_.u_N > 0.0) return false;  // mutation can always re-mix
  const long long NM = static_cast<long long>(p_.N) * p_.M;
  const bool moran_active = W_ > 0;
  const bool reinf_active = !opts_.disable_reinfection && sc_.r_N > 0.0 &&
                            K_ > 0 && K_ < NM;
  // Replacement changes the state with positive probability iff both donor
  // types are represented in the population.
  const bool repl_can_change =
      !opts_.disable_replacement && K_ > 0 && K_ < NM;
  return !moran_active && !reinf_active && !repl_can_change;
}

bool Engine::check_cache_consistency() const {
  long long K = 0, W = 0;
  for (int i = 0; i < p_.M; ++i) {
    const long long ki = k_[static_cast<size_t>(i)];
    K += ki;
    const long long wi = ki * (p_.N - ki);
    if (wi != w_[static_cast<size_t>(i)]) return false;
    W += wi;
  }
  return K == K_ && W == W_;
}

StepResult Engine::step(double t_limit) {
  StepResult res;
  if (frozen()) {
    res.absorbed = true;
    return res;
  }
  if (++steps_since_check_ % 1000000 == 0)
    assert(check_cache_consistency());

  const double N = static_cast<double>(p_.N);
  const long long NM = static_cast<long long>(p_.N) * p_.M;
  const double dK = static_cast<double>(K_);
  const double dNMmK = static_cast<double>(NM - K_);

  // Category totals, in the fixed selection order.
  enum Cat { CMoran = 0, CReinfUp, CReinfDn, CRep1, CRep0, CMutAB, CMutBA };
  double rate[7] = {0, 0, 0, 0, 0, 0, 0};
  rate[CMoran] = 2.0 * sc_.g_N * static_cast<double>(W_) / N;
  if (!opts_.disable_reinfection && sc_.r_N > 0.0) {
    const double reinf =
        sc_.r_N * dK * dNMmK / (N * N * static_cast<double>(p_.M));
    rate[CReinfUp] = reinf;
    rate[CReinfDn] = reinf;
  }
  if (!opts_.disable_replacement) {
    rate[CRep1] = dK / N;
    rate[CRep0] = dNMmK / N;
  }
  if (p_.u_N > 0.0) {
    rate[CMutAB] = p_.u_N * sc_.g_N * dK;
    rate[CMutBA] = p_.u_N * sc_.g_N * dNMmK;
  }
  double total = 0.0;
  for (double v : rate) total += v;
  // frozen() returned false, so a state-changing category is active: total>0.

  const double dt = rng_.exponential(total);
  if (t_ + dt > t_limit) {
    // By memorylessness the residual holding time past t_limit is again
    // exponential with the same rate, so stopping here and redrawing on the
    // next call leaves the law of the process unchanged.
    res.dt = t_limit - t_;
    t_ = t_limit;
    res.limit_reached = true;
    return res;
  }
  res.dt = dt;
  t_ += dt;

  // Category by cumulative scan of the same doubles in both backends.
  const double target = rng_.uniform() * total;
  int cat = -1;
  double cum = 0.0;
  for (int c = 0; c < 7; ++c) {
    cum += rate[c];
    if (target < cum) {
      cat = c;
      break;
    }
  }
  if (cat < 0) {  // rounding residue: last category with positive rate
    for (int c = 6; c >= 0; --c)
      if (rate[c] > 0.0) {
        cat = c;
        break;
      }
  }

  EventRecord ev;
  ev.t = t_;
  switch (cat) {
    case CMoran: {
      const uint64_t g = static_cast<uint64_t>(
          std::min(rng_.uniform() * static_cast<double>(W_),
                   static_cast<double>(W_ - 1)));
      const int i = select_moran_host(g);
      const double xi = static_cast<double>(k_[static_cast<size_t>(i)]) / N;
      const double p_up = 0.5 * (1.0 + sc_.s_N * (p_.eta - xi));
      ev.host = i;
      if (rng_.uniform() < p_up) {
        ev.kind = EventKind::MoranUp;
        apply_count_change(i, k_[static_cast<size_t>(i)] + 1);
      } else {
        ev.kind = EventKind::MoranDown;
        apply_count_change(i, k_[static_cast<size_t>(i)] - 1);
      }
      break;
    }
    case CReinfUp: {
      // Host with k_i < N, weight N - k_i; donor carrying type A, weight k_j.
      const uint64_t gh = static_cast<uint64_t>(
          std::min(rng_.uniform() * dNMmK, dNMmK - 1.0));
      const int i = select_weighted_host(gh, /*weight_is_k=*/false);
      const uint64_t gd =
          static_cast<uint64_t>(std::min(rng_.uniform() * dK, dK - 1.0));
      const int j = select_weighted_host(gd, /*weight_is_k=*/true);
      ev.host = i;
      ev.src = j;
      ev.kind = EventKind::ReinfectUp;
      apply_count_change(i, k_[static_cast<size_t>(i)] + 1);
      break;
    }
    case CReinfDn: {
      const uint64_t gh =
          static_cast<uint64_t>(std::min(rng_.uniform() * dK, dK - 1.0));
      const int i = select_weighted_host(gh, /*weight_is_k=*/true);
      const uint64_t gd = static_cast<uint64_t>(
          std::min(rng_.uniform() * dNMmK, dNMmK - 1.0));
      const int j = select_weighted_host(gd, /*weight_is_k=*/false);
      ev.host = i;
      ev.src = j;
      ev.kind = EventKind::ReinfectDown;
      apply_count_change(i, k_[static_cast<size_t>(i)] - 1);
      break;
    }
    case CRep1: {
      const int i = static_cast<int>(rng_.below(static_cast<uint64_t>(p_.M)));
      const uint64_t gd =
          static_cast<uint64_t>(std::min(rng_.uniform() * dK, dK - 1.0));
      const int j = select_weighted_host(gd, /*weight_is_k=*/true);
      ev.host = i;
      ev.src = j;
      ev.kind = EventKind::ReplaceTo1;
      apply_count_change(i, p_.N);
      break;
    }
    case CRep0: {
      const int i = static_cast<int>(rng_.below(static_cast<uint64_t>(p_.M)));
      const uint64_t gd = static_cast<uint64_t>(
          std::min(rng_.uniform() * dNMmK, dNMmK - 1.0));
      const int j = select_weighted_host(gd, /*weight_is_k=*/false);
      ev.host = i;
      ev.src = j;
      ev.kind = EventKind::ReplaceTo0;
      apply_count_change(i, 0);
      break;
    }
    case CMutAB: {
      const uint64_t gh =
          static_cast<uint64_t>(std::min(rng_.uniform() * dK, dK - 1.0));
      const int i = select_weighted_host(gh, /*weight_is_k=*/true);
      ev.host = i;
      ev.kind = EventKind::MutateAtoB;
      apply_count_change(i, k_[static_cast<size_t>(i)] - 1);
      break;
    }
    case CMutBA: {
      const uint64_t gh = static_cast<uint64_t>(
          std::min(rng_.uniform() * dNMmK, dNMmK - 1.0));
      const int i = select_weighted_host(gh, /*weight_is_k=*/false);
      ev.host = i;
      ev.kind = EventKind::MutateBtoA;
      apply_count_change(i, k_[static_cast<size_t>(i)] + 1);
      break;
    }
    default:
      throw std::logic_error("Engine::step: no category selected");
  }
  ++event_counts_[static_cast<size_t>(ev.kind)];
  if (log_) log_->push_back(ev);
  res.event = ev;
  return res;
}

namespace {

size_t grid_size(double t_end, double sample_dt) {
  return static_cast<size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
}

}  // namespace

Trajectory simulate(const ModelParams& p, const std::vector<int>& init,
                    double t_end, double sample_dt, uint64_t seed,
                    EngineOptions opts, std::vector<EventRecord>* event_log,
                    bool record_snapshots) {
  if (!(t_end > 0.0) || !(sample_dt > 0.0))
    throw std::invalid_argument("simulate: t_end and sample_dt must be > 0");
  Engine eng(p, init, seed, opts);
  eng.set_event_log(event_log);
  Trajectory traj;
  traj.seed = seed;
  traj.t_end = t_end;
  if (record_snapshots) traj.snapshots.emplace();

  const size_t n_samples = grid_size(t_end, sample_dt);
  auto record = [&](double t_sample) {
    traj.samples.push_back({t_sample, eng.masses()});
    if (record_snapshots) traj.snapshots->push_back(eng.counts());
  };
  record(0.0);
  for (size_t next = 1; next < n_samples; ++next) {
    const double t_grid = static_cast<double>(next) * sample_dt;
    while (true) {
      const StepResult sr = eng.step(t_grid);
      if (sr.limit_reached) break;
      if (sr.absorbed) {
        if (!traj.absorbed) {
          traj.absorbed = true;
          traj.absorbed_at = eng.time();
        }
        break;
      }
    }
    record(t_grid);
  }
  traj.event_counts = eng.event_counts();
  traj.terminal_state = eng.counts();
  return traj;
}

StoppingResult simulate_with_stopping(
    const ModelParams& p, const std::vector<int>& init,
    const std::function<bool(const ClassMasses&)>& stop, double t_max,
    double sample_dt, uint64_t seed, EngineOptions opts) {
  if (!(t_max > 0.0) || !(sample_dt > 0.0))
    throw std::invalid_argument(
        "simulate_with_stopping: t_max and sample_dt must be > 0");
  Engine eng(p, init, seed, opts);
  StoppingResult out;
  out.trajectory.seed = seed;
  out.trajectory.t_end = t_max;

  const size_t n_samples = grid_size(t_max, sample_dt);
  auto record = [&](double t_sample) -> bool {
    const ClassMasses m = eng.masses();
    out.trajectory.samples.push_back({t_sample, m});
    if (stop(m)) {
      out.hit_time = t_sample;
      return true;
    }
    return false;
  };
  bool hit = record(0.0);
  for (size_t next = 1; next < n_samples && !hit; ++next) {
    const double t_grid = static_cast<double>(next) * sample_dt;
    while (true) {
      const StepResult sr = eng.step(t_grid);
      if (sr.limit_reached) break;
      if (sr.absorbed) {
        if (!out.trajectory.absorbed) {
          out.trajectory.absorbed = true;
          out.trajectory.absorbed_at = eng.time();
        }
        break;
      }
    }
    hit = record(t_grid);
  }
  out.trajectory.event_counts = eng.event_counts();
  out.trajectory.terminal_state = eng.counts();
  return out;
}

}  // namespace parasim::ssa
