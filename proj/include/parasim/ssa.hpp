#pragma once

// Exact event-driven simulation of the finite Markov jump process: M hosts
// with integer type-A counts k_i in {0..N}, Moran resampling with weak
// balancing selection, uniform-donor reinfection and host replacement, and
// optional two-way single-parasite mutation.  All rates are on the host time
// scale.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "parasim/model.hpp"
#include "parasim/rng.hpp"
#include "parasim/trajectory.hpp"

namespace parasim::ssa {

// Aggregate per-host rates: up/down combine the Moran and reinfection terms,
// rep1/rep0 are the replacement rates, mutAB/mutBA the mutation rates.
struct HostRates {
  double up = 0.0;
  double down = 0.0;
  double rep1 = 0.0;
  double rep0 = 0.0;
  double mutAB = 0.0;
  double mutBA = 0.0;
};

// Per-host rates at the current state (counts k, host index i):
//   up    = g_N (1 + s_N (eta - x_i)) N x_i (1 - x_i) + r_N xbar (1 - x_i)
//   down  = g_N (1 + s_N (x_i - eta)) N x_i (1 - x_i) + r_N (1 - xbar) x_i
//   rep1  = xbar,  rep0 = 1 - xbar
//   mutAB = u_N g_N N x_i,  mutBA = u_N g_N N (1 - x_i)
// with x_i = k_i/N and xbar the grand type-A frequency (self included).
HostRates host_rates(const std::vector<int>& k, int i, const ModelParams& p,
                     const Scales& sc);

// Event selection backend.  Fenwick keeps per-host Moran weights in a binary
// indexed tree (O(log M) selection; pure hosts contribute zero weight and no
// work); DenseScan walks the same integer weights linearly.  Both backends
// make bit-identical decisions and therefore produce identical event logs
// for identical seeds.
enum class Backend { Fenwick, DenseScan };

struct EngineOptions {
  Backend backend = Backend::Fenwick;
  bool disable_replacement = false;  // single-host / within-host studies
  bool disable_reinfection = false;
};

struct StepResult {
  bool absorbed = false;        // no state-changing event is reachable
  bool limit_reached = false;   // stopped at t_limit before the next event
  double dt = 0.0;              // time advanced by this call
  EventRecord event;            // applied event (only when neither flag set)
};

class Engine {
 public:
  // init: per-host type-A counts, size M, each in [0, N].
  Engine(const ModelParams& p, const std::vector<int>& init, uint64_t seed,
         EngineOptions opts = {});

  // Advances by one event, or up to t_limit if the next event would fall
  // beyond it (the clock stops there; by memorylessness redrawing the
  // holding time on the next call preserves the law).  When the
  // configuration is frozen (no sequence of events can change the state:
  // u_N == 0 and the population is monomorphic, or all dynamics disabled and
  // no mixed host remains) returns absorbed = true without consuming
  // randomness.
  StepResult step(double t_limit = std::numeric_limits<double>::infinity());

  double time() const { return t_; }
  const std::vector<int>& counts() const { return k_; }
  long long total_type_a() const { return K_; }  // sum of k_i
  ClassMasses masses() const;
  bool frozen() const;

  const ModelParams& params() const { return p_; }
  const Scales& scales() const { return sc_; }
  const std::array<uint64_t, kNumEventKinds>& event_counts() const {
    return event_counts_;
  }

  // Optional event log; not owned.  Pass nullptr to stop logging.
  void set_event_log(std::vector<EventRecord>* log) { log_ = log; }

  // Recomputes the cached aggregates from k_ and compares; used by tests and
  // by the periodic debug self-check.
  bool check_cache_consistency() const;

 private:
  int select_moran_host(uint64_t g) const;
  int select_weighted_host(uint64_t g, bool weight_is_k) const;
  void apply_count_change(int host, int new_k);

  ModelParams p_;
  Scales sc_;
  EngineOptions opts_;
  Rng rng_;
  std::vector<int> k_;
  long long K_ = 0;            // sum of k_i
  long long W_ = 0;            // sum of k_i (N - k_i), total Moran weight
  std::vector<long long> fenwick_;  // Fenwick tree over w_i (Fenwick backend)
  std::vector<long long> w_;        // per-host Moran weights (both backends)
  double t_ = 0.0;
  std::array<uint64_t, kNumEventKinds> event_counts_{};
  std::vector<EventRecord>* log_ = nullptr;
  uint64_t steps_since_check_ = 0;
};

// Event-driven run sampled on the grid {0, sample_dt, 2 sample_dt, ...,
// t_end}.  Absorption freezes the remaining samples.  The optional event log
// receives every event; record_snapshots stores the full count vector at
// every grid time.
Trajectory simulate(const ModelParams& p, const std::vector<int>& init,
                    double t_end, double sample_dt, uint64_t seed,
                    EngineOptions opts = {},
                    std::vector<EventRecord>* event_log = nullptr,
                    bool record_snapshots = false);

struct StoppingResult {
  Trajectory trajectory;            // samples up to and including the hit
  std::optional<double> hit_time;   // first grid time satisfying stop
};

// Runs until the predicate holds at a sample-grid time (evaluated on the
// class masses) or until t_max.  The predicate is checked at t = 0 first.
StoppingResult simulate_with_stopping(
    const ModelParams& p, const std::vector<int>& init,
    const std::function<bool(const ClassMasses&)>& stop, double t_max,
    double sample_dt, uint64_t seed, EngineOptions opts = {});

}  // namespace parasim::ssa
