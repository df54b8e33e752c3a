#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "parasim/config.hpp"
#include "parasim/excursion.hpp"
#include "parasim/model.hpp"
#include "parasim/ssa.hpp"
#include "parasim/trajectory.hpp"

using namespace parasim;
using namespace parasim::ssa;

namespace {

ModelParams small_params() {
  ModelParams p;
  p.N = 20;
  p.M = 10;
  p.eta = 0.5;
  p.b = 0.5;
  p.r = 1.0;
  p.g_N = 1.0;
  p.u_N = 0.0;
  return p;
}

}  // namespace

TEST_CASE("per-host rates: frozen example") {
  ModelParams p;
  p.N = 10;
  p.M = 2;
  p.eta = 0.5;
  p.u_N = 0.0;
  Scales sc;
  sc.s_N = 0.1;
  sc.r_N = 10.0;
  sc.g_N = 100.0;
  const std::vector<int> k = {5, 10};
  const HostRates h0 = host_rates(k, 0, p, sc);
  CHECK(h0.up == doctest::Approx(253.75).epsilon(1e-14));
  CHECK(h0.down == doctest::Approx(251.25).epsilon(1e-14));
  CHECK(h0.rep1 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(h0.rep0 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(h0.mutAB == 0.0);
  CHECK(h0.mutBA == 0.0);
  // Pure all-A host: no Moran weight, only downward reinfection pressure.
  const HostRates h1 = host_rates(k, 1, p, sc);
  CHECK(h1.up == 0.0);
  CHECK(h1.down == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(h1.rep1 == doctest::Approx(0.75).epsilon(1e-14));
  // Mutation rates are linear in the type counts.
  p.u_N = 1e-3;
  const HostRates hm = host_rates(k, 0, p, sc);
  CHECK(hm.mutAB == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(hm.mutBA == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("first-event distribution matches the per-host rate table") {
  ModelParams p;
  p.N = 6;
  p.M = 3;
  p.eta = 0.5;
  p.b = 0.5;
  p.r = 1.0;
  p.g_N = 1.0;
  p.u_N = 0.01;
  const Scales sc = derive_scales(p);
  const std::vector<int> init = {2, 0, 6};

  // Expected bucket probabilities from the documented per-host rates.
  double total = 0.0;
  std::array<std::array<double, 6>, 3> want{};
  for (int i = 0; i < 3; ++i) {
    const HostRates h = host_rates(init, i, p, sc);
    want[i] = {h.up, h.down, h.rep1, h.rep0, h.mutAB, h.mutBA};
    for (double v : want[i]) total += v;
  }

  const int reps = 20000;
  std::array<std::array<long, 6>, 3> got{};
  double dt_sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    Engine eng(p, init, 1000 + static_cast<uint64_t>(rep));
    const StepResult res = eng.step();
    REQUIRE_FALSE(res.absorbed);
    dt_sum += res.dt;
    int bucket = -1;
    switch (res.event.kind) {
      case EventKind::MoranUp:
      case EventKind::ReinfectUp: bucket = 0; break;
      case EventKind::MoranDown:
      case EventKind::ReinfectDown: bucket = 1; break;
      case EventKind::ReplaceTo1: bucket = 2; break;
      case EventKind::ReplaceTo0: bucket = 3; break;
      case EventKind::MutateAtoB: bucket = 4; break;
      case EventKind::MutateBtoA: bucket = 5; break;
    }
    REQUIRE(bucket >= 0);
    REQUIRE(res.event.host >= 0);
    REQUIRE(res.event.host < 3);
    ++got[static_cast<size_t>(res.event.host)][static_cast<size_t>(bucket)];
  }
  for (int i = 0; i < 3; ++i)
    for (int bjs = 0; bjs < 6; ++bjs) {
      const double prob = want[static_cast<size_t>(i)][static_cast<size_t>(bjs)] / total;
      const double freq =
          static_cast<double>(got[static_cast<size_t>(i)][static_cast<size_t>(bjs)]) / reps;
      if (prob == 0.0) {
        CHECK(freq == 0.0);
      } else {
        const double se = std::sqrt(prob * (1.0 - prob) / reps);
        CHECK(std::abs(freq - prob) < 5.0 * se + 1e-12);
      }
    }
  // Exponential holding time at the total rate.
  const double mean_dt = dt_sum / reps;
  CHECK(std::abs(mean_dt - 1.0 / total) <
        4.0 / (total * std::sqrt(double(reps))));
}

TEST_CASE("fenwick and dense-scan backends make identical decisions") {
  ModelParams p = small_params();
  p.M = 25;
  p.u_N = 2e-4;
  std::vector<int> init(25, 0);
  for (int i = 0; i < 25; ++i) init[static_cast<size_t>(i)] = (i * 7) % 21;
  std::vector<EventRecord> log_f, log_d;
  EngineOptions of;
  of.backend = Backend::Fenwick;
  EngineOptions od;
  od.backend = Backend::DenseScan;
  const Trajectory tf = simulate(p, init, 2.0, 0.5, 99, of, &log_f);
  const Trajectory td = simulate(p, init, 2.0, 0.5, 99, od, &log_d);
  REQUIRE(log_f.size() == log_d.size());
  REQUIRE(log_f.size() > 100);  // the run actually did something
  for (size_t i = 0; i < log_f.size(); ++i) {
    CHECK(log_f[i].t == log_d[i].t);
    CHECK(log_f[i].host == log_d[i].host);
    CHECK(log_f[i].kind == log_d[i].kind);
    CHECK(log_f[i].src == log_d[i].src);
  }
  CHECK(tf.terminal_state == td.terminal_state);
  CHECK(tf.event_counts == td.event_counts);
}

TEST_CASE("simulation is deterministic in the seed") {
  const ModelParams p = small_params();
  std::vector<int> init(10, 0);
  for (int i = 5; i < 10; ++i) init[static_cast<size_t>(i)] = 20;
  const Trajectory a = simulate(p, init, 1.5, 0.25, 4242);
  const Trajectory b = simulate(p, init, 1.5, 0.25, 4242);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(a.samples[i].mass.z0 == b.samples[i].mass.z0);
    CHECK(a.samples[i].mass.zeta == b.samples[i].mass.zeta);
    CHECK(a.samples[i].mass.z1 == b.samples[i].mass.z1);
  }
  CHECK(a.terminal_state == b.terminal_state);
  const Trajectory c = simulate(p, init, 1.5, 0.25, 4243);
  CHECK(a.terminal_state != c.terminal_state);  // different seed, different run
}

TEST_CASE("grid sampling covers exactly the grid and masses sum to one") {
  const ModelParams p = small_params();
  std::vector<int> init(10, 10);
  std::vector<EventRecord> log;
  const Trajectory traj = simulate(p, init, 2.0, 0.25, 7, {}, &log);
  REQUIRE(traj.samples.size() == 9);
  for (size_t j = 0; j < traj.samples.size(); ++j) {
    CHECK(traj.samples[j].t == doctest::Approx(0.25 * j).epsilon(1e-12));
    const ClassMasses& m = traj.samples[j].mass;
    CHECK(m.z0 + m.zeta + m.z1 + m.ztrans == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(traj.t_end == 2.0);
  for (const EventRecord& e : log) CHECK(e.t <= 2.0);
  // Event totals match the log.
  uint64_t total = 0;
  for (uint64_t c : traj.event_counts) total += c;
  CHECK(total == log.size());
}

TEST_CASE("frozen configurations absorb without consuming randomness") {
  ModelParams p = small_params();
  SUBCASE("monomorphic all-B is frozen") {
    Engine eng(p, std::vector<int>(10, 0), 1);
    CHECK(eng.frozen());
    const StepResult res = eng.step();
    CHECK(res.absorbed);
    CHECK(res.dt == 0.0);
    CHECK(eng.time() == 0.0);
  }
  SUBCASE("monomorphic all-A is frozen") {
    Engine eng(p, std::vector<int>(10, 20), 1);
    CHECK(eng.frozen());
    CHECK(eng.step().absorbed);
  }
  SUBCASE("mixed pure profile is not frozen: replacement still mixes") {
    std::vector<int> init(10, 0);
    init[0] = 20;
    Engine eng(p, init, 1);
    CHECK_FALSE(eng.frozen());
    CHECK_FALSE(eng.step().absorbed);
  }
  SUBCASE("mutation keeps every configuration alive") {
    p.u_N = 1e-4;
    Engine eng(p, std::vector<int>(10, 0), 1);
    CHECK_FALSE(eng.frozen());
    // Replacement no-ops still appear in the event stream; the first
    // state-changing event must be the B -> A mutation.
    bool mutated = false;
    for (int i = 0; i < 2000000 && !mutated; ++i) {
      const StepResult res = eng.step();
      REQUIRE_FALSE(res.absorbed);
      if (eng.total_type_a() > 0) {
        CHECK(res.event.kind == EventKind::MutateBtoA);
        mutated = true;
      }
    }
    CHECK(mutated);
  }
  SUBCASE("single host at zero with everything off is frozen") {
    p.M = 1;
    p.r = 0.0;
    Engine eng(p, {0}, 1);
    CHECK(eng.frozen());
    CHECK(eng.step().absorbed);
  }
  SUBCASE("single mixed host is alive even with everything off") {
    p.M = 1;
    p.r = 0.0;
    EngineOptions opts;
    opts.disable_replacement = true;
    Engine eng(p, {7}, 1, opts);
    CHECK_FALSE(eng.frozen());
  }
}

TEST_CASE("two pure hosts resolve by replacement and absorb") {
  ModelParams p = small_params();
  p.M = 2;
  p.r = 0.0;
  int all_a = 0;
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    const Trajectory traj =
        simulate(p, {0, 20}, 50.0, 5.0, 10000 + static_cast<uint64_t>(rep));
    REQUIRE(traj.absorbed);
    CHECK(traj.absorbed_at <= 50.0);
    const bool a0 = traj.terminal_state == std::vector<int>{0, 0};
    const bool a1 = traj.terminal_state == std::vector<int>{20, 20};
    REQUIRE((a0 || a1));
    all_a += a1 ? 1 : 0;
  }
  // Symmetric start: each monomorphic outcome has probability 1/2.
  const double freq = static_cast<double>(all_a) / reps;
  CHECK(std::abs(freq - 0.5) < 5.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("step honours the time limit and resumes correctly") {
  ModelParams p = small_params();
  std::vector<int> init(10, 10);
  Engine eng(p, init, 3);
  int limited = 0;
  while (eng.time() < 0.5) {
    const StepResult res = eng.step(0.5);
    REQUIRE_FALSE(res.absorbed);
    CHECK(eng.time() <= 0.5 + 1e-15);
    if (res.limit_reached) {
      ++limited;
      break;
    }
  }
  CHECK(limited == 1);
  CHECK(eng.time() == 0.5);
  const StepResult res = eng.step(10.0);
  CHECK_FALSE(res.limit_reached);
  CHECK(eng.time() > 0.5);
}

TEST_CASE("engine caches stay consistent over long runs") {
  ModelParams p = small_params();
  p.M = 15;
  p.u_N = 1e-4;
  std::vector<int> init(15, 0);
  for (int i = 0; i < 15; ++i) init[static_cast<size_t>(i)] = (3 * i) % 21;
  Engine eng(p, init, 5);
  long long moved = 0;
  for (int i = 0; i < 100000; ++i) {
    const StepResult res = eng.step();
    if (res.absorbed) break;
    ++moved;
  }
  CHECK(moved == 100000);
  CHECK(eng.check_cache_consistency());
  long long K = 0;
  for (int k : eng.counts()) K += k;
  CHECK(K == eng.total_type_a());
}

TEST_CASE("masses agree with direct host classification") {
  ModelParams p = small_params();
  std::vector<int> init = {0, 20, 10, 3, 17, 0, 20, 10, 9, 11};
  Engine eng(p, init, 12);
  for (int i = 0; i < 200; ++i) eng.step();
  const ClassMasses a = eng.masses();
  const ClassMasses b = classify_hosts(eng.counts(), p.N, eng.scales().windows);
  CHECK(a.z0 == doctest::Approx(b.z0).epsilon(1e-12));
  CHECK(a.zeta == doctest::Approx(b.zeta).epsilon(1e-12));
  CHECK(a.z1 == doctest::Approx(b.z1).epsilon(1e-12));
  CHECK(a.ztrans == doctest::Approx(b.ztrans).epsilon(1e-12));
}

TEST_CASE("total mutation rate is state-independent") {
  ModelParams p = small_params();
  p.M = 5;
  p.N = 50;
  p.g_N = 5.0;
  p.u_N = 0.002;  // theta_N = 0.002 * 50 * 5 * 5 = 2.5
  const Scales sc = derive_scales(p);
  CHECK(sc.theta_N == doctest::Approx(2.5).epsilon(1e-14));
  std::vector<int> init(5, 25);
  const double t_end = 40.0;
  const Trajectory traj = simulate(p, init, t_end, 10.0, 77);
  const double mut =
      static_cast<double>(traj.event_counts[static_cast<size_t>(EventKind::MutateAtoB)] +
                          traj.event_counts[static_cast<size_t>(EventKind::MutateBtoA)]);
  const double expect = sc.theta_N * t_end;  // Poisson(100)
  CHECK(std::abs(mut - expect) < 4.0 * std::sqrt(expect));
}

TEST_CASE("single-host hitting probability matches the exact solver") {
  ModelParams p;
  p.N = 30;
  p.M = 1;
  p.eta = 0.5;
  p.b = 0.5;
  p.r = 0.0;
  p.g_N = 1.0;
  EngineOptions opts;
  opts.disable_replacement = true;
  opts.disable_reinfection = true;
  const Scales sc = derive_scales(p);
  excursion::BirthDeathSpec spec;
  spec.N = p.N;
  spec.g_N = sc.g_N;
  spec.s_N = sc.s_N;
  spec.eta = p.eta;
  const int start = 3, target = 15;
  const double exact = excursion::balance_prob_exact(spec, start, target, 0);
  const int reps = 4000;
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Engine eng(p, {start}, 500 + static_cast<uint64_t>(rep), opts);
    while (true) {
      const int k = eng.counts()[0];
      if (k == 0) break;
      if (k >= target) {
        ++hits;
        break;
      }
      REQUIRE_FALSE(eng.step().absorbed);
    }
  }
  const double freq = static_cast<double>(hits) / reps;
  const double se = std::sqrt(exact * (1.0 - exact) / reps);
  CHECK(std::abs(freq - exact) < 4.0 * se);
}

TEST_CASE("snapshots follow the sample grid") {
  const ModelParams p = small_params();
  std::vector<int> init(10, 10);
  const Trajectory traj = simulate(p, init, 1.0, 0.25, 21, {}, nullptr, true);
  REQUIRE(traj.snapshots.has_value());
  REQUIRE(traj.snapshots->size() == traj.samples.size());
  CHECK(traj.snapshots->back() == traj.terminal_state);
  for (const std::vector<int>& snap : *traj.snapshots) {
    REQUIRE(snap.size() == 10);
    for (int k : snap) {
      CHECK(k >= 0);
      CHECK(k <= 20);
    }
  }
}

TEST_CASE("stopping predicate is evaluated on the sample grid") {
  ModelParams p = small_params();
  p.u_N = 5e-3;
  std::vector<int> init(10, 0);
  SUBCASE("immediate stop at t = 0") {
    const StoppingResult res = simulate_with_stopping(
        p, init, [](const ClassMasses&) { return true; }, 10.0, 0.5, 3);
    REQUIRE(res.hit_time.has_value());
    CHECK(*res.hit_time == 0.0);
    CHECK(res.trajectory.samples.size() == 1);
  }
  SUBCASE("stop once mutation breaks the monomorphic start") {
    const StoppingResult res = simulate_with_stopping(
        p, init, [](const ClassMasses& m) { return m.z0 < 1.0; }, 200.0, 0.5,
        3);
    REQUIRE(res.hit_time.has_value());
    CHECK(*res.hit_time > 0.0);
    CHECK(res.trajectory.samples.back().t == doctest::Approx(*res.hit_time));
    CHECK(res.trajectory.samples.back().mass.z0 < 1.0);
  }
  SUBCASE("horizon reached without a hit") {
    p.u_N = 0.0;
    const StoppingResult res = simulate_with_stopping(
        p, init, [](const ClassMasses& m) { return m.z1 > 0.5; }, 5.0, 0.5, 3);
    CHECK_FALSE(res.hit_time.has_value());
    CHECK(res.trajectory.samples.back().t == doctest::Approx(5.0));
  }
}

TEST_CASE("constructor validates the initial configuration") {
  const ModelParams p = small_params();
  CHECK_THROWS(Engine(p, std::vector<int>(9, 0), 1));       // wrong size
  CHECK_THROWS(Engine(p, std::vector<int>(10, 21), 1));     // k > N
  std::vector<int> neg(10, 0);
  neg[3] = -1;
  CHECK_THROWS(Engine(p, neg, 1));                          // k < 0
}

TEST_CASE("trajectory CSV from a real run reproduces the schema") {
  const ModelParams p = small_params();
  std::vector<int> init(10, 10);
  const Trajectory traj = simulate(p, init, 0.5, 0.25, 2);
  const std::string csv = trajectory_csv(traj, config_lines(p, 2));
  CHECK(csv.find("# N = 20\n") != std::string::npos);
  CHECK(csv.find("# seed = 2\n") != std::string::npos);
  CHECK(csv.find("t,z0,zeta,z1,ztrans\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 15);
}
