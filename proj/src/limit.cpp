#include "parasim/limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace parasim::limit {

namespace {

size_t grid_size(double t_end, double sample_dt) {
  return static_cast<size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
}

const char* ternary_name(HostTernary s) {
  switch (s) {
    case HostTernary::Zero: return "zero";
    case HostTernary::Eta: return "eta";
    case HostTernary::One: return "one";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// M-host ternary process.

namespace {

struct YmState {
  int M;
  double eta;
  double r;
  std::vector<HostTernary> y;
  std::vector<int> zero_list, one_list;
  std::vector<int> pos;  // position in the class list; -1 for eta hosts
  int c0 = 0, ce = 0, c1 = 0;

  YmState(int M_, double eta_, double r_, const std::vector<HostTernary>& init)
      : M(M_), eta(eta_), r(r_), y(init), pos(init.size(), -1) {
    for (int i = 0; i < M; ++i) {
      switch (y[static_cast<size_t>(i)]) {
        case HostTernary::Zero:
          pos[static_cast<size_t>(i)] = static_cast<int>(zero_list.size());
          zero_list.push_back(i);
          ++c0;
          break;
        case HostTernary::Eta:
          ++ce;
          break;
        case HostTernary::One:
          pos[static_cast<size_t>(i)] = static_cast<int>(one_list.size());
          one_list.push_back(i);
          ++c1;
          break;
      }
    }
  }

  void detach(int i) {
    const HostTernary s = y[static_cast<size_t>(i)];
    std::vector<int>* list = nullptr;
    if (s == HostTernary::Zero) {
      list = &zero_list;
      --c0;
    } else if (s == HostTernary::One) {
      list = &one_list;
      --c1;
    } else {
      --ce;
      return;
    }
    const int p = pos[static_cast<size_t>(i)];
    const int last = list->back();
    (*list)[static_cast<size_t>(p)] = last;
    pos[static_cast<size_t>(last)] = p;
    list->pop_back();
    pos[static_cast<size_t>(i)] = -1;
  }

  void attach(int i, HostTernary s) {
    y[static_cast<size_t>(i)] = s;
    if (s == HostTernary::Zero) {
      pos[static_cast<size_t>(i)] = static_cast<int>(zero_list.size());
      zero_list.push_back(i);
      ++c0;
    } else if (s == HostTernary::One) {
      pos[static_cast<size_t>(i)] = static_cast<int>(one_list.size());
      one_list.push_back(i);
      ++c1;
    } else {
      ++ce;
    }
  }

  void set_state(int i, HostTernary s) {
    if (y[static_cast<size_t>(i)] == s) return;
    detach(i);
    attach(i, s);
  }

  bool frozen() const { return ce == 0 && (c0 == 0 || c1 == 0); }

  ClassMasses masses() const {
    const double dM = static_cast<double>(M);
    return {c0 / dM, ce / dM, c1 / dM, 0.0};
  }
};

}  // namespace

Trajectory simulate_ym(int M, double eta, double r,
                       const std::vector<HostTernary>& init, double t_end,
                       double sample_dt, uint64_t seed,
                       std::vector<EventRecord>* event_log) {
  if (M < 1) throw std::invalid_argument("simulate_ym: M must be >= 1");
  if (r < 0.0) throw std::invalid_argument("simulate_ym: r must be >= 0");
  if (static_cast<int>(init.size()) != M)
    throw std::invalid_argument("simulate_ym: init size must equal M");
  if (!(t_end > 0.0) || !(sample_dt > 0.0))
    throw std::invalid_argument("simulate_ym: t_end, sample_dt must be > 0");

  YmState st(M, eta, r, init);
  Rng rng(seed, 0);
  Trajectory traj;
  traj.seed = seed;
  traj.t_end = t_end;
  double t = 0.0;

  const size_t n_samples = grid_size(t_end, sample_dt);
  traj.samples.push_back({0.0, st.masses()});
  for (size_t next = 1; next < n_samples; ++next) {
    const double t_grid = static_cast<double>(next) * sample_dt;
    while (true) {
      if (st.frozen()) {
        if (!traj.absorbed) {
          traj.absorbed = true;
          traj.absorbed_at = t;
        }
        break;
      }
      const double dM = static_cast<double>(M);
      const double sY = st.c1 + eta * st.ce;           // sum of y_j
      const double sNY = st.c0 + (1.0 - eta) * st.ce;  // sum of (1 - y_j)
      double rate[4];
      rate[0] = sY;   // any host flips to 1
      rate[1] = sNY;  // any host flips to 0
      rate[2] = st.c0 * (2.0 * r * eta / dM) * sY;          // 0 -> eta
      rate[3] = st.c1 * (2.0 * r * (1.0 - eta) / dM) * sNY;  // 1 -> eta
      const double total = rate[0] + rate[1] + rate[2] + rate[3];

      const double dt = rng.exponential(total);
      if (t + dt > t_grid) {
        t = t_grid;  // memoryless: redraw on the next pass
        break;
      }
      t += dt;
      const double target = rng.uniform() * total;
      int cat = 3;
      double cum = 0.0;
      for (int c = 0; c < 4; ++c) {
        cum += rate[c];
        if (target < cum) {
          cat = c;
          break;
        }
      }
      EventRecord ev;
      ev.t = t;
      switch (cat) {
        case 0: {
          const int i = static_cast<int>(rng.below(static_cast<uint64_t>(M)));
          ev.host = i;
          ev.kind = EventKind::ReplaceTo1;
          st.set_state(i, HostTernary::One);
          break;
        }
        case 1: {
          const int i = static_cast<int>(rng.below(static_cast<uint64_t>(M)));
          ev.host = i;
          ev.kind = EventKind::ReplaceTo0;
          st.set_state(i, HostTernary::Zero);
          break;
        }
        case 2: {
          const int idx =
              static_cast<int>(rng.below(static_cast<uint64_t>(st.c0)));
          const int i = st.zero_list[static_cast<size_t>(idx)];
          ev.host = i;
          ev.kind = EventKind::ReinfectUp;
          st.set_state(i, HostTernary::Eta);
          break;
        }
        default: {
          const int idx =
              static_cast<int>(rng.below(static_cast<uint64_t>(st.c1)));
          const int i = st.one_list[static_cast<size_t>(idx)];
          ev.host = i;
          ev.kind = EventKind::ReinfectDown;
          st.set_state(i, HostTernary::Eta);
          break;
        }
      }
      ++traj.event_counts[static_cast<size_t>(ev.kind)];
      if (event_log) event_log->push_back(ev);
    }
    traj.samples.push_back({t_grid, st.masses()});
  }
  traj.terminal_state.resize(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i)
    traj.terminal_state[static_cast<size_t>(i)] =
        static_cast<int>(st.y[static_cast<size_t>(i)]);
  return traj;
}

// ---------------------------------------------------------------------------
// Aggregated count process.

namespace {

struct ZmRates {
  // deltas (dc0, dce, dc1) and rates for the six jumps, fixed order
  static constexpr int kDelta[6][3] = {
      {+1, -1, 0}, {+1, 0, -1}, {-1, 0, +1},
      {-1, +1, 0}, {0, +1, -1}, {0, -1, +1},
  };
  static void rates(int M, double eta, double r, int c0, int ce, int c1,
                    double out[6]) {
    const double dM = static_cast<double>(M);
    const double z0 = c0 / dM, ze = ce / dM, z1 = c1 / dM;
    const double em = 1.0 - eta;
    out[0] = dM * ze * (z0 + em * ze);
    out[1] = dM * (ze * em * z1 + z0 * z1);
    out[2] = dM * (z1 * z0 + ze * eta * z0);
    out[3] = 2.0 * r * dM * (eta * z1 + eta * eta * ze) * z0;
    out[4] = 2.0 * r * dM * (em * z0 + em * em * ze) * z1;
    out[5] = dM * ze * (z1 + eta * ze);
  }
};

constexpr int ZmRates::kDelta[6][3];

const EventKind kZmKind[6] = {
    EventKind::ReplaceTo0,   // eta-host replaced by 0
    EventKind::ReplaceTo0,   // 1-host replaced by 0
    EventKind::ReplaceTo1,   // 0-host replaced by 1
    EventKind::ReinfectUp,   // 0 -> eta
    EventKind::ReinfectDown, // 1 -> eta
    EventKind::ReplaceTo1,   // eta-host replaced by 1
};

}  // namespace

ZmCounts zm_counts_from_weights(int M, const TernaryWeights& z) {
  const double vals[3] = {z.z0, z.zeta, z.z1};
  int c[3];
  for (int i = 0; i < 3; ++i) {
    const double scaled = vals[i] * M;
    c[i] = static_cast<int>(std::lround(scaled));
    if (std::abs(scaled - c[i]) > 1e-9)
      throw std::invalid_argument(
          "zm_counts_from_weights: weights not on the 1/M grid");
  }
  if (c[0] + c[1] + c[2] != M)
    throw std::invalid_argument("zm_counts_from_weights: weights do not sum to 1");
  return {c[0], c[1], c[2]};
}

Trajectory simulate_zm(int M, double eta, double r, const ZmCounts& init,
                       double t_end, double sample_dt, uint64_t seed,
                       std::vector<EventRecord>* event_log) {
  if (M < 1) throw std::invalid_argument("simulate_zm: M must be >= 1");
  if (r < 0.0) throw std::invalid_argument("simulate_zm: r must be >= 0");
  if (init.c0 < 0 || init.ce < 0 || init.c1 < 0 ||
      init.c0 + init.ce + init.c1 != M)
    throw std::invalid_argument("simulate_zm: counts must be >= 0 and sum to M");
  if (!(t_end > 0.0) || !(sample_dt > 0.0))
    throw std::invalid_argument("simulate_zm: t_end, sample_dt must be > 0");

  int c0 = init.c0, ce = init.ce, c1 = init.c1;
  Rng rng(seed, 0);
  Trajectory traj;
  traj.seed = seed;
  traj.t_end = t_end;
  double t = 0.0;
  const double dM = static_cast<double>(M);
  auto masses = [&]() {
    return ClassMasses{c0 / dM, ce / dM, c1 / dM, 0.0};
  };
  auto frozen = [&]() { return ce == 0 && (c0 == 0 || c1 == 0); };

  const size_t n_samples = grid_size(t_end, sample_dt);
  traj.samples.push_back({0.0, masses()});
  for (size_t next = 1; next < n_samples; ++next) {
    const double t_grid = static_cast<double>(next) * sample_dt;
    while (true) {
      if (frozen()) {
        if (!traj.absorbed) {
          traj.absorbed = true;
          traj.absorbed_at = t;
        }
        break;
      }
      double rate[6];
      ZmRates::rates(M, eta, r, c0, ce, c1, rate);
      double total = 0.0;
      for (double v : rate) total += v;

      const double dt = rng.exponential(total);
      if (t + dt > t_grid) {
        t = t_grid;  // memoryless: redraw on the next pass
        break;
      }
      t += dt;
      const double target = rng.uniform() * total;
      int jump = -1;
      double cum = 0.0;
      for (int c = 0; c < 6; ++c) {
        cum += rate[c];
        if (target < cum) {
          jump = c;
          break;
        }
      }
      if (jump < 0) {
        for (int c = 5; c >= 0; --c)
          if (rate[c] > 0.0) {
            jump = c;
            break;
          }
      }
      c0 += ZmRates::kDelta[jump][0];
      ce += ZmRates::kDelta[jump][1];
      c1 += ZmRates::kDelta[jump][2];
      EventRecord ev;
      ev.t = t;
      ev.kind = kZmKind[jump];
      ++traj.event_counts[static_cast<size_t>(ev.kind)];
      if (event_log) event_log->push_back(ev);
    }
    traj.samples.push_back({t_grid, masses()});
  }
  traj.terminal_state = {c0, ce, c1};
  return traj;
}

TernaryWeights ZmLaw::mean_weights() const {
  TernaryWeights w{0.0, 0.0, 0.0};
  for (int c0 = 0; c0 <= M_; ++c0)
    for (int ce = 0; ce + c0 <= M_; ++ce) {
      const double p = prob(c0, ce);
      if (p == 0.0) continue;
      w.z0 += p * c0;
      w.zeta += p * ce;
      w.z1 += p * (M_ - c0 - ce);
    }
  const double dM = static_cast<double>(M_);
  w.z0 /= dM;
  w.zeta /= dM;
  w.z1 /= dM;
  return w;
}

double ZmLaw::total() const {
  double s = 0.0;
  for (double v : p_) s += v;
  return s;
}

ZmLaw zm_exact_law(int M, double eta, double r, const ZmCounts& init,
                   double t, double tol) {
  if (M < 1) throw std::invalid_argument("zm_exact_law: M must be >= 1");
  if (init.c0 < 0 || init.ce < 0 || init.c1 < 0 ||
      init.c0 + init.ce + init.c1 != M)
    throw std::invalid_argument("zm_exact_law: counts must be >= 0, sum to M");
  if (t < 0.0) throw std::invalid_argument("zm_exact_law: t must be >= 0");

  const int S = M + 1;
  const size_t dim = static_cast<size_t>(S) * S;
  auto id_of = [&](int c0, int ce) {
    return static_cast<size_t>(c0) * S + ce;
  };

  // Precompute transitions and the uniformization rate.
  struct Trans {
    double rate;
    size_t target;
  };
  std::vector<std::vector<Trans>> trans(dim);
  std::vector<double> tot(dim, 0.0);
  double lambda = 0.0;
  for (int c0 = 0; c0 <= M; ++c0)
    for (int ce = 0; ce + c0 <= M; ++ce) {
      const int c1 = M - c0 - ce;
      double rate[6];
      ZmRates::rates(M, eta, r, c0, ce, c1, rate);
      auto& tr = trans[id_of(c0, ce)];
      double s = 0.0;
      for (int j = 0; j < 6; ++j) {
        if (rate[j] <= 0.0) continue;
        const int n0 = c0 + ZmRates::kDelta[j][0];
        const int ne = ce + ZmRates::kDelta[j][1];
        tr.push_back({rate[j], id_of(n0, ne)});
        s += rate[j];
      }
      tot[id_of(c0, ce)] = s;
      lambda = std::max(lambda, s);
    }

  ZmLaw law(M);
  if (t == 0.0 || lambda == 0.0) {
    law.prob_ref(init.c0, init.ce) = 1.0;
    return law;
  }
  if (lambda * t > 600.0)
    throw std::runtime_error(
        "zm_exact_law: uniformization horizon too large (lambda*t > 600)");

  std::vector<double> p(dim, 0.0), pn(dim, 0.0);
  p[id_of(init.c0, init.ce)] = 1.0;
  double w = std::exp(-lambda * t);
  double cum = 0.0;
  const long n_max =
      static_cast<long>(lambda * t + 40.0 * std::sqrt(lambda * t + 1.0)) + 200;
  for (long n = 0; n <= n_max; ++n) {
    for (int c0 = 0; c0 <= M; ++c0)
      for (int ce = 0; ce + c0 <= M; ++ce) {
        const size_t id = id_of(c0, ce);
        if (p[id] != 0.0) law.prob_ref(c0, ce) += w * p[id];
      }
    cum += w;
    if (cum >= 1.0 - tol) break;
    // One uniformized step: pn = p (I + Q/lambda).
    std::fill(pn.begin(), pn.end(), 0.0);
    for (int c0 = 0; c0 <= M; ++c0)
      for (int ce = 0; ce + c0 <= M; ++ce) {
        const size_t id = id_of(c0, ce);
        const double mass = p[id];
        if (mass == 0.0) continue;
        pn[id] += mass * (1.0 - tot[id] / lambda);
        for (const Trans& tr : trans[id])
          pn[tr.target] += mass * tr.rate / lambda;
      }
    p.swap(pn);
    w *= lambda * t / static_cast<double>(n + 1);
  }
  return law;
}

// ---------------------------------------------------------------------------
// Single-host time-inhomogeneous process V.

HostTernary VPath::at(double time) const {
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const size_t i = static_cast<size_t>(it - t.begin());
  return state[i == 0 ? 0 : i - 1];
}

TernaryWeights VPath::occupation() const {
  double occ[3] = {0.0, 0.0, 0.0};
  for (size_t i = 0; i < t.size(); ++i) {
    const double hi = (i + 1 < t.size()) ? t[i + 1] : t_end;
    occ[static_cast<int>(state[i])] += hi - t[i];
  }
  return {occ[0] / t_end, occ[1] / t_end, occ[2] / t_end};
}

VPath simulate_v(double eta, double r,
                 const std::function<TernaryWeights(double)>& v_path,
                 HostTernary init, double t_end, Rng& rng) {
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate_v: t_end must be > 0");
  VPath path;
  path.t_end = t_end;
  path.t.push_back(0.0);
  path.state.push_back(init);
  HostTernary s = init;
  const double envelope = 1.0 + 2.0 * r;
  double t = 0.0;
  while (true) {
    t += rng.exponential(envelope);
    if (t > t_end) break;
    const TernaryWeights v = v_path(t);
    const double q0 = v.z0 + (1.0 - eta) * v.zeta;  // pressure toward 0
    const double q1 = v.z1 + eta * v.zeta;          // pressure toward 1
    double r1 = 0.0, r2 = 0.0;  // two candidate transitions, fixed order
    HostTernary s1 = s, s2 = s;
    switch (s) {
      case HostTernary::Zero:
        r1 = q1;
        s1 = HostTernary::One;
        r2 = 2.0 * r * eta * q1;
        s2 = HostTernary::Eta;
        break;
      case HostTernary::One:
        r1 = q0;
        s1 = HostTernary::Zero;
        r2 = 2.0 * r * (1.0 - eta) * q0;
        s2 = HostTernary::Eta;
        break;
      case HostTernary::Eta:
        r1 = q0;
        s1 = HostTernary::Zero;
        r2 = q1;
        s2 = HostTernary::One;
        break;
    }
    const double u = rng.uniform() * envelope;
    HostTernary ns = s;
    if (u < r1)
      ns = s1;
    else if (u < r1 + r2)
      ns = s2;
    if (ns != s) {
      s = ns;
      path.t.push_back(t);
      path.state.push_back(s);
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Ancestral tree sampler.

namespace {

struct TreeBuilder {
  double eta;
  double r;
  TernaryWeights v0;
  Rng* rng;
  size_t max_lines;
  TreeSampleRecord rec;
  int next_id = 0;

  HostTernary draw_leaf() {
    const double u = rng->uniform();
    if (u < v0.z0) return HostTernary::Zero;
    if (u < v0.z0 + v0.zeta) return HostTernary::Eta;
    return HostTernary::One;
  }

  bool coin(double p) {
    const bool c = rng->uniform() < p;
    rec.coins.push_back(c ? 1 : 0);
    return c;
  }

  HostTernary f_hr(HostTernary donor) {
    if (donor == HostTernary::Eta)
      return coin(eta) ? HostTernary::One : HostTernary::Zero;
    return donor;
  }

  HostTernary f_per(HostTernary host, HostTernary donor) {
    if (host == HostTernary::Zero && donor == HostTernary::One)
      return coin(eta) ? HostTernary::Eta : host;
    if (host == HostTernary::One && donor == HostTernary::Zero)
      return coin(1.0 - eta) ? HostTernary::Eta : host;
    if (host == HostTernary::Zero && donor == HostTernary::Eta)
      return coin(eta * eta) ? HostTernary::Eta : host;
    if (host == HostTernary::One && donor == HostTernary::Eta)
      return coin((1.0 - eta) * (1.0 - eta)) ? HostTernary::Eta : host;
    return host;
  }

  int new_line() {
    if (static_cast<size_t>(next_id) >= max_lines)
      throw std::runtime_error("sample_tree: line cap exceeded");
    rec.leaf_state.push_back(HostTernary::Zero);
    return next_id++;
  }

  // Continues line `id` downward from depth d; returns its state at d.
  HostTernary walk(double d, bool dist, int id) {
    const double dn = d - rng->exponential(1.0 + 2.0 * r);
    if (dn <= 0.0) {
      const HostTernary s = draw_leaf();
      rec.leaf_state[static_cast<size_t>(id)] = s;
      return s;
    }
    const bool is_hr = rng->uniform() * (1.0 + 2.0 * r) < 1.0;
    if (is_hr) {
      if (dist) {
        // Both branches survive below a distinguished HR, but only the
        // incoming donor branch determines the state above.
        const int donor = new_line();
        rec.events.push_back({dn, TreeEventKind::HR, id, donor});
        const HostTernary donor_state = walk(dn, false, donor);
        (void)walk(dn, true, id);  // dead host continuation keeps its leaf
        return f_hr(donor_state);
      }
      rec.events.push_back({dn, TreeEventKind::HR, id, -1});
      const HostTernary donor_state = walk(dn, false, id);  // adopt in place
      return f_hr(donor_state);
    }
    const int donor = new_line();
    rec.events.push_back({dn, TreeEventKind::PER, id, donor});
    const HostTernary host_state = walk(dn, dist, id);
    const HostTernary donor_state = walk(dn, false, donor);
    return f_per(host_state, donor_state);
  }
};

}  // namespace

TreeSampleRecord sample_tree(double t, double eta, double r,
                             const TernaryWeights& v0, Rng& rng,
                             size_t max_lines) {
  if (t < 0.0) throw std::invalid_argument("sample_tree: t must be >= 0");
  TreeBuilder b{eta, r, v0, &rng, max_lines, {}, 0};
  b.rec.t = t;
  const int root = b.new_line();
  b.rec.root_state = b.walk(t, true, root);
  b.rec.line_count = b.next_id;
  std::sort(b.rec.events.begin(), b.rec.events.end(),
            [](const TreeEvent& a, const TreeEvent& c) { return a.time > c.time; });
  return b.rec;
}

namespace {

HostTernary lean_walk(double d, double eta, double r, const TernaryWeights& v0,
                      Rng& rng) {
  for (;;) {
    d -= rng.exponential(1.0 + 2.0 * r);
    if (d <= 0.0) {
      const double u = rng.uniform();
      if (u < v0.z0) return HostTernary::Zero;
      if (u < v0.z0 + v0.zeta) return HostTernary::Eta;
      return HostTernary::One;
    }
    if (rng.uniform() * (1.0 + 2.0 * r) < 1.0) {
      // HR: state above is f_hr(donor). The donor subtree continues from
      // this depth; the host's past is irrelevant.
      const HostTernary donor = lean_walk(d, eta, r, v0, rng);
      if (donor == HostTernary::Eta)
        return rng.uniform() < eta ? HostTernary::One : HostTernary::Zero;
      return donor;
    }
    // PER: host branch continues in this loop frame; the donor branch is a
    // fresh subtree.  Resolve the host state first, then combine.
    const HostTernary host = lean_walk(d, eta, r, v0, rng);
    const HostTernary donor = lean_walk(d, eta, r, v0, rng);
    if (host == HostTernary::Zero && donor == HostTernary::One)
      return rng.uniform() < eta ? HostTernary::Eta : host;
    if (host == HostTernary::One && donor == HostTernary::Zero)
      return rng.uniform() < 1.0 - eta ? HostTernary::Eta : host;
    if (host == HostTernary::Zero && donor == HostTernary::Eta)
      return rng.uniform() < eta * eta ? HostTernary::Eta : host;
    if (host == HostTernary::One && donor == HostTernary::Eta)
      return rng.uniform() < (1.0 - eta) * (1.0 - eta) ? HostTernary::Eta
                                                       : host;
    return host;
  }
}

}  // namespace

HostTernary sample_root_state(double t, double eta, double r,
                              const TernaryWeights& v0, Rng& rng) {
  if (t < 0.0)
    throw std::invalid_argument("sample_root_state: t must be >= 0");
  return lean_walk(t, eta, r, v0, rng);
}

double expected_line_count(double t, double r) {
  if (r <= 0.0) return 1.0 + t;
  const double inv = 1.0 / (2.0 * r);
  return (1.0 + inv) * std::exp(2.0 * r * t) - inv;
}

TreeEstimate estimate_v_tree(double t, double eta, double r,
                             const TernaryWeights& v0, size_t n_samples,
                             uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("estimate_v_tree: n_samples must be >= 1");
  size_t counts[3] = {0, 0, 0};
  for (size_t i = 0; i < n_samples; ++i) {
    Rng rng = seed_stream(seed, i);
    counts[static_cast<int>(sample_root_state(t, eta, r, v0, rng))]++;
  }
  TreeEstimate est;
  const double n = static_cast<double>(n_samples);
  est.estimate = {counts[0] / n, counts[1] / n, counts[2] / n};
  auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / n); };
  est.se0 = se(est.estimate.z0);
  est.se_eta = se(est.estimate.zeta);
  est.se1 = se(est.estimate.z1);
  est.n_samples = n_samples;
  return est;
}

std::string tree_jsonl(const TreeSampleRecord& rec) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "{\"t\":%.17g,\"root\":\"%s\",\"lines\":%d",
                rec.t, ternary_name(rec.root_state), rec.line_count);
  out += buf;
  out += ",\"leaves\":[";
  for (size_t i = 0; i < rec.leaf_state.size(); ++i) {
    if (i) out += ',';
    out += '"';
    out += ternary_name(rec.leaf_state[i]);
    out += '"';
  }
  out += "],\"events\":[";
  for (size_t i = 0; i < rec.events.size(); ++i) {
    const TreeEvent& e = rec.events[i];
    std::snprintf(buf, sizeof buf,
                  "%s{\"time\":%.17g,\"kind\":\"%s\",\"line\":%d,\"child\":%d}",
                  i ? "," : "", e.time,
                  e.kind == TreeEventKind::HR ? "HR" : "PER", e.line, e.child);
    out += buf;
  }
  out += "]}\n";
  return out;
}

}  // namespace parasim::limit
