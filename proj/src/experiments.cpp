#include "parasim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "parasim/config.hpp"
#include "parasim/limit.hpp"
#include "parasim/ode.hpp"
#include "parasim/rng.hpp"
#include "parasim/ssa.hpp"

#include "json.hpp"

namespace parasim::experiments {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_g(v[i]);
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::array<double, 3> pooled_law(const std::vector<TernaryCounts>& reps,
                                 const std::vector<int>* pick = nullptr) {
  int64_t s[3] = {0, 0, 0};
  const size_t n = pick ? pick->size() : reps.size();
  for (size_t i = 0; i < n; ++i) {
    const TernaryCounts& c = reps[pick ? static_cast<size_t>((*pick)[i]) : i];
    s[0] += c[0];
    s[1] += c[1];
    s[2] += c[2];
  }
  const double tot = static_cast<double>(s[0] + s[1] + s[2]);
  if (tot <= 0.0) return {0.0, 0.0, 0.0};
  return {s[0] / tot, s[1] / tot, s[2] / tot};
}

double tv3(const std::array<double, 3>& p, const std::array<double, 3>& q) {
  return 0.5 * (std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]) +
                std::abs(p[2] - q[2]));
}

std::vector<int> resample_indices(size_t n, Rng& rng) {
  std::vector<int> idx(n);
  for (size_t i = 0; i < n; ++i)
    idx[i] = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
  return idx;
}

double bootstrap_se(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicates < 1)
    throw std::invalid_argument("experiments: replicates must be >= 1");
  if (threads < 1)
    throw std::invalid_argument("experiments: threads must be >= 1");
  if (!(t_end > 0.0) || !(sample_dt > 0.0))
    throw std::invalid_argument("experiments: t_end, sample_dt must be > 0");
  if (!(delta > 0.0) || !(t_max > 0.0))
    throw std::invalid_argument("experiments: delta, t_max must be > 0");
  if (tree_samples < 1)
    throw std::invalid_argument("experiments: tree_samples must be >= 1");
  if (!(params.eta > 0.0) || !(params.eta < 1.0))
    throw std::invalid_argument("experiments: eta must be in (0, 1)");
  if (params.r < 0.0)
    throw std::invalid_argument("experiments: r must be >= 0");
  double v0_sum = 0.0;
  for (double v : v0) {
    if (v < 0.0) throw std::invalid_argument("experiments: v0 must be >= 0");
    v0_sum += v;
  }
  if (std::abs(v0_sum - 1.0) > 1e-9)
    throw std::invalid_argument("experiments: v0 must sum to 1");
  if (preset == "mutation-cycle") {
    const auto u = ode::interior_equilibrium(params.eta, params.r);
    if (!u)
      throw std::invalid_argument(
          "mutation-cycle: no interior equilibrium at this (eta, r)");
    const double min_u = std::min({u->z0, u->zeta, u->z1});
    if (!(delta < 0.5 * min_u))
      throw std::invalid_argument(
          "mutation-cycle: delta must be < (1/2) min(u0, ueta, u1)");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "convergence-N", "chaos-M", "equilibrium-sweep", "tree-vs-ode",
      "mutation-cycle"};
  return names;
}

ExperimentConfig default_config(const std::string& preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  if (preset == "convergence-N") {
    cfg.params = {1000, 50, 0.5, 0.5, 1.0, 0.0, 0.3, 0.01, 0.1, 0.0};
    cfg.replicates = 16;
    cfg.t_end = 2.0;
    cfg.sample_dt = 0.25;
    cfg.n_grid = {200, 500, 1000};
    cfg.t_grid = {0.5, 1.0, 2.0};
  } else if (preset == "chaos-M") {
    cfg.params = {100, 200, 0.5, 0.5, 2.0, 0.0, 0.3, 0.01, 0.1, 0.0};
    cfg.replicates = 50;
    cfg.t_end = 3.0;
    cfg.sample_dt = 0.25;
    cfg.m_grid = {20, 50, 100, 200};
    cfg.v0[0] = 0.4;
    cfg.v0[1] = 0.2;
    cfg.v0[2] = 0.4;
  } else if (preset == "equilibrium-sweep") {
    cfg.params = {100, 10, 0.5, 0.5, 2.0, 0.0, 0.3, 0.01, 0.1, 0.0};
  } else if (preset == "tree-vs-ode") {
    cfg.params = {100, 10, 0.5, 0.5, 2.0, 0.0, 0.3, 0.01, 0.1, 0.0};
    cfg.t_grid = {0.5, 1.0, 2.0};
    cfg.tree_samples = 100000;
  } else if (preset == "mutation-cycle") {
    ModelParams p;
    p.N = 300;
    p.M = 30;
    p.eta = 0.5;
    p.b = 0.5;
    p.r = 2.0;
    p.g_N = 300.0;
    p.a = 0.3;
    p.eps = 0.01;
    p.eps1 = 0.1;
    // theta_N * s_N = 0.1  =>  u_N = 0.1 / (s_N * N * M * g_N).
    const double s_N = std::pow(p.N, -p.b);
    p.u_N = 0.1 / (s_N * p.N * p.M * p.g_N);
    cfg.params = p;
    cfg.replicates = 20;
    cfg.sample_dt = 0.25;
    cfg.delta = 0.1;
    cfg.t_max = 500.0;
  } else {
    throw std::invalid_argument("unknown preset: " + preset);
  }
  return cfg;
}

void run_replicates(int n, int threads, const std::function<void(int)>& work) {
  if (n <= 0) return;
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto loop = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

uint64_t derive_seed(uint64_t master, uint64_t salt, uint64_t index) {
  auto mix = [](uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  uint64_t h = mix(master + 0x9E3779B97F4A7C15ULL * (salt + 1));
  return mix(h + 0x9E3779B97F4A7C15ULL * (index + 1));
}

TvEstimate tv_ternary(const std::vector<TernaryCounts>& a,
                      const std::vector<TernaryCounts>& b, int n_boot,
                      uint64_t boot_seed) {
  TvEstimate est;
  est.tv = tv3(pooled_law(a), pooled_law(b));
  Rng rng(boot_seed, 0);
  std::vector<double> tvs;
  tvs.reserve(static_cast<size_t>(std::max(n_boot, 0)));
  for (int i = 0; i < n_boot; ++i) {
    const std::vector<int> ia = resample_indices(a.size(), rng);
    const std::vector<int> ib = resample_indices(b.size(), rng);
    tvs.push_back(tv3(pooled_law(a, &ia), pooled_law(b, &ib)));
  }
  est.se = bootstrap_se(tvs);
  return est;
}

TvEstimate tv_ternary_exact(const std::vector<TernaryCounts>& a,
                            const std::array<double, 3>& q, int n_boot,
                            uint64_t boot_seed) {
  TvEstimate est;
  est.tv = tv3(pooled_law(a), q);
  Rng rng(boot_seed, 0);
  std::vector<double> tvs;
  tvs.reserve(static_cast<size_t>(std::max(n_boot, 0)));
  for (int i = 0; i < n_boot; ++i) {
    const std::vector<int> ia = resample_indices(a.size(), rng);
    tvs.push_back(tv3(pooled_law(a, &ia), q));
  }
  est.se = bootstrap_se(tvs);
  return est;
}

std::array<double, 3> pairwise_class_correlation(
    const std::vector<TernaryCounts>& reps, int M) {
  std::array<double, 3> corr = {0.0, 0.0, 0.0};
  if (reps.empty() || M < 2) return corr;
  const double R = static_cast<double>(reps.size());
  for (int c = 0; c < 3; ++c) {
    double s1 = 0.0, s2 = 0.0;
    for (const TernaryCounts& rc : reps) {
      const double n = static_cast<double>(rc[c]);
      s1 += n;
      s2 += n * (n - 1.0);
    }
    const double p = s1 / (R * M);
    const double p2 = s2 / (R * M * (M - 1.0));
    const double var = p * (1.0 - p);
    corr[c] = var > 0.0 ? (p2 - p * p) / var : 0.0;
  }
  return corr;
}

std::vector<std::string> config_header_lines(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("# preset = " + cfg.preset);
  for (const std::string& l : config_lines(cfg.params, cfg.seed))
    lines.push_back("# " + l);
  lines.push_back("# replicates = " + std::to_string(cfg.replicates));
  lines.push_back("# t_end = " + fmt_g(cfg.t_end));
  lines.push_back("# sample_dt = " + fmt_g(cfg.sample_dt));
  lines.push_back("# delta = " + fmt_g(cfg.delta));
  lines.push_back("# t_max = " + fmt_g(cfg.t_max));
  lines.push_back("# v0 = " + fmt_g(cfg.v0[0]) + "," + fmt_g(cfg.v0[1]) + "," +
                  fmt_g(cfg.v0[2]));
  lines.push_back("# n_grid = " + join_ints(cfg.n_grid));
  lines.push_back("# m_grid = " + join_ints(cfg.m_grid));
  lines.push_back("# eta_grid = " + join_doubles(cfg.eta_grid));
  lines.push_back("# r_grid = " + join_doubles(cfg.r_grid));
  lines.push_back("# t_grid = " + join_doubles(cfg.t_grid));
  lines.push_back("# tree_samples = " + std::to_string(cfg.tree_samples));
  return lines;
}

std::string manifest_json(const ExperimentConfig& cfg,
                          const std::vector<EmittedFile>& files) {
  nlohmann::json j;
  j["preset"] = cfg.preset;
  j["seed"] = cfg.seed;
  nlohmann::json arr = nlohmann::json::array();
  for (const EmittedFile& f : files) {
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(f.checksum));
    arr.push_back({{"name", f.name}, {"fnv1a64", std::string(hex)}});
  }
  j["files"] = arr;
  return j.dump(2) + "\n";
}

namespace {

// Collects emitted files, writes the manifest last, and removes everything
// it created if the preset throws midway.
class Emitter {
 public:
  Emitter(const ExperimentConfig& cfg) : cfg_(cfg) {
    std::filesystem::create_directories(cfg.out_dir);
  }

  void emit(const std::string& name, const std::string& content) {
    const std::string path = cfg_.out_dir + "/" + name;
    write_text_file(path, content);
    files_.push_back({name, fnv1a64(content.data(), content.size())});
  }

  void finalize() {
    write_text_file(cfg_.out_dir + "/manifest.json",
                    manifest_json(cfg_, files_));
  }

  void cleanup() {
    std::error_code ec;
    for (const EmittedFile& f : files_)
      std::filesystem::remove(cfg_.out_dir + "/" + f.name, ec);
    std::filesystem::remove(cfg_.out_dir + "/manifest.json", ec);
  }

  const std::vector<EmittedFile>& files() const { return files_; }

 private:
  const ExperimentConfig& cfg_;
  std::vector<EmittedFile> files_;
};

std::string csv_head(const ExperimentConfig& cfg, const std::string& columns) {
  std::string out;
  for (const std::string& l : config_header_lines(cfg)) {
    out += l;
    out += '\n';
  }
  out += columns;
  out += '\n';
  return out;
}

// Maps a requested comparison time onto the sample grid.
size_t grid_index(double t, double sample_dt) {
  const double j = t / sample_dt;
  const long jl = std::lround(j);
  if (jl < 0 || std::abs(j - static_cast<double>(jl)) > 1e-9)
    throw std::invalid_argument(
        "t_grid times must be multiples of sample_dt");
  return static_cast<size_t>(jl);
}

TernaryCounts masses_to_counts(const ClassMasses& m, int M) {
  return {std::lround(m.z0 * M), std::lround(m.zeta * M),
          std::lround(m.z1 * M)};
}

void preset_convergence(const ExperimentConfig& cfg, Emitter& em) {
  const int M = cfg.params.M;
  const int c0_init = M / 2;
  const int c1_init = M - c0_init;
  std::vector<double> times;
  for (double t : cfg.t_grid)
    if (t <= cfg.t_end + 1e-12) times.push_back(t);
  if (times.empty())
    throw std::invalid_argument("convergence-N: empty comparison time grid");

  std::string csv = csv_head(
      cfg, "N,t,tv_exact,tv_exact_se,tv_mc,tv_mc_se,transient_frac");

  // The Y^M side does not depend on N: simulate one ensemble, reuse per N.
  std::vector<limit::HostTernary> y_init;
  y_init.insert(y_init.end(), c0_init, limit::HostTernary::Zero);
  y_init.insert(y_init.end(), c1_init, limit::HostTernary::One);
  const int R = cfg.replicates;
  std::vector<Trajectory> y_runs(static_cast<size_t>(R));
  run_replicates(R, cfg.threads, [&](int rep) {
    y_runs[static_cast<size_t>(rep)] = limit::simulate_ym(
        M, cfg.params.eta, cfg.params.r, y_init, cfg.t_end, cfg.sample_dt,
        derive_seed(cfg.seed, 2, static_cast<uint64_t>(rep)));
  });

  for (size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    ModelParams p = cfg.params;
    p.N = cfg.n_grid[ni];
    (void)derive_scales(p);  // validate early
    std::vector<int> x_init(static_cast<size_t>(M), 0);
    for (int i = c0_init; i < M; ++i) x_init[static_cast<size_t>(i)] = p.N;

    std::vector<Trajectory> x_runs(static_cast<size_t>(R));
    run_replicates(R, cfg.threads, [&](int rep) {
      x_runs[static_cast<size_t>(rep)] = ssa::simulate(
          p, x_init, cfg.t_end, cfg.sample_dt,
          derive_seed(cfg.seed, 100 + ni, static_cast<uint64_t>(rep)));
    });

    for (double t : times) {
      const size_t j = grid_index(t, cfg.sample_dt);
      std::vector<TernaryCounts> xc, yc;
      xc.reserve(static_cast<size_t>(R));
      yc.reserve(static_cast<size_t>(R));
      int64_t transient = 0;
      for (const Trajectory& tr : x_runs) {
        const ClassMasses& m = tr.samples.at(j).mass;
        xc.push_back(masses_to_counts(m, M));
        transient += std::lround(m.ztrans * M);
      }
      for (const Trajectory& tr : y_runs)
        yc.push_back(masses_to_counts(tr.samples.at(j).mass, M));

      const limit::ZmLaw law = limit::zm_exact_law(
          M, cfg.params.eta, cfg.params.r, {c0_init, 0, c1_init}, t);
      const TernaryWeights mw = law.mean_weights();
      const std::array<double, 3> exact = {mw.z0, mw.zeta, mw.z1};

      const TvEstimate tve = tv_ternary_exact(
          xc, exact, 200, derive_seed(cfg.seed, 300 + ni, j));
      const TvEstimate tvm =
          tv_ternary(xc, yc, 200, derive_seed(cfg.seed, 400 + ni, j));
      const double tfrac =
          static_cast<double>(transient) / (static_cast<double>(R) * M);
      csv += std::to_string(p.N) + "," + fmt_g(t) + "," + fmt_g(tve.tv) + "," +
             fmt_g(tve.se) + "," + fmt_g(tvm.tv) + "," + fmt_g(tvm.se) + "," +
             fmt_g(tfrac) + "\n";
    }
  }
  em.emit("convergence.csv", csv);
}

void preset_chaos(const ExperimentConfig& cfg, Emitter& em) {
  const double eta = cfg.params.eta, r = cfg.params.r;
  const ode::Path path = ode::integrate({cfg.v0[0], cfg.v0[1], cfg.v0[2]},
                                        cfg.t_end, eta, r);
  std::string csv =
      csv_head(cfg, "M,t,corr0,corr_eta,corr1,max_tv_z_ode,max_dev_y_z");

  for (size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const int M = cfg.m_grid[mi];
    const int c0 = static_cast<int>(std::lround(cfg.v0[0] * M));
    const int ce = static_cast<int>(std::lround(cfg.v0[1] * M));
    const int c1 = M - c0 - ce;
    if (c0 < 0 || ce < 0 || c1 < 0)
      throw std::invalid_argument("chaos-M: v0 not representable at this M");
    std::vector<limit::HostTernary> y_init;
    y_init.insert(y_init.end(), c0, limit::HostTernary::Zero);
    y_init.insert(y_init.end(), ce, limit::HostTernary::Eta);
    y_init.insert(y_init.end(), c1, limit::HostTernary::One);

    const int R = cfg.replicates;
    std::vector<Trajectory> y_runs(static_cast<size_t>(R)),
        z_runs(static_cast<size_t>(R));
    run_replicates(R, cfg.threads, [&](int rep) {
      y_runs[static_cast<size_t>(rep)] = limit::simulate_ym(
          M, eta, r, y_init, cfg.t_end, cfg.sample_dt,
          derive_seed(cfg.seed, 500 + mi, static_cast<uint64_t>(rep)));
      z_runs[static_cast<size_t>(rep)] = limit::simulate_zm(
          M, eta, r, {c0, ce, c1}, cfg.t_end, cfg.sample_dt,
          derive_seed(cfg.seed, 600 + mi, static_cast<uint64_t>(rep)));
    });

    // Terminal-time pairwise correlation (propagation of chaos diagnostic).
    std::vector<TernaryCounts> terminal;
    terminal.reserve(static_cast<size_t>(R));
    for (const Trajectory& tr : y_runs)
      terminal.push_back(masses_to_counts(tr.samples.back().mass, M));
    const std::array<double, 3> corr = pairwise_class_correlation(terminal, M);

    // Mean Z^M path vs the ODE; mean Y^M vs mean Z^M.
    const size_t n_samples = z_runs.front().samples.size();
    double max_tv = 0.0, max_dev = 0.0;
    for (size_t j = 0; j < n_samples; ++j) {
      double zm[3] = {0.0, 0.0, 0.0}, ym[3] = {0.0, 0.0, 0.0};
      for (int rep = 0; rep < R; ++rep) {
        const ClassMasses& z = z_runs[static_cast<size_t>(rep)].samples[j].mass;
        const ClassMasses& y = y_runs[static_cast<size_t>(rep)].samples[j].mass;
        zm[0] += z.z0;
        zm[1] += z.zeta;
        zm[2] += z.z1;
        ym[0] += y.z0;
        ym[1] += y.zeta;
        ym[2] += y.z1;
      }
      for (double* v : {zm, ym})
        for (int c = 0; c < 3; ++c) v[c] /= R;
      const double t = z_runs.front().samples[j].t;
      const TernaryWeights v = path.at(t);
      max_tv = std::max(
          max_tv, tv3({zm[0], zm[1], zm[2]}, {v.z0, v.zeta, v.z1}));
      for (int c = 0; c < 3; ++c)
        max_dev = std::max(max_dev, std::abs(ym[c] - zm[c]));
    }
    csv += std::to_string(M) + "," + fmt_g(cfg.t_end) + "," + fmt_g(corr[0]) +
           "," + fmt_g(corr[1]) + "," + fmt_g(corr[2]) + "," + fmt_g(max_tv) +
           "," + fmt_g(max_dev) + "\n";
  }
  em.emit("chaos.csv", csv);
}

void preset_equilibrium_sweep(const ExperimentConfig& cfg, Emitter& em) {
  std::string csv = csv_head(cfg, "eta,r,u0,ueta,u1,rstar,classification");
  for (double eta : cfg.eta_grid)
    for (double r : cfg.r_grid) {
      const ode::EquilibriumReport rep = ode::classify_equilibria(eta, r);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double u0 = nan, ue = nan, u1 = nan;
      std::string cls = "none";
      if (rep.interior) {
        u0 = rep.interior->v.z0;
        ue = rep.interior->v.zeta;
        u1 = rep.interior->v.z1;
        cls = rep.interior->classification;
      }
      csv += fmt_g(eta) + "," + fmt_g(r) + "," + fmt_g(u0) + "," + fmt_g(ue) +
             "," + fmt_g(u1) + "," + fmt_g(rep.r_star) + "," + cls + "\n";
    }
  em.emit("equilibria.csv", csv);

  // Phase-portrait mesh for the configured (eta, r): projected coordinates
  // (v0, v1) with veta = 1 - v0 - v1.
  std::string phase = csv_head(cfg, "v0,v1,dv0,dv1");
  const int mesh = 50;
  for (int i = 0; i <= mesh; ++i)
    for (int j = 0; j + i <= mesh; ++j) {
      const double v0 = static_cast<double>(i) / mesh;
      const double v1 = static_cast<double>(j) / mesh;
      const TernaryWeights f =
          ode::rhs({v0, 1.0 - v0 - v1, v1}, cfg.params.eta, cfg.params.r);
      phase += fmt_g(v0) + "," + fmt_g(v1) + "," + fmt_g(f.z0) + "," +
               fmt_g(f.z1) + "\n";
    }
  em.emit("phase.csv", phase);
}

void preset_tree_vs_ode(const ExperimentConfig& cfg, Emitter& em) {
  const double eta = cfg.params.eta, r = cfg.params.r;
  const TernaryWeights v0 = {cfg.v0[0], cfg.v0[1], cfg.v0[2]};
  double t_max = 0.0;
  for (double t : cfg.t_grid) t_max = std::max(t_max, t);
  const ode::Path path = ode::integrate(v0, t_max, eta, r);

  std::string csv = csv_head(
      cfg,
      "t,ode0,ode_eta,ode1,est0,est_eta,est1,se0,se_eta,se1,max_dev_se");
  for (size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
    const double t = cfg.t_grid[ti];
    const limit::TreeEstimate est = limit::estimate_v_tree(
        t, eta, r, v0, cfg.tree_samples, derive_seed(cfg.seed, 700, ti));
    const TernaryWeights v = path.at(t);
    const double dev[3] = {est.estimate.z0 - v.z0, est.estimate.zeta - v.zeta,
                           est.estimate.z1 - v.z1};
    const double se[3] = {est.se0, est.se_eta, est.se1};
    double max_dev_se = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double scale =
          se[c] > 0.0 ? std::abs(dev[c]) / se[c]
                      : (dev[c] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      max_dev_se = std::max(max_dev_se, scale);
    }
    csv += fmt_g(t) + "," + fmt_g(v.z0) + "," + fmt_g(v.zeta) + "," +
           fmt_g(v.z1) + "," + fmt_g(est.estimate.z0) + "," +
           fmt_g(est.estimate.zeta) + "," + fmt_g(est.estimate.z1) + "," +
           fmt_g(est.se0) + "," + fmt_g(est.se_eta) + "," + fmt_g(est.se1) +
           "," + fmt_g(max_dev_se) + "\n";
  }
  em.emit("tree.csv", csv);
}

void preset_mutation_cycle(const ExperimentConfig& cfg, Emitter& em) {
  const ModelParams& p = cfg.params;
  const Scales sc = derive_scales(p);
  const auto u_opt = ode::interior_equilibrium(p.eta, p.r);
  const TernaryWeights u = *u_opt;  // validate() guarantees existence
  const int M = p.M;
  const int R = cfg.replicates;

  auto in_target = [&](const ClassMasses& m) {
    return std::abs(m.z0 - u.z0) < cfg.delta &&
           std::abs(m.zeta - u.zeta) < cfg.delta &&
           std::abs(m.z1 - u.z1) < cfg.delta;
  };
  auto monomorphic = [](const ClassMasses& m) {
    return m.z0 == 1.0 || m.z1 == 1.0;
  };

  struct RepResult {
    double tau = 0.0;
    bool hit = false;
    uint64_t mut_events = 0;
    double elapsed = 0.0;
  };

  // Stage (a): approach from the monomorphic all-B start.
  std::vector<RepResult> approach(static_cast<size_t>(R));
  const std::vector<int> init0(static_cast<size_t>(M), 0);
  run_replicates(R, cfg.threads, [&](int rep) {
    const ssa::StoppingResult res = ssa::simulate_with_stopping(
        p, init0, in_target, cfg.t_max, cfg.sample_dt,
        derive_seed(cfg.seed, 800, static_cast<uint64_t>(rep)));
    RepResult& out = approach[static_cast<size_t>(rep)];
    out.hit = res.hit_time.has_value();
    out.tau = out.hit ? *res.hit_time : cfg.t_max;
    out.elapsed = res.trajectory.samples.back().t;
    out.mut_events =
        res.trajectory.event_counts[static_cast<size_t>(EventKind::MutateAtoB)] +
        res.trajectory.event_counts[static_cast<size_t>(EventKind::MutateBtoA)];
  });

  // Stage (b): persistence from a start inside the target box.
  const int c0 = static_cast<int>(std::lround(u.z0 * M));
  const int ce = static_cast<int>(std::lround(u.zeta * M));
  const int c1 = M - c0 - ce;
  if (c1 < 0)
    throw std::invalid_argument("mutation-cycle: M too small for the target");
  const int k_eta = static_cast<int>(std::lround(p.eta * p.N));
  std::vector<int> init_w;
  init_w.insert(init_w.end(), static_cast<size_t>(c0), 0);
  init_w.insert(init_w.end(), static_cast<size_t>(ce), k_eta);
  init_w.insert(init_w.end(), static_cast<size_t>(c1), p.N);
  {
    const double dM = static_cast<double>(M);
    if (std::abs(c0 / dM - u.z0) >= cfg.delta ||
        std::abs(ce / dM - u.zeta) >= cfg.delta ||
        std::abs(c1 / dM - u.z1) >= cfg.delta)
      throw std::invalid_argument(
          "mutation-cycle: rounded start lies outside the target box");
  }
  std::vector<RepResult> persist(static_cast<size_t>(R));
  run_replicates(R, cfg.threads, [&](int rep) {
    const ssa::StoppingResult res = ssa::simulate_with_stopping(
        p, init_w, monomorphic, cfg.t_max, cfg.sample_dt,
        derive_seed(cfg.seed, 900, static_cast<uint64_t>(rep)));
    RepResult& out = persist[static_cast<size_t>(rep)];
    out.hit = res.hit_time.has_value();
    out.tau = out.hit ? *res.hit_time : cfg.t_max;
    out.elapsed = res.trajectory.samples.back().t;
    out.mut_events =
        res.trajectory.event_counts[static_cast<size_t>(EventKind::MutateAtoB)] +
        res.trajectory.event_counts[static_cast<size_t>(EventKind::MutateBtoA)];
  });

  // Per-replicate rows.  tau is censored at t_max when hit = 0.
  std::string csv = csv_head(cfg, "stage,replicate,tau,hit");
  for (int rep = 0; rep < R; ++rep) {
    const RepResult& a = approach[static_cast<size_t>(rep)];
    csv += "approach," + std::to_string(rep) + "," + fmt_g(a.tau) + "," +
           std::to_string(a.hit ? 1 : 0) + "\n";
  }
  for (int rep = 0; rep < R; ++rep) {
    const RepResult& b = persist[static_cast<size_t>(rep)];
    csv += "persistence," + std::to_string(rep) + "," + fmt_g(b.tau) + "," +
           std::to_string(b.hit ? 1 : 0) + "\n";
  }
  em.emit("mutation.csv", csv);

  // Summary: medians, persistence fraction, dwell ratio, and the empirical
  // total mutation rate against theta_N.
  std::vector<double> tau_a, tau_b;
  int hits_a = 0, persistent = 0;
  uint64_t mut_total = 0;
  double elapsed_total = 0.0;
  for (int rep = 0; rep < R; ++rep) {
    const RepResult& a = approach[static_cast<size_t>(rep)];
    const RepResult& b = persist[static_cast<size_t>(rep)];
    tau_a.push_back(a.tau);
    tau_b.push_back(b.tau);
    hits_a += a.hit ? 1 : 0;
    persistent += b.hit ? 0 : 1;
    mut_total += a.mut_events + b.mut_events;
    elapsed_total += a.elapsed + b.elapsed;
  }
  const double med_a = median(tau_a);
  const double med_b = median(tau_b);
  const double emp_rate = elapsed_total > 0.0 ? mut_total / elapsed_total : 0.0;
  const double emp_se =
      elapsed_total > 0.0 ? std::sqrt(static_cast<double>(mut_total)) / elapsed_total : 0.0;
  std::string sum = csv_head(
      cfg,
      "theta_N,median_tau_target,approach_hits,persistent_frac,"
      "median_tau_mono,dwell_ratio,mut_events,elapsed,empirical_rate,rate_se");
  sum += fmt_g(sc.theta_N) + "," + fmt_g(med_a) + "," +
         std::to_string(hits_a) + "," +
         fmt_g(static_cast<double>(persistent) / R) + "," + fmt_g(med_b) +
         "," + fmt_g(med_a > 0.0 ? med_b / med_a : 0.0) + "," +
         std::to_string(mut_total) + "," + fmt_g(elapsed_total) + "," +
         fmt_g(emp_rate) + "," + fmt_g(emp_se) + "\n";
  em.emit("mutation_summary.csv", sum);
}

}  // namespace

int run_preset(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), cfg.preset) == names.end())
    throw std::invalid_argument("unknown preset: " + cfg.preset);
  Emitter em(cfg);
  try {
    if (cfg.preset == "convergence-N")
      preset_convergence(cfg, em);
    else if (cfg.preset == "chaos-M")
      preset_chaos(cfg, em);
    else if (cfg.preset == "equilibrium-sweep")
      preset_equilibrium_sweep(cfg, em);
    else if (cfg.preset == "tree-vs-ode")
      preset_tree_vs_ode(cfg, em);
    else
      preset_mutation_cycle(cfg, em);
    em.finalize();
  } catch (...) {
    em.cleanup();
    throw;
  }
  return 0;
}

}  // namespace parasim::experiments
