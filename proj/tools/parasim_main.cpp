// parasim: command-line front end for the multiscale two-type parasite
// population toolkit.  Subcommands cover the finite-model engine, the limit
// processes, the mean-field ODE, single-host hitting analytics, the ancestral
// tree estimator, and the reproducible experiment presets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "parasim/config.hpp"
#include "parasim/excursion.hpp"
#include "parasim/experiments.hpp"
#include "parasim/limit.hpp"
#include "parasim/ode.hpp"
#include "parasim/ssa.hpp"
#include "parasim/trajectory.hpp"

namespace {

using parasim::ClassMasses;
using parasim::ModelParams;
using parasim::RunConfig;
using parasim::TernaryWeights;
using parasim::Trajectory;
namespace experiments = parasim::experiments;
namespace excursion = parasim::excursion;
namespace limit = parasim::limit;
namespace ode = parasim::ode;
namespace ssa = parasim::ssa;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) parts.push_back(cur);
  return parts;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& p : split_commas(s)) out.push_back(std::stoi(p));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& p : split_commas(s)) out.push_back(std::stod(p));
  return out;
}

// Shared flags: configuration source, seed override, output directory,
// replicate count and worker threads.
struct Common {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  int replicates = 1;
  bool replicates_set = false;
  int threads = 1;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "model config file (keys: N, M, eta, b, r, g_N, a, eps, "
                    "eps1, u_N, seed)");
    auto* s = sub->add_option("--seed", seed, "master seed (overrides config)");
    s->each([this](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_dir, "output directory");
    auto* rep = sub->add_option("--replicates", replicates,
                                "number of replicates")
                    ->check(CLI::PositiveNumber);
    rep->each([this](const std::string&) { replicates_set = true; });
    sub->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
  }

  RunConfig resolve(const ModelParams& fallback) const {
    RunConfig rc;
    rc.params = fallback;
    rc.seed = 1;
    if (!config_path.empty()) rc = parasim::load_config(config_path);
    if (seed_set) rc.seed = seed;
    return rc;
  }
};

// Writes `content` into out_dir/name and records it for the manifest.
struct Sink {
  std::string out_dir;
  std::vector<experiments::EmittedFile> files;

  void put(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(out_dir);
    parasim::write_text_file(out_dir + "/" + name, content);
    files.push_back({name, parasim::fnv1a64(content.data(), content.size())});
    std::printf("wrote %s/%s\n", out_dir.c_str(), name.c_str());
  }

  void manifest(const std::string& tool, uint64_t seed) {
    experiments::ExperimentConfig cfg;
    cfg.preset = tool;
    cfg.seed = seed;
    cfg.out_dir = out_dir;
    parasim::write_text_file(out_dir + "/manifest.json",
                             experiments::manifest_json(cfg, files));
    std::printf("wrote %s/manifest.json\n", out_dir.c_str());
  }
};

// Raw header lines; the CSV writers prepend the '#' comment marker.
std::vector<std::string> run_header(const RunConfig& rc, double t_end,
                                    double sample_dt) {
  std::vector<std::string> lines = parasim::config_lines(rc.params, rc.seed);
  lines.push_back("t_end = " + fmt_g(t_end));
  lines.push_back("sample_dt = " + fmt_g(sample_dt));
  return lines;
}

std::vector<int> parse_finite_init(const std::string& spec, int N, int M,
                                   double eta) {
  std::vector<int> k(static_cast<size_t>(M), 0);
  if (spec == "zero") return k;
  if (spec == "one") {
    std::fill(k.begin(), k.end(), N);
    return k;
  }
  if (spec == "half") {
    for (int i = M / 2; i < M; ++i) k[static_cast<size_t>(i)] = N;
    return k;
  }
  if (spec == "eta") {
    std::fill(k.begin(), k.end(), static_cast<int>(std::lround(eta * N)));
    return k;
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw std::runtime_error("cannot open init file: " + spec.substr(5));
    std::string line;
    std::vector<int> vals;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line == "host,k") continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error("malformed init snapshot line: " + line);
      vals.push_back(std::stoi(line.substr(comma + 1)));
    }
    if (static_cast<int>(vals.size()) != M)
      throw std::runtime_error("init snapshot must list exactly M hosts");
    return vals;
  }
  throw std::runtime_error(
      "unknown --init (use zero | one | half | eta | file:<path>)");
}

limit::ZmCounts parse_ternary_init(const std::string& spec, int M) {
  if (spec == "half") return {M / 2, 0, M - M / 2};
  const std::vector<int> c = parse_int_list(spec);
  if (c.size() != 3 || c[0] < 0 || c[1] < 0 || c[2] < 0 ||
      c[0] + c[1] + c[2] != M)
    throw std::runtime_error(
        "--init must be 'half' or c0,ceta,c1 summing to M");
  return {c[0], c[1], c[2]};
}

int cmd_simulate_finite(const Common& common, double t_end, double sample_dt,
                        const std::string& init_spec, bool events,
                        bool snapshots) {
  const RunConfig rc = common.resolve(ModelParams{});
  const std::vector<int> init =
      parse_finite_init(init_spec, rc.params.N, rc.params.M, rc.params.eta);
  Sink sink{common.out_dir, {}};
  const std::vector<std::string> header = run_header(rc, t_end, sample_dt);
  for (int rep = 0; rep < common.replicates; ++rep) {
    std::vector<parasim::EventRecord> log;
    Trajectory traj = ssa::simulate(
        rc.params, init, t_end, sample_dt,
        experiments::derive_seed(rc.seed, 11, static_cast<uint64_t>(rep)), {},
        events ? &log : nullptr, false);
    const std::string tag =
        common.replicates == 1 ? "" : "_" + std::to_string(rep);
    sink.put("trajectory" + tag + ".csv",
             parasim::trajectory_csv(traj, header));
    if (snapshots)
      sink.put("snapshot" + tag + ".csv",
               parasim::snapshot_csv(traj.terminal_state, header));
    if (events) sink.put("events" + tag + ".jsonl", parasim::event_jsonl(log));
  }
  sink.manifest("simulate-finite", rc.seed);
  return 0;
}

int cmd_simulate_limit(const Common& common, double t_end, double sample_dt,
                       const std::string& init_spec, bool zm) {
  ModelParams fallback;
  fallback.M = 50;
  const RunConfig rc = common.resolve(fallback);
  const limit::ZmCounts init = parse_ternary_init(init_spec, rc.params.M);
  Sink sink{common.out_dir, {}};
  const std::vector<std::string> header = run_header(rc, t_end, sample_dt);
  for (int rep = 0; rep < common.replicates; ++rep) {
    const uint64_t s =
        experiments::derive_seed(rc.seed, zm ? 13 : 12, static_cast<uint64_t>(rep));
    Trajectory traj;
    if (zm) {
      traj = limit::simulate_zm(rc.params.M, rc.params.eta, rc.params.r, init,
                                t_end, sample_dt, s);
    } else {
      std::vector<limit::HostTernary> y;
      y.insert(y.end(), init.c0, limit::HostTernary::Zero);
      y.insert(y.end(), init.ce, limit::HostTernary::Eta);
      y.insert(y.end(), init.c1, limit::HostTernary::One);
      traj = limit::simulate_ym(rc.params.M, rc.params.eta, rc.params.r, y,
                                t_end, sample_dt, s);
    }
    const std::string tag =
        common.replicates == 1 ? "" : "_" + std::to_string(rep);
    sink.put(std::string(zm ? "zm" : "ym") + tag + ".csv",
             parasim::trajectory_csv(traj, header));
  }
  sink.manifest(zm ? "simulate-zm" : "simulate-ym", rc.seed);
  return 0;
}

int cmd_ode(const Common& common, double eta, double r,
            const std::string& v0_spec, double t_end, double dt) {
  const std::vector<double> v = parse_double_list(v0_spec);
  if (v.size() != 3) throw std::runtime_error("--v0 must be v0,veta,v1");
  const TernaryWeights v0{v[0], v[1], v[2]};
  const ode::Path path = ode::integrate(v0, t_end, eta, r);
  std::string csv;
  csv += "# eta = " + fmt_g(eta) + "\n# r = " + fmt_g(r) + "\n";
  csv += "# v0 = " + v0_spec + "\n";
  csv += "t,v0,veta,v1\n";
  const long steps = std::lround(t_end / dt);
  for (long j = 0; j <= steps; ++j) {
    const double t = std::min(j * dt, t_end);
    const TernaryWeights w = path.at(t);
    csv += fmt_g(t) + "," + fmt_g(w.z0) + "," + fmt_g(w.zeta) + "," +
           fmt_g(w.z1) + "\n";
  }
  Sink sink{common.out_dir, {}};
  sink.put("ode.csv", csv);
  sink.manifest("ode", common.seed_set ? common.seed : 0);
  const TernaryWeights w = path.at(t_end);
  std::printf("terminal state: (%.12g, %.12g, %.12g)\n", w.z0, w.zeta, w.z1);
  return 0;
}

int cmd_balance_prob(const Common& common, const std::string& n_list, double b,
                     double eta, double g, const std::string& side_name) {
  const excursion::Side side = side_name == "one"
                                   ? excursion::Side::FromOne
                                   : excursion::Side::FromZero;
  std::string csv = "# side = " + side_name + "\n";
  csv += "N,b,eta,exact,asymptotic,ratio\n";
  std::string rows;
  for (int N : parse_int_list(n_list)) {
    excursion::BirthDeathSpec spec;
    spec.N = N;
    spec.g_N = g;
    spec.s_N = std::pow(static_cast<double>(N), -b);
    spec.eta = eta;
    int start, target, absorb;
    if (side == excursion::Side::FromZero) {
      start = 1;
      target = static_cast<int>(std::ceil(eta * N));
      absorb = 0;
    } else {
      start = N - 1;
      target = static_cast<int>(std::floor(eta * N));
      absorb = N;
    }
    const double exact = excursion::balance_prob_exact(spec, start, target, absorb);
    const double asym = excursion::balance_prob_asymptotic(eta, spec.s_N, side);
    rows += std::to_string(N) + "," + fmt_g(b) + "," + fmt_g(eta) + "," +
            fmt_g(exact) + "," + fmt_g(asym) + "," + fmt_g(exact / asym) + "\n";
  }
  Sink sink{common.out_dir, {}};
  sink.put("balance.csv", csv + rows);
  sink.manifest("balance-prob", common.seed_set ? common.seed : 0);
  std::fputs(rows.c_str(), stdout);
  return 0;
}

int cmd_time_to_balance(const Common& common, size_t reps, double time_bound,
                        const std::string& method_name,
                        const std::string& side_name) {
  ModelParams fallback;
  fallback.N = 2000;
  fallback.a = 0.4;
  fallback.eps = 0.2;
  const RunConfig rc = common.resolve(fallback);
  const parasim::Scales sc = parasim::derive_scales(rc.params);
  excursion::BirthDeathSpec spec;
  spec.N = rc.params.N;
  spec.g_N = sc.g_N;
  spec.s_N = sc.s_N;
  spec.eta = rc.params.eta;
  int start, target;
  if (side_name == "one") {
    start = rc.params.N - 1;
    target = static_cast<int>(std::floor(sc.windows.d_hi * rc.params.N));
  } else {
    start = 1;
    target = static_cast<int>(std::ceil(sc.windows.d_lo * rc.params.N));
  }
  if (time_bound <= 0.0) {
    // Reference bound N^(b(1+a)+eps) within-host steps, i.e. divided by g_N
    // on the host time scale.
    time_bound = std::pow(rc.params.N, rc.params.b * (1.0 + rc.params.a) +
                                           rc.params.eps) /
                 sc.g_N;
  }
  excursion::Conditioning method = excursion::Conditioning::Auto;
  if (method_name == "rejection") method = excursion::Conditioning::Rejection;
  if (method_name == "doob") method = excursion::Conditioning::DoobTransform;
  const excursion::HittingStats st = excursion::time_to_balance_mc(
      spec, start, target, reps, rc.seed, time_bound, method);
  std::string csv =
      "N,quantile05,quantile50,quantile95,quantile99,bound,frac_below_bound\n";
  csv += std::to_string(rc.params.N) + "," + fmt_g(st.q05) + "," +
         fmt_g(st.q50) + "," + fmt_g(st.q95) + "," + fmt_g(st.q99) + "," +
         fmt_g(st.time_bound) + "," + fmt_g(st.fraction_below) + "\n";
  Sink sink{common.out_dir, {}};
  sink.put("timing.csv", csv);
  sink.manifest("time-to-balance", rc.seed);
  std::printf("hit probability %.6g (SE %.2g), %zu conditioned samples\n",
              st.probability, st.std_error, st.n_samples);
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{
      "parasim: multiscale simulation toolkit for a two-type parasite "
      "population distributed over hosts"};
  app.require_subcommand(1);

  // simulate-finite
  auto* sf = app.add_subcommand("simulate-finite",
                                "run the finite-population engine");
  Common sf_common;
  sf_common.attach(sf);
  double sf_t_end = 2.0, sf_dt = 0.1;
  std::string sf_init = "half";
  bool sf_events = false, sf_snap = false;
  sf->add_option("--t-end", sf_t_end, "simulation horizon (host time)");
  sf->add_option("--sample-dt", sf_dt, "sample grid spacing");
  sf->add_option("--init", sf_init,
                 "initial hosts: zero | one | half | eta | file:<snapshot>");
  sf->add_flag("--events", sf_events, "write per-event JSONL logs");
  sf->add_flag("--snapshots", sf_snap, "write terminal host,k snapshots");

  // simulate-ym / simulate-zm
  auto* sy = app.add_subcommand("simulate-ym", "run the M-host limit process");
  Common sy_common;
  sy_common.attach(sy);
  double sy_t_end = 2.0, sy_dt = 0.1;
  std::string sy_init = "half";
  sy->add_option("--t-end", sy_t_end, "simulation horizon");
  sy->add_option("--sample-dt", sy_dt, "sample grid spacing");
  sy->add_option("--init", sy_init, "half or c0,ceta,c1 counts summing to M");

  auto* sz = app.add_subcommand("simulate-zm",
                                "run the aggregated count process");
  Common sz_common;
  sz_common.attach(sz);
  double sz_t_end = 2.0, sz_dt = 0.1;
  std::string sz_init = "half";
  sz->add_option("--t-end", sz_t_end, "simulation horizon");
  sz->add_option("--sample-dt", sz_dt, "sample grid spacing");
  sz->add_option("--init", sz_init, "half or c0,ceta,c1 counts summing to M");

  // ode
  auto* od = app.add_subcommand("ode", "integrate the mean-field system");
  Common od_common;
  od_common.attach(od);
  double od_eta = 0.5, od_r = 2.0, od_t_end = 10.0, od_dt = 0.1;
  std::string od_v0 = "0.3,0.3,0.4";
  od->add_option("--eta", od_eta, "preferred frequency");
  od->add_option("--r", od_r, "reinfection constant");
  od->add_option("--v0", od_v0, "initial ternary weights v0,veta,v1");
  od->add_option("--t-end", od_t_end, "integration horizon");
  od->add_option("--dt", od_dt, "output grid spacing");

  // equilibria
  auto* eq = app.add_subcommand(
      "equilibria", "closed-form equilibria and stability over an (eta, r) grid");
  Common eq_common;
  eq_common.attach(eq);
  std::string eq_eta_grid = "0.3,0.4,0.5,0.6,0.7";
  std::string eq_r_grid = "0.5,1,1.5,2,3,4";
  double eq_eta = 0.5, eq_r = 2.0;
  eq->add_option("--eta-grid", eq_eta_grid, "comma list of eta values");
  eq->add_option("--r-grid", eq_r_grid, "comma list of r values");
  eq->add_option("--eta", eq_eta, "eta for the phase-portrait mesh");
  eq->add_option("--r", eq_r, "r for the phase-portrait mesh");

  // balance-prob
  auto* bp = app.add_subcommand(
      "balance-prob", "exact vs asymptotic probability of balance");
  Common bp_common;
  bp_common.attach(bp);
  std::string bp_n = "1000,10000,100000", bp_side = "zero";
  double bp_b = 0.55, bp_eta = 0.5, bp_g = 1.0;
  bp->add_option("--N-grid", bp_n, "comma list of N values");
  bp->add_option("--b", bp_b, "selection exponent");
  bp->add_option("--eta", bp_eta, "preferred frequency");
  bp->add_option("--g", bp_g, "within-host speed");
  bp->add_option("--side", bp_side, "zero | one");

  // time-to-balance
  auto* tb = app.add_subcommand(
      "time-to-balance", "conditional hitting-time quantiles (Monte Carlo)");
  Common tb_common;
  tb_common.attach(tb);
  size_t tb_reps = 10000;
  double tb_bound = 0.0;
  std::string tb_method = "auto", tb_side = "zero";
  tb->add_option("--samples", tb_reps, "conditioned samples to collect");
  tb->add_option("--time-bound", tb_bound,
                 "reference bound (default N^(b(1+a)+eps)/g_N)");
  tb->add_option("--method", tb_method, "auto | rejection | doob");
  tb->add_option("--side", tb_side, "zero | one");

  // tree-estimate
  auto* te = app.add_subcommand("tree-estimate",
                                "ancestral-tree estimator vs the ODE");
  Common te_common;
  te_common.attach(te);
  std::string te_t_grid = "0.5,1,2", te_v0 = "0.3,0.3,0.4";
  double te_eta = 0.5, te_r = 2.0;
  size_t te_samples = 100000;
  te->add_option("--t-grid", te_t_grid, "comma list of times");
  te->add_option("--eta", te_eta, "preferred frequency");
  te->add_option("--r", te_r, "reinfection constant");
  te->add_option("--v0", te_v0, "leaf law v0,veta,v1");
  te->add_option("--samples", te_samples, "tree samples per time");

  // preset
  auto* pr = app.add_subcommand("preset", "run a named experiment preset");
  Common pr_common;
  pr_common.attach(pr);
  std::string pr_name;
  pr->add_option("name", pr_name,
                 "convergence-N | chaos-M | equilibrium-sweep | tree-vs-ode | "
                 "mutation-cycle")
      ->required();
  double pr_t_end = -1.0, pr_dt = -1.0, pr_delta = -1.0, pr_t_max = -1.0;
  std::string pr_n_grid, pr_m_grid, pr_eta_grid, pr_r_grid, pr_t_grid, pr_v0;
  long long pr_tree_samples = -1;
  int pr_replicates = -1;
  pr->add_option("--t-end", pr_t_end, "override horizon");
  pr->add_option("--sample-dt", pr_dt, "override sample grid spacing");
  pr->add_option("--delta", pr_delta, "mutation-cycle target half-width");
  pr->add_option("--t-max", pr_t_max, "mutation-cycle horizon");
  pr->add_option("--n-grid", pr_n_grid, "override N grid");
  pr->add_option("--m-grid", pr_m_grid, "override M grid");
  pr->add_option("--eta-grid", pr_eta_grid, "override eta grid");
  pr->add_option("--r-grid", pr_r_grid, "override r grid");
  pr->add_option("--t-grid", pr_t_grid, "override comparison times");
  pr->add_option("--tree-samples", pr_tree_samples, "override tree samples");
  pr->add_option("--v0", pr_v0, "override initial ternary weights");
  pr->add_option("--preset-replicates", pr_replicates,
                 "kept for compatibility; same as --replicates");

  CLI11_PARSE(app, argc, argv);

  if (sf->parsed())
    return cmd_simulate_finite(sf_common, sf_t_end, sf_dt, sf_init, sf_events,
                               sf_snap);
  if (sy->parsed())
    return cmd_simulate_limit(sy_common, sy_t_end, sy_dt, sy_init, false);
  if (sz->parsed())
    return cmd_simulate_limit(sz_common, sz_t_end, sz_dt, sz_init, true);
  if (od->parsed())
    return cmd_ode(od_common, od_eta, od_r, od_v0, od_t_end, od_dt);
  if (eq->parsed()) {
    experiments::ExperimentConfig cfg =
        experiments::default_config("equilibrium-sweep");
    if (!eq_common.config_path.empty())
      cfg.params = parasim::load_config(eq_common.config_path).params;
    cfg.params.eta = eq_eta;
    cfg.params.r = eq_r;
    cfg.eta_grid = parse_double_list(eq_eta_grid);
    cfg.r_grid = parse_double_list(eq_r_grid);
    if (eq_common.seed_set) cfg.seed = eq_common.seed;
    cfg.out_dir = eq_common.out_dir;
    cfg.threads = eq_common.threads;
    return experiments::run_preset(cfg);
  }
  if (bp->parsed())
    return cmd_balance_prob(bp_common, bp_n, bp_b, bp_eta, bp_g, bp_side);
  if (tb->parsed())
    return cmd_time_to_balance(tb_common, tb_reps, tb_bound, tb_method,
                               tb_side);
  if (te->parsed()) {
    experiments::ExperimentConfig cfg =
        experiments::default_config("tree-vs-ode");
    cfg.params.eta = te_eta;
    cfg.params.r = te_r;
    cfg.t_grid = parse_double_list(te_t_grid);
    const std::vector<double> v = parse_double_list(te_v0);
    if (v.size() != 3) throw std::runtime_error("--v0 must be v0,veta,v1");
    for (int c = 0; c < 3; ++c) cfg.v0[c] = v[c];
    cfg.tree_samples = te_samples;
    if (te_common.seed_set) cfg.seed = te_common.seed;
    cfg.out_dir = te_common.out_dir;
    cfg.threads = te_common.threads;
    return experiments::run_preset(cfg);
  }
  if (pr->parsed()) {
    experiments::ExperimentConfig cfg = experiments::default_config(pr_name);
    if (!pr_common.config_path.empty()) {
      const RunConfig rc = parasim::load_config(pr_common.config_path);
      cfg.params = rc.params;
      cfg.seed = rc.seed;
    }
    if (pr_common.seed_set) cfg.seed = pr_common.seed;
    cfg.out_dir = pr_common.out_dir;
    cfg.threads = pr_common.threads;
    if (pr_common.replicates_set) cfg.replicates = pr_common.replicates;
    if (pr_replicates > 0) cfg.replicates = pr_replicates;
    if (pr_t_end > 0.0) cfg.t_end = pr_t_end;
    if (pr_dt > 0.0) cfg.sample_dt = pr_dt;
    if (pr_delta > 0.0) cfg.delta = pr_delta;
    if (pr_t_max > 0.0) cfg.t_max = pr_t_max;
    if (!pr_n_grid.empty()) cfg.n_grid = parse_int_list(pr_n_grid);
    if (!pr_m_grid.empty()) cfg.m_grid = parse_int_list(pr_m_grid);
    if (!pr_eta_grid.empty()) cfg.eta_grid = parse_double_list(pr_eta_grid);
    if (!pr_r_grid.empty()) cfg.r_grid = parse_double_list(pr_r_grid);
    if (!pr_t_grid.empty()) cfg.t_grid = parse_double_list(pr_t_grid);
    if (pr_tree_samples > 0)
      cfg.tree_samples = static_cast<size_t>(pr_tree_samples);
    if (!pr_v0.empty()) {
      const std::vector<double> v = parse_double_list(pr_v0);
      if (v.size() != 3) throw std::runtime_error("--v0 must be v0,veta,v1");
      for (int c = 0; c < 3; ++c) cfg.v0[c] = v[c];
    }
    return experiments::run_preset(cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return main_impl(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
