#pragma once

// Experiment presets, replicate orchestration, and the statistics shared by
// the command-line front end and the acceptance suite.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parasim/model.hpp"
#include "parasim/trajectory.hpp"

namespace parasim::experiments {

struct ExperimentConfig {
  std::string preset;
  ModelParams params;
  uint64_t seed = 1;
  int replicates = 16;
  int threads = 1;
  double t_end = 2.0;
  double sample_dt = 0.25;
  std::string out_dir = ".";

  // Preset-specific knobs.
  double delta = 0.1;               // mutation-cycle: half-width of the target box
  double t_max = 500.0;             // mutation-cycle: persistence horizon
  double v0[3] = {0.3, 0.3, 0.4};   // ternary initial condition (chaos-M, tree-vs-ode)
  std::vector<int> n_grid = {200, 500, 1000};          // convergence-N
  std::vector<int> m_grid = {20, 50, 100, 200};        // chaos-M
  std::vector<double> eta_grid = {0.3, 0.4, 0.5, 0.6, 0.7};  // equilibrium-sweep
  std::vector<double> r_grid = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  std::vector<double> t_grid = {0.5, 1.0, 2.0};        // tree-vs-ode, convergence-N
  std::size_t tree_samples = 100000;                   // tree-vs-ode

  void validate() const;  // throws std::invalid_argument on violations
};

// Names accepted by run_preset, in documentation order.
const std::vector<std::string>& preset_names();

// A ready-to-run configuration with per-preset default parameters.
ExperimentConfig default_config(const std::string& preset);

// Runs `work(i)` for i in [0, n) on `threads` workers pulling indices from a
// shared queue.  Callers store results indexed by i, so merged statistics are
// independent of the thread count and of scheduling order.
void run_replicates(int n, int threads, const std::function<void(int)>& work);

// Stable 64-bit sub-seed derivation (splitmix64 over master, salt, index) so
//each independent sampling context gets its own engine seed.
uint64_t derive_seed(uint64_t master, uint64_t salt, uint64_t index);

// --- Ternary-law statistics ---------------------------------------------

// Per-replicate pooled host-class counts: {n0, n_eta, n1}.
using TernaryCounts = std::array<int64_t, 3>;

struct TvEstimate {
  double tv = 0.0;  // total variation distance between the pooled laws
  double se = 0.0;  // bootstrap standard error (resampling replicates)
};

// TV between the pooled empirical laws of two replicate ensembles.
TvEstimate tv_ternary(const std::vector<TernaryCounts>& a,
                      const std::vector<TernaryCounts>& b, int n_boot,
                      uint64_t boot_seed);

// TV between a pooled empirical law and an exactly known law q.
TvEstimate tv_ternary_exact(const std::vector<TernaryCounts>& a,
                            const std::array<double, 3>& q, int n_boot,
                            uint64_t boot_seed);

// Pooled pairwise host-state indicator correlation, one value per class;
// the propagation-of-chaos diagnostic (0 for independent hosts).
std::array<double, 3> pairwise_class_correlation(
    const std::vector<TernaryCounts>& reps, int M);

// --- Preset driver --------------------------------------------------------

// Runs the preset named in cfg, writing CSV outputs plus manifest.json into
// cfg.out_dir.  Returns 0 on success.  On failure, partially written outputs
// from this run are removed before the exception propagates.
int run_preset(const ExperimentConfig& cfg);

// Header comment block ("# key = value" lines) embedded in every emitted CSV
// so a run is reconstructible from its outputs alone.
std::vector<std::string> config_header_lines(const ExperimentConfig& cfg);

struct EmittedFile {
  std::string name;    // path relative to out_dir
  uint64_t checksum;   // fnv1a64 of the file bytes
};

// Plain structured-text run summary listing all emitted files with checksums.
std::string manifest_json(const ExperimentConfig& cfg,
                          const std::vector<EmittedFile>& files);

}  // namespace parasim::experiments
