// Plain-text run configuration: one "key = value" pair per line, '#' comments.
// Exactly the model keys are accepted: N, M, eta, b, r, g_N, a, eps, eps1,
// u_N, seed.  A missing g_N selects the default formula (stored as 0 here);
// a missing u_N means no mutation; a missing seed means 0.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parasim/model.hpp"

namespace parasim {

struct RunConfig {
  ModelParams params;
  uint64_t seed = 0;
};

// Parses a config file.  Throws std::runtime_error on unreadable files,
// malformed lines, unknown or duplicate keys, or unparsable values.
RunConfig load_config(const std::string& path);

// Same grammar, from an in-memory string (used by tests and by the CSV
// header round-trip).
RunConfig parse_config(const std::string& text);

// Canonical "key = value" lines for a config; parse_config() of the joined
// lines reproduces (params, seed) exactly.  Values are printed with full
// precision so emitted files alone reconstruct the run.
std::vector<std::string> config_lines(const ModelParams& p, uint64_t seed);

}  // namespace parasim
