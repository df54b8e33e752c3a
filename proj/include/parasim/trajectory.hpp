// Sampled trajectories, event records and the CSV/JSONL writers shared by the
// finite-model engine and the limit-process simulators.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parasim/model.hpp"

namespace parasim {

enum class EventKind : int {
  MoranUp = 0,
  MoranDown = 1,
  ReinfectUp = 2,
  ReinfectDown = 3,
  ReplaceTo1 = 4,
  ReplaceTo0 = 5,
  MutateAtoB = 6,
  MutateBtoA = 7,
};
inline constexpr int kNumEventKinds = 8;
const char* event_kind_name(EventKind k);

struct EventRecord {
  double t = 0.0;
  int host = -1;     // affected host (0-based)
  EventKind kind = EventKind::MoranUp;
  int src = -1;      // donor host for reinfection/replacement, else -1
};

struct TrajectorySample {
  double t = 0.0;
  ClassMasses mass;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::array<uint64_t, kNumEventKinds> event_counts{};  // totals by kind
  std::vector<int> terminal_state;                      // per-host counts
  std::optional<std::vector<std::vector<int>>> snapshots;  // per sample time
  double t_end = 0.0;
  uint64_t seed = 0;
  bool absorbed = false;       // the configuration froze before t_end
  double absorbed_at = 0.0;    // time of the last state change if absorbed
};

// CSV with schema t,z0,zeta,z1,ztrans after a '#'-comment header block
// carrying the full config and seed.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& header_lines);
std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::string>& header_lines);

// Host snapshot CSV with schema host,k.
void write_snapshot_csv(const std::string& path, const std::vector<int>& k,
                        const std::vector<std::string>& header_lines);
std::string snapshot_csv(const std::vector<int>& k,
                         const std::vector<std::string>& header_lines);

// Event log: one JSON object per line with fields t, host, kind, src.
void write_event_jsonl(const std::string& path,
                       const std::vector<EventRecord>& events);
std::string event_jsonl(const std::vector<EventRecord>& events);

// FNV-1a 64-bit checksum used by run manifests.
uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64_file(const std::string& path);

// Writes text to a file (binary mode, no transformation); throws on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace parasim
