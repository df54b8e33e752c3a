#include "parasim/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parasim {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::MoranUp: return "MoranUp";
    case EventKind::MoranDown: return "MoranDown";
    case EventKind::ReinfectUp: return "ReinfectUp";
    case EventKind::ReinfectDown: return "ReinfectDown";
    case EventKind::ReplaceTo1: return "ReplaceTo1";
    case EventKind::ReplaceTo0: return "ReplaceTo0";
    case EventKind::MutateAtoB: return "MutateAtoB";
    case EventKind::MutateBtoA: return "MutateBtoA";
  }
  return "?";
}

namespace {

void append_header(std::string* out,
                   const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) {
    out->append("# ");
    out->append(line);
    out->push_back('\n');
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::string>& header_lines) {
  std::string out;
  append_header(&out, header_lines);
  out += "t,z0,zeta,z1,ztrans\n";
  for (const auto& s : traj.samples) {
    out += fmt(s.t);
    out += ',';
    out += fmt(s.mass.z0);
    out += ',';
    out += fmt(s.mass.zeta);
    out += ',';
    out += fmt(s.mass.z1);
    out += ',';
    out += fmt(s.mass.ztrans);
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const std::vector<int>& k,
                         const std::vector<std::string>& header_lines) {
  std::string out;
  append_header(&out, header_lines);
  out += "host,k\n";
  for (size_t i = 0; i < k.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(k[i]) + "\n";
  return out;
}

std::string event_jsonl(const std::vector<EventRecord>& events) {
  std::string out;
  for (const auto& e : events) {
    out += "{\"t\":";
    out += fmt(e.t);
    out += ",\"host\":";
    out += std::to_string(e.host);
    out += ",\"kind\":\"";
    out += event_kind_name(e.kind);
    out += "\",\"src\":";
    out += std::to_string(e.src);
    out += "}\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& header_lines) {
  write_text_file(path, trajectory_csv(traj, header_lines));
}

void write_snapshot_csv(const std::string& path, const std::vector<int>& k,
                        const std::vector<std::string>& header_lines) {
  write_text_file(path, snapshot_csv(k, header_lines));
}

void write_event_jsonl(const std::string& path,
                       const std::vector<EventRecord>& events) {
  write_text_file(path, event_jsonl(events));
}

uint64_t fnv1a64(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for checksum: " + path);
  uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace parasim
