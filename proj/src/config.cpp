#include "parasim/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace parasim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config: bad value for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config: bad value for " + key + ": '" + v + "'");
  return x;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config: bad value for " + key + ": '" + v + "'");
  return static_cast<uint64_t>(x);
}

std::string fmt_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw std::runtime_error("config: duplicate key '" + key + "'");
    if (key == "N")
      cfg.params.N = static_cast<int>(parse_int(key, val));
    else if (key == "M")
      cfg.params.M = static_cast<int>(parse_int(key, val));
    else if (key == "eta")
      cfg.params.eta = parse_real(key, val);
    else if (key == "b")
      cfg.params.b = parse_real(key, val);
    else if (key == "r")
      cfg.params.r = parse_real(key, val);
    else if (key == "g_N")
      cfg.params.g_N = parse_real(key, val);
    else if (key == "a")
      cfg.params.a = parse_real(key, val);
    else if (key == "eps")
      cfg.params.eps = parse_real(key, val);
    else if (key == "eps1")
      cfg.params.eps1 = parse_real(key, val);
    else if (key == "u_N")
      cfg.params.u_N = parse_real(key, val);
    else if (key == "seed")
      cfg.seed = parse_u64(key, val);
    else
      throw std::runtime_error("config: unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> config_lines(const ModelParams& p, uint64_t seed) {
  std::vector<std::string> out;
  out.push_back("N = " + std::to_string(p.N));
  out.push_back("M = " + std::to_string(p.M));
  out.push_back("eta = " + fmt_real(p.eta));
  out.push_back("b = " + fmt_real(p.b));
  out.push_back("r = " + fmt_real(p.r));
  out.push_back("g_N = " + fmt_real(p.g_N));
  out.push_back("a = " + fmt_real(p.a));
  out.push_back("eps = " + fmt_real(p.eps));
  out.push_back("eps1 = " + fmt_real(p.eps1));
  out.push_back("u_N = " + fmt_real(p.u_N));
  out.push_back("seed = " + std::to_string(seed));
  return out;
}

}  // namespace parasim
