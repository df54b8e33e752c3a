#include "parasim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace parasim {

double default_g_N(int N, double b, double a, double eps) {
  const double expo = b * std::max(3.0, 2.0 + a) + 2.0 * eps;
  return std::pow(static_cast<double>(N), expo);
}

static void validate_params(const ModelParams& p) {
  if (p.N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
  if (p.M < 1) throw std::invalid_argument("ModelParams: M must be >= 1");
  if (!(p.eta > 0.0 && p.eta < 1.0))
    throw std::invalid_argument("ModelParams: eta must lie in (0,1)");
  if (!(p.b > 0.0 && p.b < 1.0))
    throw std::invalid_argument("ModelParams: b must lie in (0,1)");
  if (!(p.r >= 0.0)) throw std::invalid_argument("ModelParams: r must be >= 0");
  if (!(p.a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
  if (!(p.eps > 0.0)) throw std::invalid_argument("ModelParams: eps must be > 0");
  if (!(p.eps1 > 0.0))
    throw std::invalid_argument("ModelParams: eps1 must be > 0");
  if (!(p.u_N >= 0.0))
    throw std::invalid_argument("ModelParams: u_N must be >= 0");
}

Scales derive_scales(const ModelParams& p) {
  validate_params(p);
  Scales sc;
  const double N = static_cast<double>(p.N);
  sc.s_N = std::pow(N, -p.b);
  sc.r_N = p.r * std::pow(N, p.b);
  sc.g_N = p.g_N > 0.0 ? p.g_N : default_g_N(p.N, p.b, p.a, p.eps);
  sc.theta_N = p.u_N * N * static_cast<double>(p.M) * sc.g_N;

  // Within-host jump rates carry factors (1 +- s_N(eta - x)); they stay
  // nonnegative iff s_N * max(eta, 1-eta) <= 1.  s_N <= 1 makes this
  // automatic, but the intent is recorded as a hard check.
  if (sc.s_N * std::max(p.eta, 1.0 - p.eta) > 1.0)
    throw std::invalid_argument("ModelParams: s_N max(eta,1-eta) exceeds 1");

  const double wu = std::pow(sc.s_N, p.a);
  const double wd = std::pow(sc.s_N, p.a + p.eps1);  // < wu since s_N < 1
  ClassificationWindows w;
  w.u_lo = std::max(p.eta - wu, 0.0);
  w.u_hi = std::min(p.eta + wu, 1.0);
  w.d_lo = p.eta - wd;
  w.d_hi = p.eta + wd;
  // Keep the strict nesting u_lo < d_lo <= eta <= d_hi < u_hi after clipping
  // (only reachable when the raw windows spill out of [0,1]).
  if (w.d_lo <= w.u_lo) w.d_lo = 0.5 * (w.u_lo + p.eta);
  if (w.d_hi >= w.u_hi) w.d_hi = 0.5 * (p.eta + w.u_hi);
  sc.windows = w;
  return sc;
}

bool AssumptionReport::all_satisfied() const {
  for (const auto& e : entries)
    if (!e.satisfied) return false;
  return true;
}

AssumptionReport validate_assumptions(const ModelParams& p) {
  const Scales sc = derive_scales(p);
  const double lnN = std::log(static_cast<double>(p.N));
  const double lng = std::log(sc.g_N);
  AssumptionReport rep;

  rep.entries.push_back({"A1", true, 0.0, "s_N = N^-b holds by construction"});
  rep.entries.push_back({"A2", true, 0.0, "r_N s_N = r holds by construction"});

  auto lower = [&](const std::string& name, double ln_bound,
                   const std::string& note) {
    const double margin = lng - ln_bound;
    rep.entries.push_back({name, margin > 0.0, margin, note});
  };
  auto upper = [&](const std::string& name, double ln_bound,
                   const std::string& note) {
    const double margin = ln_bound - lng;
    rep.entries.push_back({name, margin > 0.0, margin, note});
  };

  lower("A3i", (3.0 * p.b + p.eps) * lnN, "g_N > N^(3b+eps)");
  upper("A3ii", std::pow(p.N, 1.0 - p.b * (1.0 + p.eps)),
        "g_N < exp(N^(1-b(1+eps)))");
  lower("A3pi", (p.b * std::max(3.0, 2.0 + p.a) + p.eps) * lnN,
        "g_N > N^(b max(3,2+a)+eps)");
  upper("A3pii", std::pow(p.N, 1.0 - p.b * (2.0 * p.a + 1.0 + p.eps)),
        "g_N < exp(N^(1-b(2a+1+eps)))");

  const double margin = (1.0 - p.b) / (2.0 * p.b) - p.a;
  rep.entries.push_back({"window_exponent", margin > 0.0, margin,
                         "a < (1-b)/(2b) keeps the eta window meaningful"});
  return rep;
}

HostClass classify_state(double x, const ClassificationWindows& w) {
  if (x == 0.0) return HostClass::Zero;
  if (x == 1.0) return HostClass::One;
  if (x > w.u_lo && x < w.u_hi) return HostClass::EtaWindow;
  return HostClass::Transient;
}

ClassMasses classify_hosts(const std::vector<int>& k, int N,
                           const ClassificationWindows& w) {
  ClassMasses m;
  if (k.empty()) return m;
  const double dN = static_cast<double>(N);
  // Count hosts per class and divide once: a monomorphic profile must give
  // an exact 1.0 mass (summing 1/M per host would not).
  int64_t n0 = 0, ne = 0, n1 = 0, nt = 0;
  for (int ki : k) {
    // True division so k == N lands exactly on 1.0 (k * (1/N) would not).
    switch (classify_state(static_cast<double>(ki) / dN, w)) {
      case HostClass::Zero: ++n0; break;
      case HostClass::EtaWindow: ++ne; break;
      case HostClass::One: ++n1; break;
      case HostClass::Transient: ++nt; break;
    }
  }
  const double dM = static_cast<double>(k.size());
  m.z0 = static_cast<double>(n0) / dM;
  m.zeta = static_cast<double>(ne) / dM;
  m.z1 = static_cast<double>(n1) / dM;
  m.ztrans = static_cast<double>(nt) / dM;
  return m;
}

}  // namespace parasim
