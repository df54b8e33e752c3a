#include "parasim/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parasim::ode {

TernaryWeights rhs(const TernaryWeights& v, double eta, double r) {
  const double em = 1.0 - eta;
  TernaryWeights d;
  d.z0 = em * v.zeta - 2.0 * r * eta * v.z0 * (v.z1 + eta * v.zeta);
  d.zeta = -v.zeta + 2.0 * r * (eta * eta * v.z0 * v.zeta +
                                em * em * v.z1 * v.zeta + v.z0 * v.z1);
  d.z1 = eta * v.zeta - 2.0 * r * em * v.z1 * (v.z0 + em * v.zeta);
  return d;
}

namespace {

inline TernaryWeights axpy(const TernaryWeights& y, double a,
                           const TernaryWeights& x) {
  return {y.z0 + a * x.z0, y.zeta + a * x.zeta, y.z1 + a * x.z1};
}

}  // namespace

Path integrate(const TernaryWeights& v0, double t_end, double eta, double r,
               const IntegrateOptions& opts) {
  if (!(t_end >= 0.0)) throw std::runtime_error("integrate: t_end must be >= 0");

  // Dormand-Prince 5(4) coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order weights for the embedded error estimate.
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Path path;
  TernaryWeights y = v0;
  TernaryWeights f = rhs(y, eta, r);
  double t = 0.0;
  path.knot_t_.push_back(t);
  path.knot_v_.push_back(y);
  path.knot_f_.push_back(f);
  {
    const double sum = y.z0 + y.zeta + y.z1;
    path.max_sum_drift_ = std::abs(sum - 1.0);
    path.min_component_ = std::min({y.z0, y.zeta, y.z1});
  }
  if (t_end == 0.0) return path;

  double h = opts.init_step > 0.0 ? opts.init_step
                                  : std::min(1e-3, t_end);
  const double h_min = t_end * 1e-15;
  long steps = 0;

  while (t < t_end) {
    if (++steps > opts.max_steps)
      throw std::runtime_error("integrate: step budget exhausted");
    if (h < h_min) throw std::runtime_error("integrate: step underflow");
    if (t + h > t_end) h = t_end - t;

    const TernaryWeights k1 = f;
    TernaryWeights yt = axpy(y, h * a21, k1);
    const TernaryWeights k2 = rhs(yt, eta, r);
    yt = axpy(axpy(y, h * a31, k1), h * a32, k2);
    const TernaryWeights k3 = rhs(yt, eta, r);
    yt = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
    const TernaryWeights k4 = rhs(yt, eta, r);
    yt = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3),
              h * a54, k4);
    const TernaryWeights k5 = rhs(yt, eta, r);
    yt = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
                   h * a64, k4),
              h * a65, k5);
    const TernaryWeights k6 = rhs(yt, eta, r);
    TernaryWeights y1 = axpy(axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3),
                                       h * b4, k4),
                                  h * b5, k5),
                             h * b6, k6);
    const TernaryWeights k7 = rhs(y1, eta, r);

    TernaryWeights err = {0, 0, 0};
    err = axpy(err, h * e1, k1);
    err = axpy(err, h * e3, k3);
    err = axpy(err, h * e4, k4);
    err = axpy(err, h * e5, k5);
    err = axpy(err, h * e6, k6);
    err = axpy(err, h * e7, k7);

    auto scaled = [&](double e, double a0, double a1v) {
      return std::abs(e) /
             (opts.abs_tol +
              opts.rel_tol * std::max(std::abs(a0), std::abs(a1v)));
    };
    const double errnorm = std::max(
        {scaled(err.z0, y.z0, y1.z0), scaled(err.zeta, y.zeta, y1.zeta),
         scaled(err.z1, y.z1, y1.z1)});

    if (errnorm <= 1.0) {
      t += h;
      y = y1;
      // Conservation diagnostics before any repair.
      const double sum = y.z0 + y.zeta + y.z1;
      path.max_sum_drift_ = std::max(path.max_sum_drift_, std::abs(sum - 1.0));
      path.min_component_ =
          std::min({path.min_component_, y.z0, y.zeta, y.z1});
      if (std::abs(sum - 1.0) > 1e-12) {
        y.z0 /= sum;
        y.zeta /= sum;
        y.z1 /= sum;
      }
      f = (std::abs(sum - 1.0) > 1e-12) ? rhs(y, eta, r) : k7;  // FSAL
      path.knot_t_.push_back(t);
      path.knot_v_.push_back(y);
      path.knot_f_.push_back(f);
    }
    const double factor =
        errnorm > 0.0
            ? std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0)
            : 5.0;
    h *= factor;
  }
  return path;
}

TernaryWeights Path::at(double t) const {
  if (t <= knot_t_.front()) return knot_v_.front();
  if (t >= knot_t_.back()) return knot_v_.back();
  const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
  const size_t i = static_cast<size_t>(it - knot_t_.begin()) - 1;
  const double tl = knot_t_[i], tr = knot_t_[i + 1];
  const double h = tr - tl;
  const double th = (t - tl) / h;
  // Cubic Hermite basis.
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  const TernaryWeights &y0 = knot_v_[i], &y1 = knot_v_[i + 1];
  const TernaryWeights &f0 = knot_f_[i], &f1 = knot_f_[i + 1];
  auto interp = [&](double a, double fa, double bb, double fb) {
    return h00 * a + h10 * h * fa + h01 * bb + h11 * h * fb;
  };
  return {interp(y0.z0, f0.z0, y1.z0, f1.z0),
          interp(y0.zeta, f0.zeta, y1.zeta, f1.zeta),
          interp(y0.z1, f0.z1, y1.z1, f1.z1)};
}

double existence_threshold(double eta) {
  const double em = 1.0 - eta;
  const double from_b = (2.0 * eta - 1.0) / (2.0 * eta * em * em);
  const double from_a = (1.0 - 2.0 * eta) / (2.0 * em * eta * eta);
  return std::max(from_b, from_a);
}

double coupling_threshold(double eta) {
  const double em = 1.0 - eta;
  return std::max(eta / (2.0 * em * em), em / (2.0 * eta * eta));
}

std::optional<TernaryWeights> interior_equilibrium(double eta, double r) {
  if (r <= 0.0) return std::nullopt;
  const double em = 1.0 - eta;
  const double u0_num = 2.0 * r * eta * em * em - (2.0 * eta - 1.0);
  const double u0_den = 2.0 * r * eta * eta + 4.0 * r * r * eta * eta * eta * em;
  const double ue_num = 4.0 * r * r * eta * eta * eta * em * em * em -
                        (2.0 * eta - 1.0) * (2.0 * eta - 1.0) *
                            (2.0 * r * eta * em + 1.0);
  const double ue_den = 2.0 * r * eta * eta * em * em *
                        (1.0 + 2.0 * r * eta * em);
  const double u1_num = 2.0 * r * em * eta * eta + (2.0 * eta - 1.0);
  const double u1_den = 2.0 * r * em * em + 4.0 * r * r * eta * em * em * em;
  const TernaryWeights u = {u0_num / u0_den, ue_num / ue_den, u1_num / u1_den};
  if (!(u.z0 > 0.0 && u.zeta > 0.0 && u.z1 > 0.0)) return std::nullopt;
  return u;
}

Jacobian2 jacobian_projected(double v0, double v1, double eta, double r) {
  const double em = 1.0 - eta;
  Jacobian2 j;
  j.j00 = -em - 2.0 * r * eta * (v1 * em + eta) + 4.0 * r * eta * eta * v0;
  j.j01 = -em - 2.0 * r * eta * v0 * em;
  j.j10 = -eta - 2.0 * r * em * eta * v1;
  j.j11 = -eta - 2.0 * r * em * (v0 * eta + em) + 4.0 * r * em * em * v1;
  return j;
}

namespace {

EquilibriumInfo classify_point(const TernaryWeights& v, double eta, double r) {
  EquilibriumInfo info;
  info.v = v;
  const Jacobian2 j = jacobian_projected(v.z0, v.z1, eta, r);
  const double tr = j.j00 + j.j11;
  const double det = j.j00 * j.j11 - j.j01 * j.j10;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    info.lambda1 = std::complex<double>((tr + s) / 2.0, 0.0);
    info.lambda2 = std::complex<double>((tr - s) / 2.0, 0.0);
  } else {
    const double s = std::sqrt(-disc);
    info.lambda1 = std::complex<double>(tr / 2.0, s / 2.0);
    info.lambda2 = std::complex<double>(tr / 2.0, -s / 2.0);
  }
  const double tol = 1e-9;
  const double re1 = info.lambda1.real(), re2 = info.lambda2.real();
  if (std::abs(re1) <= tol || std::abs(re2) <= tol)
    info.classification = "non-classified";
  else if (re1 < 0.0 && re2 < 0.0)
    info.classification = "stable";
  else if (re1 > 0.0 && re2 > 0.0)
    info.classification = "unstable";
  else
    info.classification = "saddle";
  return info;
}

}  // namespace

EquilibriumReport classify_equilibria(double eta, double r) {
  EquilibriumReport rep;
  rep.eta = eta;
  rep.r = r;
  rep.r_star = existence_threshold(eta);
  rep.all_b = classify_point({1.0, 0.0, 0.0}, eta, r);
  rep.all_a = classify_point({0.0, 0.0, 1.0}, eta, r);
  if (auto u = interior_equilibrium(eta, r))
    rep.interior = classify_point(*u, eta, r);
  return rep;
}

}  // namespace parasim::ode
