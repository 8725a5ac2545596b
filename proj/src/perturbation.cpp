#include "conoshock/perturbation.hpp"

#include <cmath>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

namespace {

double gauss(double z) { return std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / M_SQRT2)); }

}  // namespace

ConeBoundary::ConeBoundary(double omega0, std::vector<LogBump> bumps,
                           double epsilon, double q)
    : omega0_(omega0), tan_w0_(std::tan(omega0)), eps_(epsilon),
      bumps_(std::move(bumps)) {
  if (!(epsilon >= 0.0)) throw DomainError("ConeBoundary: epsilon must be >= 0");
  if (eps_ == 0.0 || bumps_.empty()) {
    bumps_.clear();
    eps_ = epsilon;
    return;
  }
  double n0 = combined_norm(q);
  if (!(n0 > 0.0)) throw DomainError("ConeBoundary: degenerate bump set");
  for (auto& b : bumps_) b.amp *= epsilon / n0;
}

ConeBoundary ConeBoundary::unperturbed(double omega0) {
  return ConeBoundary(omega0, {}, 0.0);
}

double ConeBoundary::delta_phi_prime(double x) const {
  if (!(x > 0.0) || bumps_.empty()) return 0.0;
  double t = std::log(x), s = 0.0;
  for (const auto& b : bumps_) s += b.amp * gauss((t - b.center) / b.width);
  return s;
}

double ConeBoundary::delta_phi_prime_d(double x) const {
  if (!(x > 0.0) || bumps_.empty()) return 0.0;
  double t = std::log(x), s = 0.0;
  for (const auto& b : bumps_) {
    double z = (t - b.center) / b.width;
    s += -b.amp * gauss(z) * z / (b.width * x);
  }
  return s;
}

double ConeBoundary::delta_phi_int(double x) const {
  if (!(x > 0.0) || bumps_.empty()) return 0.0;
  double t = std::log(x), s = 0.0;
  for (const auto& b : bumps_) {
    // closed form of int_0^x amp exp(-(ln s - c)^2/(2 w^2)) ds
    s += b.amp * std::exp(b.center + 0.5 * b.width * b.width) * b.width *
         std::sqrt(2.0 * M_PI) *
         normal_cdf((t - b.center - b.width * b.width) / b.width);
  }
  return s;
}

double ConeBoundary::combined_norm(double q) const {
  if (bumps_.empty()) return 0.0;
  // deviation as a function of t, with analytic t-derivatives
  auto f = [&](double t, int d) {
    double s = 0.0;
    for (const auto& b : bumps_) {
      double z = (t - b.center) / b.width;
      double g = b.amp * gauss(z);
      if (d == 0)
        s += g;
      else if (d == 1)
        s += -g * z / b.width;
      else
        s += g * (z * z - 1.0) / (b.width * b.width);
    }
    return s;
  };
  const int n = 4096;
  const double lo = -30.0, hi = 30.0, h = (hi - lo) / (n - 1);
  double sup0 = 0, sup1 = 0, sup2 = 0, lq = 0;
  for (int i = 0; i < n; ++i) {
    double t = lo + i * h;
    double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    double v0 = f(t, 0), v1 = f(t, 1);
    sup0 = std::max(sup0, std::abs(v0));
    sup1 = std::max(sup1, std::abs(v1));
    sup2 = std::max(sup2, std::abs(f(t, 2)));
    lq += w * (std::pow(std::abs(v0), q) + std::pow(std::abs(v1), q));
  }
  double c2 = std::max({sup0, sup1, sup2});
  return c2 + std::pow(lq, 1.0 / q);
}

UpstreamField::UpstreamField(double omega0, double omega1, double delta_hat0,
                             std::vector<SeparableBump> bumps, double epsilon,
                             double q)
    : omega0_(omega0), omega1_(omega1), dhat0_(delta_hat0), eps_(epsilon),
      bumps_(std::move(bumps)) {
  if (!(epsilon >= 0.0)) throw DomainError("UpstreamField: epsilon must be >= 0");
  if (eps_ == 0.0 || bumps_.empty()) {
    bumps_.clear();
    return;
  }
  double n0 = combined_norm(q);
  if (!(n0 > 0.0)) throw DomainError("UpstreamField: degenerate bump set");
  for (auto& b : bumps_) b.amp *= epsilon / n0;
}

UpstreamField UpstreamField::unperturbed(double omega0, double omega1) {
  return UpstreamField(omega0, omega1, 0.05, {}, 0.0);
}

double UpstreamField::eval(int comp, double x, double y, bool xi_deriv) const {
  if (bumps_.empty()) return 0.0;
  double r = std::hypot(x, y);
  if (!(r > 0.0)) return 0.0;
  double t = std::log(r);
  double th = std::atan2(y, x);
  double s = 0.0;
  for (const auto& b : bumps_) {
    if (b.component != comp) continue;
    double zt = (t - b.t_center) / b.t_width;
    double zh = (th - b.theta_center) / b.theta_width;
    double gt = gauss(zt), gh = gauss(zh);
    if (!xi_deriv) {
      s += b.amp * gt * gh;
    } else {
      double gt1 = -gt * zt / b.t_width;
      double gh1 = -gh * zh / b.theta_width;
      // d/dx = e^{-t} (cos th d/dt - sin th d/dtheta)
      s += b.amp * std::exp(-t) * (std::cos(th) * gt1 * gh - std::sin(th) * gt * gh1);
    }
  }
  return s;
}

double UpstreamField::delta_u(double x, double y) const { return eval(0, x, y, false); }
double UpstreamField::delta_v(double x, double y) const { return eval(1, x, y, false); }
double UpstreamField::d_xi_delta_u(double x, double y) const { return eval(0, x, y, true); }
double UpstreamField::d_xi_delta_v(double x, double y) const { return eval(1, x, y, true); }

bool UpstreamField::in_extended_sector(double x, double y) const {
  double th = std::atan2(y, x);
  return th >= omega0_ - dhat0_ - 1e-12 && th <= omega1_ + dhat0_ + 1e-12;
}

double UpstreamField::combined_norm(double q) const {
  if (bumps_.empty()) return 0.0;
  const int nt = 1024, nth = 65;
  const double lo = -20.0, hi = 20.0, ht = (hi - lo) / (nt - 1);
  const double th_lo = omega0_ - dhat0_, th_hi = omega1_ + dhat0_;
  const double hth = (th_hi - th_lo) / (nth - 1);
  double lq = 0.0, supw = 0.0;
  // W^{1,q}_{(0)} of the pair plus C^1_{(1)} of the xi-derivative; strip
  // derivatives by centered differences of the analytic evaluators
  auto val = [&](int comp, double t, double th, bool dxi) {
    double r = std::exp(t);
    return eval(comp, r * std::cos(th), r * std::sin(th), dxi);
  };
  for (int i = 0; i < nt; ++i) {
    double t = lo + i * ht;
    double wt = (i == 0 || i == nt - 1) ? 0.5 * ht : ht;
    for (int j = 0; j < nth; ++j) {
      double th = th_lo + j * hth;
      double wj = (j == 0 || j == nth - 1) ? 0.5 * hth : hth;
      for (int comp = 0; comp < 2; ++comp) {
        double v = val(comp, t, th, false);
        double vt = (val(comp, t + ht, th, false) - val(comp, t - ht, th, false)) / (2 * ht);
        double vh = (val(comp, t, th + hth, false) - val(comp, t, th - hth, false)) / (2 * hth);
        lq += wt * wj * (std::pow(std::abs(v), q) + std::pow(std::abs(vt), q) +
                         std::pow(std::abs(vh), q));
        double d = std::exp(t) * val(comp, t, th, true);
        double dt = (std::exp(t + ht) * val(comp, t + ht, th, true) -
                     std::exp(t - ht) * val(comp, t - ht, th, true)) / (2 * ht);
        double dh = (std::exp(t) * val(comp, t, th + hth, true) -
                     std::exp(t) * val(comp, t, th - hth, true)) / (2 * hth);
        supw = std::max({supw, std::abs(d), std::abs(dt), std::abs(dh)});
      }
    }
  }
  return std::pow(lq, 1.0 / q) + supw;
}

}  // namespace conoshock
