#include "conoshock/polar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

double polar_F(double tau, double nu, double gamma, double b) {
  if (!(b > 0.0)) throw DomainError("polar_F: b must be positive");
  if (b * tau >= 1.0) throw DomainError("polar_F: b*tau >= 1");
  double r = tau / b;
  double inner =
      0.5 * (gamma - 1.0) * (1.0 + 2.0 * r - tau * tau) / ((1.0 + r) * (1.0 + r)) +
      nu;
  if (inner <= 0.0) throw DomainError("polar_F: inner bracket non-positive");
  double e = 1.0 / (gamma - 1.0);
  return tau - (b + tau) / (1.0 - b * tau) * std::pow(inner, -e) * std::pow(nu, e);
}

TauResult solve_tau(double nu, double gamma, double b, const TauOptions& opt) {
  if (!(nu >= 0.0) || nu > opt.nu_cap)
    throw DomainError("solve_tau: nu outside [0, nu_cap]");
  TauResult res;
  if (nu == 0.0) {
    res.tau = 0.0;
    res.all_roots = {0.0};
    return res;
  }
  // Cap from positivity of 1 + 2 tau/b - tau^2 (inner bracket at nu -> 0).
  double tau_cap = 1.0 / b + std::sqrt(1.0 / (b * b) + 1.0);
  double hi = std::min(0.99 / b, tau_cap * (1.0 - 1e-9));
  double lo = opt.bracket_lo;
  auto F = [&](double t) { return polar_F(t, nu, gamma, b); };

  // Scan for sign changes; the first bracket carries the origin-continuous root.
  const int n = opt.scan_points;
  double prev_x = lo, prev_f = F(lo);
  std::vector<std::pair<double, double>> brackets;
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / n;
    double f = F(x);
    if (prev_f == 0.0)
      brackets.emplace_back(prev_x, prev_x);
    else if (prev_f * f < 0.0)
      brackets.emplace_back(prev_x, x);
    prev_x = x;
    prev_f = f;
  }
  if (brackets.empty())
    throw RootNotFoundError("solve_tau: no sign change of F in (0, " +
                            std::to_string(hi) + ") at nu = " + std::to_string(nu));
  for (auto& [a, c] : brackets) {
    double root = (a == c) ? a : bisect(F, a, c, opt.bisect_tol);
    for (int k = 0; k < opt.newton_steps; ++k) {
      double h = std::max(1e-9, 1e-7 * root);
      double df = (F(root + h) - F(root - h)) / (2.0 * h);
      if (df == 0.0) break;
      double step = F(root) / df;
      double next = root - step;
      if (next <= 0.0 || next >= hi) break;
      root = next;
    }
    res.all_roots.push_back(root);
  }
  std::sort(res.all_roots.begin(), res.all_roots.end());
  res.tau = res.all_roots.front();
  res.ambiguous = res.all_roots.size() > 1;
  res.residual = std::abs(F(res.tau));
  if (res.ambiguous && opt.require_unique)
    throw AmbiguityError("solve_tau: " + std::to_string(res.all_roots.size()) +
                         " roots in bracket; smallest is " +
                         std::to_string(res.tau));
  if (res.residual > 1e-12)
    throw RootNotFoundError("solve_tau: residual " + std::to_string(res.residual));
  return res;
}

FlowState post_shock_state(double tau, double b, double rho_inf) {
  if (!(tau > 0.0)) throw DomainError("post_shock_state: tau must be positive");
  if (b * tau >= 1.0) throw DomainError("post_shock_state: b*tau >= 1");
  FlowState s;
  s.u = tau / (b + tau);
  s.v = b * s.u;
  s.rho = rho_inf * (b + tau) / (tau * (1.0 - b * tau));
  return s;
}

std::pair<double, double> rh_residual(const FlowState& up, const FlowState& dn,
                                      double tau) {
  double r1 = (dn.rho * dn.u - up.rho * up.u) - tau * (dn.rho * dn.v - up.rho * up.v);
  double r2 = (dn.v - up.v) + tau * (dn.u - up.u);
  return {r1, r2};
}

std::pair<double, double> rh_residual_curved(const FlowState& up,
                                             const FlowState& dn,
                                             double phi_prime) {
  double ju = dn.u - up.u, jv = dn.v - up.v;
  double jru = dn.rho * dn.u - up.rho * up.u;
  double jrv = dn.rho * dn.v - up.rho * up.v;
  return {jru * ju + jrv * jv, jv + phi_prime * ju};
}

PolarPoint polar_point(const GasParameters& gas, double b, const TauOptions& opt) {
  PolarPoint p;
  p.b = b;
  p.nu = gas.nu;
  TauResult t = solve_tau(gas.nu, gas.gamma, b, opt);
  p.tau = t.tau;
  p.omega1 = std::atan2(1.0, p.tau);  // arccot
  p.post = post_shock_state(p.tau, b, gas.rho_inf);
  FlowState up{1.0, 0.0, gas.rho_inf};
  auto [r1, r2] = rh_residual(up, p.post, p.tau);
  if (std::abs(r1) > 1e-12 || std::abs(r2) > 1e-12)
    throw SolverError("polar_point: R-H residuals exceed 1e-12");
  return p;
}

std::vector<AppleSample> emit_apple_curve(double gamma, double nu, int samples) {
  if (!(nu < 1.0)) throw DomainError("emit_apple_curve: upstream must be supersonic");
  if (samples < 2) throw DomainError("emit_apple_curve: need >= 2 samples");
  GasParameters gas = GasParameters::from_nu(gamma, nu);
  std::vector<AppleSample> out;
  double mach_angle = std::asin(std::sqrt(nu));  // sin w = c_inf / q_inf
  double lo_angle = mach_angle + 1e-4 * (M_PI / 2 - mach_angle);
  for (int i = 0; i < samples; ++i) {
    double w1 = lo_angle + (M_PI / 2 - lo_angle) * i / (samples - 1.0);
    double ut = std::cos(w1);       // tangential component, continuous
    double un_up = std::sin(w1);    // upstream normal component
    // compressive root of rho(q) u_n = rho_inf sin w1 below the trivial one
    auto h = [&](double un) {
      return density_from_speed(std::hypot(ut, un), gas) * un - gas.rho_inf * un_up;
    };
    const int m = 512;
    double bracket_lo = -1.0, bracket_hi = -1.0;
    double xp = un_up * (1.0 - 1e-12), fp = h(xp);
    for (int k = m - 1; k >= 1; --k) {
      double x = un_up * k / m;
      double f = h(x);
      if (f <= 0.0 && fp > 0.0) {
        bracket_lo = x;
        bracket_hi = xp;
        break;
      }
      xp = x;
      fp = f;
    }
    if (bracket_lo < 0.0) continue;  // at the Mach angle the roots merge
    double un = bisect(h, bracket_lo, bracket_hi, 1e-14);
    AppleSample s;
    s.omega1 = w1;
    s.tau = 1.0 / std::tan(w1);
    s.u = ut * std::cos(w1) + un * std::sin(w1);
    s.v = ut * std::sin(w1) - un * std::cos(w1);
    s.rho = density_from_speed(std::hypot(ut, un), gas);
    s.turning_angle = std::atan2(s.v, s.u);
    s.mach_post = mach(FlowState{s.u, s.v, s.rho}, gamma);
    out.push_back(s);
  }
  return out;
}

}  // namespace conoshock
