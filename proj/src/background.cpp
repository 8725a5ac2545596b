#include "conoshock/background.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

BackgroundRhs background_rhs(double sigma, double u, double v,
                             const GasParameters& gas, double d_floor) {
  double q2 = u * u + v * v;
  double c2 = gas.kappa_tilde - 0.5 * (gas.gamma - 1.0) * q2;
  if (c2 <= 1e-12) throw CavitationError("background_rhs: cavitation");
  double D = (1.0 - u * u / c2) + 2.0 * u * v * sigma / c2 +
             (1.0 - v * v / c2) * sigma * sigma;
  if (D <= d_floor)
    throw DegeneracyError("background_rhs: sonic degeneration, D = " +
                          std::to_string(D));
  BackgroundRhs r;
  r.du = -v / D;
  r.dv = sigma * v / D;
  r.D = D;
  return r;
}

namespace {

struct Node {
  double s, u, v, du, dv;  // state and derivatives at the node
};

}  // namespace

SelfSimilarSolution solve_background(const GasParameters& gas, double b,
                                     const BackgroundOptions& opt) {
  PolarPoint polar = polar_point(gas, b, opt.tau);
  if (mach(polar.post, gas.gamma) >= 1.0)
    throw DomainError("solve_background: post-shock state is not subsonic");

  const double tau = polar.tau;
  const double sigma_max = 1.0 / b;  // kappa < 1/b by backg-1
  const double h = (sigma_max - tau) / opt.n_steps;

  auto slip = [](const Node& n) { return n.u - n.s * n.v; };
  auto fill = [&](double s, double u, double v) {
    BackgroundRhs r = background_rhs(s, u, v, gas, opt.d_floor);
    return Node{s, u, v, r.du, r.dv};
  };

  std::vector<Node> nodes;
  nodes.reserve(opt.n_steps + 1);
  nodes.push_back(fill(tau, polar.post.u, polar.post.v));
  if (!(slip(nodes.front()) > 0.0))
    throw SolverError("solve_background: slip function not positive at shock");

  bool hit = false;
  for (int i = 0; i < opt.n_steps && !hit; ++i) {
    const Node& n = nodes.back();
    BackgroundRhs k1 = background_rhs(n.s, n.u, n.v, gas, opt.d_floor);
    BackgroundRhs k2 = background_rhs(n.s + 0.5 * h, n.u + 0.5 * h * k1.du,
                                      n.v + 0.5 * h * k1.dv, gas, opt.d_floor);
    BackgroundRhs k3 = background_rhs(n.s + 0.5 * h, n.u + 0.5 * h * k2.du,
                                      n.v + 0.5 * h * k2.dv, gas, opt.d_floor);
    BackgroundRhs k4 = background_rhs(n.s + h, n.u + h * k3.du, n.v + h * k3.dv,
                                      gas, opt.d_floor);
    double u1 = n.u + h / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du);
    double v1 = n.v + h / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
    nodes.push_back(fill(n.s + h, u1, v1));
    if (slip(nodes.back()) <= 0.0) hit = true;
  }
  if (!hit) throw NoConeError("solve_background: slip event not reached by 1/b");

  // Locate the event inside the last step by bisection on partial RK4 steps
  // from the last pre-event node; the location then inherits the
  // integrator's own order (a cubic interpolant alone carries a
  // position-dependent error constant).
  const Node& a = nodes[nodes.size() - 2];
  const Node& c = nodes.back();
  auto rk4_partial = [&](double s_to, double* u, double* v) {
    double hp = s_to - a.s;
    BackgroundRhs k1 = background_rhs(a.s, a.u, a.v, gas, opt.d_floor);
    BackgroundRhs k2 = background_rhs(a.s + 0.5 * hp, a.u + 0.5 * hp * k1.du,
                                      a.v + 0.5 * hp * k1.dv, gas, opt.d_floor);
    BackgroundRhs k3 = background_rhs(a.s + 0.5 * hp, a.u + 0.5 * hp * k2.du,
                                      a.v + 0.5 * hp * k2.dv, gas, opt.d_floor);
    BackgroundRhs k4 = background_rhs(a.s + hp, a.u + hp * k3.du,
                                      a.v + hp * k3.dv, gas, opt.d_floor);
    *u = a.u + hp / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du);
    *v = a.v + hp / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
  };
  auto g = [&](double s) {
    double u, v;
    rk4_partial(s, &u, &v);
    return u - s * v;
  };
  double kappa = bisect(g, a.s, c.s, opt.event_tol);
  double uk, vk;
  rk4_partial(kappa, &uk, &vk);

  SelfSimilarSolution sol;
  sol.gas = gas;
  sol.b = b;
  sol.tau = tau;
  sol.kappa = kappa;
  sol.omega0 = std::atan2(1.0, kappa);
  sol.omega1 = polar.omega1;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    sol.sigma.push_back(nodes[i].s);
    sol.u0.push_back(nodes[i].u);
    sol.v0.push_back(nodes[i].v);
  }
  if (kappa - sol.sigma.back() > 1e-14 * std::max(1.0, kappa)) {
    sol.sigma.push_back(kappa);
    sol.u0.push_back(uk);
    sol.v0.push_back(vk);
  } else {
    sol.sigma.back() = kappa;
    sol.u0.back() = uk;
    sol.v0.back() = vk;
  }
  return sol;
}

namespace {

Pchip make_pchip_u(const SelfSimilarSolution& s) { return Pchip(s.sigma, s.u0); }
Pchip make_pchip_v(const SelfSimilarSolution& s) { return Pchip(s.sigma, s.v0); }

double theta_to_sigma(const SelfSimilarSolution& sol, double theta) {
  if (theta < sol.omega0 - 1e-12 || theta > sol.omega1 + 1e-12)
    throw DomainError("background_at_theta: theta outside [omega0, omega1]");
  double sigma = 1.0 / std::tan(theta);
  return std::clamp(sigma, sol.tau, sol.kappa);
}

}  // namespace

FlowState background_at_theta(const SelfSimilarSolution& sol, double theta) {
  double sigma = theta_to_sigma(sol, theta);
  // interpolants are cheap to build relative to a solve; callers that need
  // many evaluations use BackgroundOnGrid in the iteration module
  Pchip pu = make_pchip_u(sol), pv = make_pchip_v(sol);
  FlowState s;
  s.u = pu(sigma);
  s.v = pv(sigma);
  s.rho = density_from_speed(std::hypot(s.u, s.v), sol.gas);
  return s;
}

BackgroundRhs background_rhs_at_theta(const SelfSimilarSolution& sol,
                                      double theta) {
  double sigma = theta_to_sigma(sol, theta);
  FlowState s = background_at_theta(sol, theta);
  return background_rhs(sigma, s.u, s.v, sol.gas);
}

BackgroundReport verify_background(const SelfSimilarSolution& sol) {
  BackgroundReport rep;
  const std::size_t n = sol.sigma.size();
  rep.u0_strictly_decreasing = true;
  rep.v0_strictly_increasing = true;
  rep.q0_nonincreasing = true;
  rep.m0_nonincreasing = true;
  rep.subsonic = true;
  double prev_q = 0.0, prev_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double q = std::hypot(sol.u0[i], sol.v0[i]);
    double c2 = sound_speed_sq_from_speed(q, sol.gas);
    double m = q / std::sqrt(c2);
    rep.max_mach = std::max(rep.max_mach, m);
    if (m >= 1.0) rep.subsonic = false;
    if (i > 0) {
      if (!(sol.u0[i] < sol.u0[i - 1])) rep.u0_strictly_decreasing = false;
      if (!(sol.v0[i] > sol.v0[i - 1])) rep.v0_strictly_increasing = false;
      if (q > prev_q * (1.0 + 1e-13) + 1e-15) rep.q0_nonincreasing = false;
      if (m > prev_m * (1.0 + 1e-13) + 1e-15) rep.m0_nonincreasing = false;
    }
    prev_q = q;
    prev_m = m;
  }
  rep.kappa_in_range = sol.kappa > 0.0 && sol.kappa < 1.0 / sol.b;
  rep.v0_max_bound =
      sol.v0.back() < sol.u0.front() * std::tan(sol.omega0);
  rep.slip_residual = std::abs(sol.u0.back() - sol.kappa * sol.v0.back());
  rep.slip_ok = rep.slip_residual < 1e-10;
  return rep;
}

double solve_b_for_omega0(const GasParameters& gas, double omega0_target,
                          const BackgroundOptions& opt) {
  auto f = [&](double b) {
    return solve_background(gas, b, opt).omega0 - omega0_target;
  };
  // scan the admissible b range (large turning angles have no attached
  // shock, so evaluations may fail toward the top of the scan)
  const int n = 25;
  double prev_b = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int i = 0; i <= n; ++i) {
    double b = 0.05 * std::pow(3.0 / 0.05, static_cast<double>(i) / n);
    double fb;
    try {
      fb = f(b);
    } catch (const SolverError&) {
      continue;
    }
    if (have_prev && prev_f * fb <= 0.0) return bisect(f, prev_b, b, 1e-10);
    prev_b = b;
    prev_f = fb;
    have_prev = true;
  }
  throw RootNotFoundError("solve_b_for_omega0: target angle not bracketed in "
                          "the admissible b range");
}

}  // namespace conoshock
