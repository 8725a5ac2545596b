#include "conoshock/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

namespace {
std::vector<double> gamma1_eta_nodes(const StripGrid& g, double omega1) {
  std::vector<double> eta(g.n_t);
  double s = std::sin(omega1);
  for (int i = 0; i < g.n_t; ++i) eta[i] = g.r(i) * s;
  return eta;
}
}  // namespace

ShockFront ShockFront::background(const StripGrid& g, double omega1) {
  ShockFront f;
  f.eta_ = gamma1_eta_nodes(g, omega1);
  f.cot_w1_ = std::cos(omega1) / std::sin(omega1);
  f.dpsi_dot_.assign(f.eta_.size(), 0.0);
  f.integrate();
  return f;
}

ShockFront ShockFront::from_slope(const StripGrid& g, double omega1,
                                  std::vector<double> psi_dot) {
  ShockFront f;
  f.eta_ = gamma1_eta_nodes(g, omega1);
  if (psi_dot.size() != f.eta_.size())
    throw DomainError("ShockFront: slope sample count mismatch");
  f.cot_w1_ = std::cos(omega1) / std::sin(omega1);
  f.dpsi_dot_.resize(f.eta_.size());
  for (std::size_t i = 0; i < f.eta_.size(); ++i) {
    if (!(psi_dot[i] > 0.0))
      throw DomainError("ShockFront: psi_dot must stay positive");
    f.dpsi_dot_[i] = psi_dot[i] - f.cot_w1_;
  }
  f.integrate();
  return f;
}

void ShockFront::integrate() {
  const std::size_t n = eta_.size();
  dpsi_.assign(n, 0.0);
  // leading behavior below the truncated grid: constant slope deviation
  dpsi_[0] = eta_[0] * dpsi_dot_[0];
  for (std::size_t i = 1; i < n; ++i)
    dpsi_[i] = dpsi_[i - 1] +
               0.5 * (eta_[i] - eta_[i - 1]) * (dpsi_dot_[i] + dpsi_dot_[i - 1]);
}

double ShockFront::delta_psi_dot_at(double eta) const {
  const std::size_t n = eta_.size();
  if (eta <= eta_[0]) return dpsi_dot_[0];
  if (eta >= eta_[n - 1]) return dpsi_dot_[n - 1];
  // log-uniform nodes: locate by the log spacing
  double lh = std::log(eta_[1] / eta_[0]);
  auto idx = static_cast<std::size_t>(std::log(eta / eta_[0]) / lh);
  idx = std::min(idx, n - 2);
  while (idx > 0 && eta < eta_[idx]) --idx;
  while (idx + 2 < n && eta > eta_[idx + 1]) ++idx;
  double s = (eta - eta_[idx]) / (eta_[idx + 1] - eta_[idx]);
  return (1.0 - s) * dpsi_dot_[idx] + s * dpsi_dot_[idx + 1];
}

double ShockFront::delta_psi(double eta) const {
  const std::size_t n = eta_.size();
  if (eta <= eta_[0]) return eta * dpsi_dot_[0];
  if (eta >= eta_[n - 1]) return dpsi_[n - 1];
  double lh = std::log(eta_[1] / eta_[0]);
  auto idx = static_cast<std::size_t>(std::log(eta / eta_[0]) / lh);
  idx = std::min(idx, n - 2);
  while (idx > 0 && eta < eta_[idx]) --idx;
  while (idx + 2 < n && eta > eta_[idx + 1]) ++idx;
  double dd = delta_psi_dot_at(eta);
  return dpsi_[idx] + 0.5 * (eta - eta_[idx]) * (dpsi_dot_[idx] + dd);
}

double ShockFront::psi_dot(double eta) const {
  return cot_w1_ + delta_psi_dot_at(eta);
}

double ShockFront::psi(double eta) const {
  return eta * cot_w1_ + delta_psi(eta);
}

double ShockFront::slope_norm(double q) const {
  RaySamples s;
  s.t_min = std::log(eta_[0]);
  s.t_max = std::log(eta_[0]) + eta_.size() * std::log(eta_[1] / eta_[0]);
  s.n = static_cast<int>(eta_.size());
  s.k = 0.0;
  s.values = dpsi_dot_;
  return gamma1_norm(s, q);
}

double front_slope_distance(const ShockFront& a, const ShockFront& b, double q) {
  RaySamples s;
  const auto& ea = a.eta();
  s.t_min = std::log(ea[0]);
  s.t_max = std::log(ea[0]) + ea.size() * std::log(ea[1] / ea[0]);
  s.n = static_cast<int>(ea.size());
  s.k = 0.0;
  s.values.resize(ea.size());
  for (std::size_t i = 0; i < ea.size(); ++i)
    s.values[i] = a.delta_psi_dot()[i] - b.delta_psi_dot()[i];
  return gamma1_norm(s, q);
}

CaseSetup make_case_setup(const GasParameters& gas, double b, double t_min,
                          double t_max, int n_t, int n_theta,
                          const IterationOptions& opt) {
  CaseSetup cs;
  cs.gas = gas;
  cs.b = b;
  cs.opt = opt;
  TauOptions topt;
  topt.nu_cap = opt.nu0;
  cs.polar = polar_point(gas, b, topt);
  BackgroundOptions bopt;
  bopt.tau = topt;
  cs.bg = solve_background(gas, b, bopt);
  cs.grid.t_min = t_min;
  cs.grid.t_max = t_max;
  cs.grid.n_t = n_t;
  cs.grid.n_theta = n_theta;
  cs.grid.omega0 = cs.bg.omega0;
  cs.grid.omega1 = cs.bg.omega1;
  cs.grid.validate();
  cs.cone = ConeBoundary::unperturbed(cs.bg.omega0);
  cs.upstream = UpstreamField::unperturbed(cs.bg.omega0, cs.bg.omega1);
  cs.opt.solver.q = opt.q;
  return cs;
}

BackgroundOnGrid background_on_grid(const CaseSetup& cs) {
  BackgroundOnGrid b;
  const StripGrid& g = cs.grid;
  Pchip pu(cs.bg.sigma, cs.bg.u0), pv(cs.bg.sigma, cs.bg.v0);
  b.sigma.resize(g.n_theta);
  b.u0.resize(g.n_theta);
  b.v0.resize(g.n_theta);
  b.c0sq.resize(g.n_theta);
  b.a0.resize(g.n_theta);
  b.m0.resize(g.n_theta);
  b.d0.resize(g.n_theta);
  b.u0p.resize(g.n_theta);
  b.v0p.resize(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) {
    double sigma = std::clamp(1.0 / std::tan(g.theta(j)), cs.bg.tau, cs.bg.kappa);
    b.sigma[j] = sigma;
    double u = pu(sigma), v = pv(sigma);
    b.u0[j] = u;
    b.v0[j] = v;
    double c2 = sound_speed_sq_from_speed(std::hypot(u, v), cs.gas);
    b.c0sq[j] = c2;
    b.a0[j] = 1.0 - u * u / c2;
    b.m0[j] = u * v / c2;
    b.d0[j] = 1.0 - v * v / c2;
    BackgroundRhs r = background_rhs(sigma, u, v, cs.gas);
    b.u0p[j] = r.du;
    b.v0p[j] = r.dv;
  }
  b.u0_gamma0 = b.u0.front();  // theta(0) = omega0
  b.post = cs.polar.post;
  auto ab = alpha_beta(cs.polar, cs.gas);
  b.alpha = ab.first;
  b.beta = ab.second;
  return b;
}

std::pair<double, double> map_to_physical(double xi, double eta,
                                          const ShockFront& front,
                                          const ConeBoundary& cone) {
  if (eta < 0.0) throw DomainError("map_to_physical: eta must be >= 0");
  double x = xi + front.delta_psi(eta);
  double y = eta + cone.delta_phi_int(x) +
             cone.tan_omega0() * front.delta_psi(eta);
  return {x, y};
}

std::pair<double, double> map_to_fixed(double x, double y,
                                       const ShockFront& front,
                                       const ConeBoundary& cone) {
  // eta solves eta + dphi(x) + tan(w0) dpsi(eta) = y; then xi = x - dpsi(eta)
  double c = y - cone.delta_phi_int(x);
  double t0 = cone.tan_omega0();
  double eta = c;
  for (int it = 0; it < 100; ++it) {
    double f = eta + t0 * front.delta_psi(eta) - c;
    double df = 1.0 + t0 * front.delta_psi_dot_at(eta);
    double step = f / df;
    eta -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(eta))) break;
  }
  return {x - front.delta_psi(eta), eta};
}

JacobianPair jacobians(double xi, double eta, const ShockFront& front,
                       const ConeBoundary& cone) {
  auto [x, y] = map_to_physical(xi, eta, front, cone);
  (void)y;
  double psid = front.psi_dot(eta);
  double phip = cone.phi_prime(x);
  double t0 = cone.tan_omega0();
  double c1 = front.cot_omega1();
  double den = 1.0 - t0 * (c1 - psid);
  if (std::abs(den) < 1e-10)
    throw FoldError("jacobians: degenerate transformation denominator");
  JacobianPair J;
  J.fwd[0][0] = (1.0 - phip * (c1 - psid)) / den;
  J.fwd[0][1] = (c1 - psid) / den;
  J.fwd[1][0] = (t0 - phip) / den;
  J.fwd[1][1] = 1.0 / den;
  J.inv[0][0] = 1.0;
  J.inv[0][1] = psid - c1;
  J.inv[1][0] = phip - t0;
  J.inv[1][1] = 1.0 + phip * (psid - c1);
  return J;
}

GDerivatives assemble_G(const FlowState& dn, const FlowState& up,
                        const GasParameters& gas) {
  const double g = gas.gamma;
  double ju = dn.u - up.u, jv = dn.v - up.v;
  double jru = dn.rho * dn.u - up.rho * up.u;
  double jrv = dn.rho * dn.v - up.rho * up.v;
  GDerivatives out;
  out.G = jru * ju + jrv * jv;
  double rg = std::pow(dn.rho, 2.0 - g);   // rho^{2-gamma}
  double rgm = std::pow(up.rho, 2.0 - g);
  out.du = jru + (dn.rho - dn.u * dn.u * rg) * ju - dn.u * dn.v * rg * jv;
  out.dv = -dn.u * dn.v * rg * ju + jrv + (dn.rho - dn.v * dn.v * rg) * jv;
  out.dum = -jru - ju * (up.rho - up.u * up.u * rgm) + jv * up.u * up.v * rgm;
  out.dvm = ju * up.u * up.v * rgm - jrv - jv * (up.rho - up.v * up.v * rgm);
  return out;
}

std::pair<double, double> alpha_beta(const PolarPoint& polar,
                                     const GasParameters& gas) {
  FlowState up{1.0, 0.0, gas.rho_inf};
  GDerivatives d = assemble_G(polar.post, up, gas);
  if (std::abs(d.du) < 1e-8)
    throw DegeneracyError("alpha_beta: alpha below 1e-8");
  return {d.du, d.dv};
}

namespace {

struct UpstreamAtShock {
  FlowState Um;
  double x = 0.0, y = 0.0;
};

UpstreamAtShock upstream_at_shock(double eta, const ShockFront& front,
                                  const CaseSetup& cs) {
  UpstreamAtShock r;
  r.x = front.psi(eta);
  r.y = eta + cs.cone.delta_phi_int(r.x) +
        cs.cone.tan_omega0() * front.delta_psi(eta);
  if (!cs.upstream.in_extended_sector(r.x, r.y))
    throw AdmissibilityError("shock point left the extended sector");
  r.Um.u = 1.0 + cs.upstream.delta_u(r.x, r.y);
  r.Um.v = cs.upstream.delta_v(r.x, r.y);
  r.Um.rho = density_from_speed(std::hypot(r.Um.u, r.Um.v), cs.gas);
  return r;
}

}  // namespace

LinearData assemble_rhs(const VectorField& deltaU, const ShockFront& front,
                        const CaseSetup& cs, const BackgroundOnGrid& bgr) {
  const StripGrid& g = cs.grid;
  const double q = cs.opt.q;
  if (cs.epsilon > 0.0) {
    double n = pair_sobolev_norm(deltaU.u, deltaU.v, 1, q);
    if (n > cs.opt.admis_cap * cs.epsilon)
      throw AdmissibilityError("assemble_rhs: delta-U outside O_{M eps}: " +
                               std::to_string(n));
  }
  const double tan_w0 = cs.cone.tan_omega0();

  // finite-difference sector derivatives of the delta fields
  WeightedField dux = d_x_fd(deltaU.u), duy = d_y_fd(deltaU.u);
  WeightedField dvx = d_x_fd(deltaU.v), dvy = d_y_fd(deltaU.v);

  LinearData data;
  data.f1 = WeightedField(g, 1.0);
  data.f2 = WeightedField(g, 1.0);
  data.g0 = RaySamples::on_grid(g, 0.0);
  data.g1 = RaySamples::on_grid(g, 0.0);

  for (int i = 0; i < g.n_t; ++i) {
    double r = g.r(i);
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      double xi = r * std::cos(th), eta = r * std::sin(th);
      double dpsi = front.delta_psi(eta);
      double dpsid = front.delta_psi_dot_at(eta);
      double x = xi + dpsi;
      double dy = cs.cone.delta_phi_int(x) + tan_w0 * dpsi;
      double y = eta + dy;
      double dphip = cs.cone.delta_phi_prime(x);
      double denom = 1.0 + tan_w0 * dpsid;
      if (std::abs(denom) < 1e-10)
        throw FoldError("assemble_rhs: fold in the shock map");

      double u = bgr.u0[j] + deltaU.u.at(i, j);
      double v = bgr.v0[j] + deltaU.v.at(i, j);
      double c2 = sound_speed_sq_from_speed(std::hypot(u, v), cs.gas);
      double a = 1.0 - u * u / c2;
      double m = u * v / c2;
      double dd = 1.0 - v * v / c2;

      // full derivatives: analytic background part + FD delta part
      double bx_u = bgr.u0p[j] / eta, bx_v = bgr.v0p[j] / eta;
      double by_u = -bgr.sigma[j] * bgr.u0p[j] / eta;
      double by_v = -bgr.sigma[j] * bgr.v0p[j] / eta;
      double Dxu = bx_u + dux.at(i, j), Dyu = by_u + duy.at(i, j);
      double Dxv = bx_v + dvx.at(i, j), Dyv = by_v + dvy.at(i, j);

      double D1u = Dxu + tan_w0 * Dyu, D1v = Dxv + tan_w0 * Dyv;
      double D2u = -dpsid * Dxu + Dyu, D2v = -dpsid * Dxv + Dyv;

      double inv_gap = dy / (eta * y);  // 1/eta - 1/y
      double f1 = inv_gap * v;
      f1 += (dphip / denom) * (a * D2u - m * D2v);
      f1 += (dpsid / denom) * (-m * D1u + dd * D1v);
      f1 += (bgr.a0[j] - a) * Dxu - (bgr.m0[j] - m) * (Dyu + Dxv) +
            (bgr.d0[j] - dd) * Dyv;
      data.f1.at(i, j) = f1;
      data.f2.at(i, j) = (dphip / denom) * D2v - (dpsid / denom) * D1u;
    }
    // Gamma_0: g0 = u0 (phi'(x) - tan w0) at the cone-ray node
    {
      double xi = r * std::cos(g.omega0), eta = r * std::sin(g.omega0);
      double x = xi + front.delta_psi(eta);
      data.g0.values[i] = bgr.u0_gamma0 * cs.cone.delta_phi_prime(x);
    }
    // Gamma_1: g1 = alpha du + beta dv - G(U; U-) at the mapped shock point
    {
      double eta = r * std::sin(g.omega1);
      UpstreamAtShock us = upstream_at_shock(eta, front, cs);
      FlowState dn;
      dn.u = bgr.post.u + deltaU.u.at(i, g.n_theta - 1);
      dn.v = bgr.post.v + deltaU.v.at(i, g.n_theta - 1);
      dn.rho = density_from_speed(std::hypot(dn.u, dn.v), cs.gas);
      GDerivatives gd = assemble_G(dn, us.Um, cs.gas);
      data.g1.values[i] = bgr.alpha * deltaU.u.at(i, g.n_theta - 1) +
                          bgr.beta * deltaU.v.at(i, g.n_theta - 1) - gd.G;
    }
  }
  return data;
}

CoefficientDeviations linearized_deviations(const ShockFront& front,
                                            const CaseSetup& cs,
                                            const BackgroundOnGrid& bgr) {
  const StripGrid& g = cs.grid;
  CoefficientDeviations dev = CoefficientDeviations::zero(g);
  dev.dA = MatrixField(g);
  dev.dB = MatrixField(g);
  for (int i = 0; i < g.n_t; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * g.n_theta + j;
      dev.dA.e00[idx] = -bgr.u0[j] * bgr.u0[j] / bgr.c0sq[j];
      dev.dA.e01[idx] = -bgr.m0[j];
      dev.dB.e00[idx] = -bgr.m0[j];
      dev.dB.e01[idx] = -bgr.v0[j] * bgr.v0[j] / bgr.c0sq[j];
    }
  // Gamma_0: alpha_0 = (-phi'(x), 1); Gamma_1 normalized by alpha: (1, beta/alpha)
  for (int i = 0; i < g.n_t; ++i) {
    double xi = g.r(i) * std::cos(g.omega0), eta = g.r(i) * std::sin(g.omega0);
    double x = xi + front.delta_psi(eta);
    dev.dalpha0.c0[i] = -cs.cone.delta_phi_prime(x);
    dev.dalpha1.c1[i] = bgr.beta / bgr.alpha + front.cot_omega1();
  }
  return dev;
}

InnerResult inner_solve_J(const ShockFront& front, const CaseSetup& cs,
                          const BackgroundOnGrid& bgr) {
  const StripGrid& g = cs.grid;
  CoefficientDeviations dev = linearized_deviations(front, cs, bgr);
  InnerResult out;
  out.deltaU.u = WeightedField(g, 0.0);
  out.deltaU.v = WeightedField(g, 0.0);
  // decay gate: strict on the first pass (pure perturbation data), relaxed
  // once iterates contribute their own solution-class tails
  SolverOptions sopt = cs.opt.solver;
  for (int it = 0; it < cs.opt.max_inner; ++it) {
    LinearData data = assemble_rhs(out.deltaU, front, cs, bgr);
    // scale the Gamma_1 condition by alpha to match the normalized vector
    for (auto& val : data.g1.values) val /= bgr.alpha;
    PerturbedResult step = solve_perturbed(dev, data, sopt, cs.opt.perturbed);
    sopt.check_decay = false;
    double diff = pair_sobolev_norm(step.U.u - out.deltaU.u,
                                    step.U.v - out.deltaU.v, 1, cs.opt.q);
    out.diffs.push_back(diff);
    out.deltaU = std::move(step.U);
    out.lin_residual = std::move(step.residual);
    out.last_lin = step.diag;
    if (diff < cs.opt.tol_inner) break;
    if (out.diffs.size() >= 2) {
      double rate = out.diffs.back() / out.diffs[out.diffs.size() - 2];
      if (rate >= cs.opt.rate_cap)
        throw NonContractionError("inner_solve_J: rate " + std::to_string(rate));
    }
  }
  if (!out.diffs.empty() && out.diffs.back() >= cs.opt.tol_inner)
    throw NonContractionError("inner_solve_J: iteration cap reached");
  RateReport rr = contraction_diagnostics(out.diffs);
  out.rate = rr.max_rate;
  out.iterations = static_cast<int>(out.diffs.size());
  return out;
}

ShockUpdate update_shock_JS(const ShockFront& front, const VectorField& deltaU,
                            const CaseSetup& cs, const BackgroundOnGrid& bgr) {
  const StripGrid& g = cs.grid;
  const double tan_w0 = cs.cone.tan_omega0();
  const double cot_w1 = front.cot_omega1();
  const double factor = 1.0 - tan_w0 * cot_w1;
  std::vector<double> psid(g.n_t), rh1(g.n_t), rh2(g.n_t);
  for (int i = 0; i < g.n_t; ++i) {
    double eta = g.r(i) * std::sin(g.omega1);
    UpstreamAtShock us = upstream_at_shock(eta, front, cs);
    FlowState dn;
    dn.u = bgr.post.u + deltaU.u.at(i, g.n_theta - 1);
    dn.v = bgr.post.v + deltaU.v.at(i, g.n_theta - 1);
    dn.rho = density_from_speed(std::hypot(dn.u, dn.v), cs.gas);
    double ju = dn.u - us.Um.u, jv = dn.v - us.Um.v;
    double phip = cs.cone.phi_prime(us.x);
    double den = ju + phip * jv;
    if (std::abs(den) < 1e-8)
      throw ShockDegeneracyError("update_shock_JS: vanishing [u] + phi'[v]");
    psid[i] = -jv * factor / den;
    rh1[i] = assemble_G(dn, us.Um, cs.gas).G;
    rh2[i] = front.psi_dot_node(i) - psid[i];
  }
  ShockUpdate out;
  out.front = ShockFront::from_slope(g, g.omega1, psid);
  out.rh1 = std::move(rh1);
  out.rh2 = std::move(rh2);
  return out;
}

CaseSolution solve_case(const CaseSetup& cs, const ShockFront* init) {
  const StripGrid& g = cs.grid;
  const double q = cs.opt.q;
  if (cs.gas.nu > cs.opt.nu0)
    throw AdmissibilityError("solve_case: nu exceeds nu0");
  double eps_gate =
      cs.opt.eps_margin * std::pow(cs.gas.nu, 1.0 / (cs.gas.gamma - 1.0));
  if (cs.epsilon > 0.0 && cs.epsilon > eps_gate)
    throw AdmissibilityError("solve_case: eps " + std::to_string(cs.epsilon) +
                             " violates the margin " + std::to_string(eps_gate));

  CaseSolution sol;
  sol.bgr = background_on_grid(cs);
  sol.front = init ? *init : ShockFront::background(g, g.omega1);
  CaseSetup run = cs;  // the decay gate loosens after the first outer pass
  for (int k = 0; k < cs.opt.max_outer; ++k) {
    InnerResult inner = inner_solve_J(sol.front, run, sol.bgr);
    run.opt.solver.check_decay = false;
    ShockUpdate upd = update_shock_JS(sol.front, inner.deltaU, cs, sol.bgr);
    double diff = front_slope_distance(upd.front, sol.front, q);
    sol.outer_diffs.push_back(diff);
    sol.inner_iterations.push_back(inner.iterations);
    sol.inner_rate = std::max(sol.inner_rate, inner.rate);
    sol.deltaU = std::move(inner.deltaU);
    sol.lin_residual = std::move(inner.lin_residual);
    sol.front = std::move(upd.front);
    sol.rh1 = std::move(upd.rh1);
    sol.rh2 = std::move(upd.rh2);
    sol.last_lin = inner.last_lin;
    sol.outer_iterations = k + 1;
    if (diff < cs.opt.tol_outer) break;
    if (sol.outer_diffs.size() >= 2) {
      double rate = sol.outer_diffs.back() / sol.outer_diffs[sol.outer_diffs.size() - 2];
      if (rate >= cs.opt.rate_cap)
        throw NonContractionError("solve_case: outer rate " + std::to_string(rate));
    }
  }
  if (!sol.outer_diffs.empty() && sol.outer_diffs.back() >= cs.opt.tol_outer)
    throw NonContractionError("solve_case: outer iteration cap reached");
  RateReport rr = contraction_diagnostics(sol.outer_diffs);
  sol.outer_rate = rr.max_rate;
  sol.norm_dU = pair_sobolev_norm(sol.deltaU.u, sol.deltaU.v, 1, q);
  sol.norm_dpsidot = sol.front.slope_norm(q);
  if (cs.epsilon > 0.0) {
    sol.recorded_M = sol.norm_dU / cs.epsilon;
    sol.recorded_MS = sol.norm_dpsidot / cs.epsilon;
  }
  // refresh the R-H residual ledger against the final front
  ShockUpdate fin = update_shock_JS(sol.front, sol.deltaU, cs, sol.bgr);
  sol.rh1 = fin.rh1;
  sol.rh2 = fin.rh2;
  return sol;
}

}  // namespace conoshock
