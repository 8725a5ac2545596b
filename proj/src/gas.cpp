#include "conoshock/gas.hpp"

#include <cmath>
#include <string>

#include "conoshock/errors.hpp"

namespace conoshock {

namespace {
constexpr double kCavitationGuard = 1e-12;

void check_gamma(double gamma) {
  if (!(gamma > 1.0) || !(gamma <= 2.0))
    throw DomainError("gamma must lie in (1, 2], got " + std::to_string(gamma));
}
}  // namespace

GasParameters GasParameters::from_rho_inf(double gamma, double rho_inf) {
  check_gamma(gamma);
  if (!(rho_inf > 0.0)) throw DomainError("rho_inf must be positive");
  GasParameters g;
  g.gamma = gamma;
  g.rho_inf = rho_inf;
  g.nu = std::pow(rho_inf, gamma - 1.0);
  g.kappa_inf = bernoulli_constant(rho_inf, gamma);
  g.kappa_tilde = (gamma - 1.0) * g.kappa_inf;
  return g;
}

GasParameters GasParameters::from_nu(double gamma, double nu) {
  check_gamma(gamma);
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  return from_rho_inf(gamma, std::pow(nu, 1.0 / (gamma - 1.0)));
}

GasParameters GasParameters::from_mach(double gamma, double mach_inf) {
  if (!(mach_inf > 1.0)) throw DomainError("upstream Mach number must exceed 1");
  return from_nu(gamma, 1.0 / (mach_inf * mach_inf));
}

double GasParameters::mach_inf() const { return 1.0 / std::sqrt(nu); }

double speed(const FlowState& s) { return std::hypot(s.u, s.v); }

double sound_speed(const FlowState& s, double gamma) {
  if (!(s.rho > 0.0)) throw DomainError("sound_speed: non-positive density");
  return std::pow(s.rho, 0.5 * (gamma - 1.0));
}

double bernoulli_constant(double rho_inf, double gamma) {
  if (!(rho_inf > 0.0)) throw DomainError("bernoulli_constant: rho_inf <= 0");
  if (!(gamma > 1.0)) throw DomainError("bernoulli_constant: gamma <= 1");
  return 0.5 + std::pow(rho_inf, gamma - 1.0) / (gamma - 1.0);
}

double density_from_speed(double q, const GasParameters& gas) {
  double arg = gas.kappa_tilde - 0.5 * (gas.gamma - 1.0) * q * q;
  if (arg <= kCavitationGuard)
    throw CavitationError("density_from_speed: cavitation at q = " +
                          std::to_string(q));
  return std::pow(arg, 1.0 / (gas.gamma - 1.0));
}

double sound_speed_sq_from_speed(double q, const GasParameters& gas) {
  double arg = gas.kappa_tilde - 0.5 * (gas.gamma - 1.0) * q * q;
  if (arg <= kCavitationGuard)
    throw CavitationError("sound_speed_sq_from_speed: cavitation");
  return arg;
}

double mach(const FlowState& s, double gamma) {
  return speed(s) / sound_speed(s, gamma);
}

FlowState scale_state(double u, double v, double rho, double u_inf,
                      double gamma) {
  check_gamma(gamma);
  if (u_inf == 0.0) throw DomainError("scale_state: u_inf must be nonzero");
  FlowState s;
  s.u = u / u_inf;
  s.v = v / u_inf;
  s.rho = rho / std::pow(u_inf, 2.0 / (gamma - 1.0));
  return s;
}

bool bernoulli_consistent(const FlowState& s, const GasParameters& gas,
                          double tol) {
  double rho = density_from_speed(speed(s), gas);
  return std::abs(s.rho - rho) <= tol * std::max(1.0, std::abs(rho));
}

}  // namespace conoshock
