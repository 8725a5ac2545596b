#ifndef CONOSHOCK_GAS_HPP
#define CONOSHOCK_GAS_HPP

namespace conoshock {

/// Thermodynamic closure for scaled potential flow: the upstream state is
/// (1, 0, rho_inf) and all speeds are measured against u_inf = 1.
struct GasParameters {
  double gamma = 2.0;        // adiabatic exponent, 1 < gamma <= 2
  double rho_inf = 0.0;      // scaled upstream density
  double nu = 0.0;           // rho_inf^(gamma-1) = 1/M_inf^2
  double kappa_inf = 0.0;    // Bernoulli constant
  double kappa_tilde = 0.0;  // (gamma-1)*kappa_inf

  static GasParameters from_rho_inf(double gamma, double rho_inf);
  static GasParameters from_nu(double gamma, double nu);
  static GasParameters from_mach(double gamma, double mach_inf);

  double mach_inf() const;
};

struct FlowState {
  double u = 0.0;
  double v = 0.0;
  double rho = 0.0;
};

double speed(const FlowState& s);
double sound_speed(const FlowState& s, double gamma);

double bernoulli_constant(double rho_inf, double gamma);

// rho = (kappa_tilde - (gamma-1) q^2 / 2)^(1/(gamma-1)); throws CavitationError
// when the argument drops below the guard threshold.
double density_from_speed(double q, const GasParameters& gas);

// Squared sound speed directly from Bernoulli, c^2 = kappa_tilde - (gamma-1)q^2/2.
double sound_speed_sq_from_speed(double q, const GasParameters& gas);

double mach(const FlowState& s, double gamma);

// (u, v, rho) in raw units -> scaled state with u_inf = 1.
FlowState scale_state(double u, double v, double rho, double u_inf, double gamma);

// |rho - rho(q)| below tol in relative terms.
bool bernoulli_consistent(const FlowState& s, const GasParameters& gas,
                          double tol = 1e-10);

}  // namespace conoshock

#endif
