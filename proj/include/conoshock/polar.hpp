#ifndef CONOSHOCK_POLAR_HPP
#define CONOSHOCK_POLAR_HPP

#include <utility>
#include <vector>

#include "conoshock/gas.hpp"

namespace conoshock {

/// Straight-shock algebra: the polar function F(tau, nu), its origin-continuous
/// root, the post-shock state and Rankine-Hugoniot residuals.

// F(tau, nu) = tau - (b+tau)/(1-b tau) * D^(-1/(gamma-1)) * nu^(1/(gamma-1)),
// with D = (gamma-1)(1 + 2 tau/b - tau^2) / (2 (1 + tau/b)^2) + nu.
double polar_F(double tau, double nu, double gamma, double b);

struct TauOptions {
  double bracket_lo = 1e-16;
  double nu_cap = 0.05;        // admissible cap on nu
  int scan_points = 4000;      // sign-change scan resolution
  double bisect_tol = 1e-13;
  int newton_steps = 3;
  bool require_unique = false; // throw AmbiguityError when several roots exist
};

struct TauResult {
  double tau = 0.0;
  std::vector<double> all_roots;  // every root located in the scan bracket
  bool ambiguous = false;         // more than one root was found
  double residual = 0.0;          // |F(tau, nu)|
};

// Smallest positive root of F(., nu) = 0, the branch continuous through
// tau(0) = 0. Additional roots (the strong-shock branch) are reported in
// the diagnostics, not returned.
TauResult solve_tau(double nu, double gamma, double b, const TauOptions& opt = {});

// (BgS05): u = tau/(b+tau), v = b u, rho = rho_inf (b+tau)/(tau (1 - b tau)).
FlowState post_shock_state(double tau, double b, double rho_inf);

// Straight-shock residuals r1 = [rho u] - tau [rho v], r2 = [v] + tau [u],
// jumps downstream minus upstream.
std::pair<double, double> rh_residual(const FlowState& upstream,
                                      const FlowState& downstream, double tau);

// Curved-front pair: ([rho u][u] + [rho v][v], [v] + phi' [u]).
std::pair<double, double> rh_residual_curved(const FlowState& upstream,
                                             const FlowState& downstream,
                                             double phi_prime);

struct PolarPoint {
  double b = 0.0;
  double tau = 0.0;
  double nu = 0.0;
  double omega1 = 0.0;  // arccot(tau)
  FlowState post;
};

// solve_tau + post_shock_state with the PolarPoint invariants enforced.
PolarPoint polar_point(const GasParameters& gas, double b,
                       const TauOptions& opt = {});

struct AppleSample {
  double omega1 = 0.0;
  double tau = 0.0;
  double u = 0.0, v = 0.0, rho = 0.0;
  double turning_angle = 0.0;
  double mach_post = 0.0;
};

// Post-shock locus over shock angles from the Mach angle to the normal shock,
// computed directly from the jump conditions (independent of polar_F).
std::vector<AppleSample> emit_apple_curve(double gamma, double nu, int samples);

}  // namespace conoshock

#endif
