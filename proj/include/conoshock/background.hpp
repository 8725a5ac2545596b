#ifndef CONOSHOCK_BACKGROUND_HPP
#define CONOSHOCK_BACKGROUND_HPP

#include <vector>

#include "conoshock/gas.hpp"
#include "conoshock/polar.hpp"

namespace conoshock {

/// Self-similar conical flow between the straight shock and the cone,
/// integrated in sigma = x/y from the shock foot to the slip event.

struct SelfSimilarSolution {
  std::vector<double> sigma;  // increasing, [tau, kappa]
  std::vector<double> u0, v0;
  double tau = 0.0;     // shock cotangent
  double kappa = 0.0;   // cone cotangent (event location)
  double omega0 = 0.0;  // arccot(kappa)
  double omega1 = 0.0;  // arccot(tau)
  double b = 0.0;       // flow tangent at the shock
  GasParameters gas;
};

struct BackgroundOptions {
  int n_steps = 2000;        // RK4 steps spanning [tau, 1/b]
  double event_tol = 1e-12;  // bisection tolerance on sigma
  double d_floor = 1e-10;    // sonic-degeneracy guard on D(sigma)
  TauOptions tau;            // forwarded to the polar root solve
};

// Right-hand side of the solved system: du/ds = -v/D, dv/ds = s v / D with
// D = (1 - u^2/c^2) + 2 u v s / c^2 + (1 - v^2/c^2) s^2.
struct BackgroundRhs {
  double du = 0.0, dv = 0.0, D = 0.0;
};
BackgroundRhs background_rhs(double sigma, double u, double v,
                             const GasParameters& gas,
                             double d_floor = 1e-10);

// Integrates from sigma = tau with the polar state; stops at the first sigma
// with u - sigma v = 0 (cone slip), located on the dense output.
SelfSimilarSolution solve_background(const GasParameters& gas, double b,
                                     const BackgroundOptions& opt = {});

// Evaluate the profile at a ray angle theta in [omega0, omega1]; density from
// Bernoulli.
FlowState background_at_theta(const SelfSimilarSolution& sol, double theta);

// Profile derivatives (du0/dsigma, dv0/dsigma) at theta via the ODE itself.
BackgroundRhs background_rhs_at_theta(const SelfSimilarSolution& sol, double theta);

struct BackgroundReport {
  bool u0_strictly_decreasing = false;
  bool v0_strictly_increasing = false;
  bool q0_nonincreasing = false;
  bool m0_nonincreasing = false;
  bool subsonic = false;            // M0 < 1 everywhere
  bool kappa_in_range = false;      // 0 < kappa < 1/b
  bool v0_max_bound = false;        // v0(kappa) < u0(tau) tan(omega0)
  bool slip_ok = false;             // |u0(kappa) - kappa v0(kappa)| < 1e-10
  double slip_residual = 0.0;
  double max_mach = 0.0;
  bool all() const {
    return u0_strictly_decreasing && v0_strictly_increasing && q0_nonincreasing &&
           m0_nonincreasing && subsonic && kappa_in_range && v0_max_bound && slip_ok;
  }
};
BackgroundReport verify_background(const SelfSimilarSolution& sol);

// Bisection wrapper: find b such that the cone angle omega0(b) matches the
// target.
double solve_b_for_omega0(const GasParameters& gas, double omega0_target,
                          const BackgroundOptions& opt = {});

}  // namespace conoshock

#endif
