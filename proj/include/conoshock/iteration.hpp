#ifndef CONOSHOCK_ITERATION_HPP
#define CONOSHOCK_ITERATION_HPP

#include <utility>
#include <vector>

#include "conoshock/background.hpp"
#include "conoshock/gas.hpp"
#include "conoshock/perturbation.hpp"
#include "conoshock/sector.hpp"
#include "conoshock/strip.hpp"

namespace conoshock {

/// Nonlinear machinery: coordinate map to the fixed sector, data assembly for
/// the linearized problem, the inner flow iteration and the shock-front
/// update, and the outer driver.

/// Approximate shock front psi(eta) on the Gamma_1 log grid. The deviations
/// from the background straight front are primary; psi is reconstructed by
/// trapezoid integration of psi_dot from psi(0) = 0.
class ShockFront {
 public:
  ShockFront() = default;
  static ShockFront background(const StripGrid& g, double omega1);
  static ShockFront from_slope(const StripGrid& g, double omega1,
                               std::vector<double> psi_dot);

  const std::vector<double>& eta() const { return eta_; }
  const std::vector<double>& delta_psi_dot() const { return dpsi_dot_; }
  double cot_omega1() const { return cot_w1_; }

  double psi_dot(double eta) const;   // cot(omega1) + deviation
  double psi(double eta) const;       // eta cot(omega1) + integral of deviation
  double delta_psi(double eta) const;
  double delta_psi_dot_at(double eta) const;

  double psi_dot_node(int i) const { return cot_w1_ + dpsi_dot_[i]; }
  double psi_node(int i) const { return eta_[i] * cot_w1_ + dpsi_[i]; }

  // combined Gamma_1 norm of psi_dot - cot(omega1)
  double slope_norm(double q) const;

 private:
  std::vector<double> eta_, dpsi_dot_, dpsi_;
  double cot_w1_ = 0.0;
  void integrate();
};

double front_slope_distance(const ShockFront& a, const ShockFront& b, double q);

struct IterationOptions {
  double tol_inner = 1e-9;
  double tol_outer = 1e-8;
  int max_inner = 50;
  int max_outer = 30;
  double rate_cap = 0.95;
  double nu0 = 0.05;          // admissible cap on nu
  double eps_margin = 0.1;    // require eps <= margin * nu^(1/(gamma-1))
  double admis_cap = 50.0;    // delta-U admissibility, in units of eps
  double q = 4.0;
  SolverOptions solver;
  PerturbedOptions perturbed;
};

/// Everything fixed for one case: gas, background, grids, perturbations.
struct CaseSetup {
  GasParameters gas;
  double b = 1.0;
  PolarPoint polar;
  SelfSimilarSolution bg;
  StripGrid grid;
  ConeBoundary cone = ConeBoundary::unperturbed(0.5);
  UpstreamField upstream = UpstreamField::unperturbed(0.5, 1.0);
  double epsilon = 0.0;
  IterationOptions opt;
};

// Solves background + polar and fills grid angles; cone/upstream/epsilon are
// set afterwards by the caller.
CaseSetup make_case_setup(const GasParameters& gas, double b, double t_min,
                          double t_max, int n_t, int n_theta,
                          const IterationOptions& opt = {});

/// Background profile cached on the theta rows of the sector grid.
struct BackgroundOnGrid {
  std::vector<double> sigma;             // cot(theta_j)
  std::vector<double> u0, v0, c0sq;
  std::vector<double> a0, m0, d0;        // 1-u^2/c^2, uv/c^2, 1-v^2/c^2
  std::vector<double> u0p, v0p;          // d/dsigma via the ODE
  double u0_gamma0 = 0.0;                // trace on the cone ray
  FlowState post;                        // U0(omega1)
  double alpha = 0.0, beta = 0.0;
};
BackgroundOnGrid background_on_grid(const CaseSetup& cs);

// Fixed-domain point to physical coordinates (explicit in x, then y).
std::pair<double, double> map_to_physical(double xi, double eta,
                                          const ShockFront& front,
                                          const ConeBoundary& cone);

// Newton inverse of the map (scalar iteration in eta).
std::pair<double, double> map_to_fixed(double x, double y,
                                       const ShockFront& front,
                                       const ConeBoundary& cone);

struct JacobianPair {
  double fwd[2][2];  // d(xi,eta)/d(x,y)
  double inv[2][2];  // d(x,y)/d(xi,eta)
};
JacobianPair jacobians(double xi, double eta, const ShockFront& front,
                       const ConeBoundary& cone);

struct GDerivatives {
  double G = 0.0;
  double du = 0.0, dv = 0.0;    // w.r.t. downstream velocity
  double dum = 0.0, dvm = 0.0;  // w.r.t. upstream velocity
};
// G(U; U-) = [rho u][u] + [rho v][v], jumps downstream minus upstream, with
// the closed-form first derivatives.
GDerivatives assemble_G(const FlowState& down, const FlowState& up,
                        const GasParameters& gas);

// alpha = dG/du, beta = dG/dv at (U0(omega1); (1,0)).
std::pair<double, double> alpha_beta(const PolarPoint& polar,
                                     const GasParameters& gas);

// Data of the linearized problem for the current iterate, in the
// delta-structured form (identically zero at the unperturbed background).
LinearData assemble_rhs(const VectorField& deltaU, const ShockFront& front,
                        const CaseSetup& cs, const BackgroundOnGrid& bgr);

// Coefficient deviations of the linearized problem from the base operator:
// A(U0) - I, B(U0) - rot, the cone-slope boundary vector on Gamma_0 and the
// alpha-normalized R-H vector on Gamma_1.
CoefficientDeviations linearized_deviations(const ShockFront& front,
                                            const CaseSetup& cs,
                                            const BackgroundOnGrid& bgr);

struct InnerResult {
  VectorField deltaU;
  WeightedField lin_residual;  // residual field of the last linear solve
  std::vector<double> diffs;
  double rate = 0.0;
  int iterations = 0;
  SolveDiagnostics last_lin;
};
// Fixed point of delta-U -> solve_perturbed(data(delta-U)); the mapping J.
InnerResult inner_solve_J(const ShockFront& front, const CaseSetup& cs,
                          const BackgroundOnGrid& bgr);

struct ShockUpdate {
  ShockFront front;
  std::vector<double> rh1;  // G(U;U-) along Gamma_1 (203-1 residual)
  std::vector<double> rh2;  // psi_dot - Psi(U;U-;psi)   (203-2 defect)
};
// The mapping J_S: slope update from the second Rankine-Hugoniot condition.
ShockUpdate update_shock_JS(const ShockFront& front, const VectorField& deltaU,
                            const CaseSetup& cs, const BackgroundOnGrid& bgr);

struct CaseSolution {
  VectorField deltaU;
  ShockFront front;
  std::vector<double> rh1, rh2;
  double norm_dU = 0.0;        // W^{1,q}_{(0)}
  double norm_dpsidot = 0.0;   // Gamma_1 combined norm
  double recorded_M = 0.0, recorded_MS = 0.0;
  double inner_rate = 0.0;     // max over outer passes
  double outer_rate = 0.0;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  std::vector<double> outer_diffs;
  SolveDiagnostics last_lin;
  WeightedField lin_residual;
  BackgroundOnGrid bgr;
};
// Outer driver: psi_{k+1} = J_S(psi_k, J(psi_k)) until the slope settles.
// A nonnull `init` seeds the outer iteration instead of the background front.
CaseSolution solve_case(const CaseSetup& cs, const ShockFront* init = nullptr);

}  // namespace conoshock

#endif
