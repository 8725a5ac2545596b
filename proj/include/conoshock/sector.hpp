#ifndef CONOSHOCK_SECTOR_HPP
#define CONOSHOCK_SECTOR_HPP

#include <complex>
#include <vector>

#include "conoshock/numerics.hpp"
#include "conoshock/strip.hpp"

namespace conoshock {

/// Singular linear elliptic core: Neumann problem for
///   phi_xx + phi_yy + phi_y / y = f,
///   phi_y - tan(w0) phi_x = g0 on Gamma_0,  phi_x - cot(w1) phi_y = g1 on Gamma_1,
/// solved on the log-polar strip by the substitution w = e^{-t} phi (which
/// moves the transform line Im lambda = -1 to the real axis; the mode symbol
/// becomes -mu^2 + 3 i mu + 2) and per-frequency complex tridiagonal solves.

// a(theta, mu) = mu^2 + csc^2(theta) - cot^2(theta)/4; positive-definiteness
// gap of the Hartman-Wintner criterion. Contract: >= 1.
double hartman_wintner_gap(double theta, double mu);

struct ModeProblem {
  cplx lambda;                    // on the line Im lambda = -1 for the pipeline
  std::vector<double> cot_theta;  // coefficient samples at theta nodes
  double h_theta = 0.0;
  std::vector<cplx> rhs;          // transformed interior data per theta node
  cplx bc0{}, bc1{};              // Neumann data w'(omega0), w'(omega1)
  double cond_cap = 1e12;
};

// Solves w'' + cot(theta) w' + (-lambda^2 + i lambda) w = rhs with the Neumann
// data, second-order centered with ghost elimination at the rays.
std::vector<cplx> solve_mode(const ModeProblem& mp, double* cond_est = nullptr);

struct SolverOptions {
  int pad_factor = 2;        // periodic padding of the t-window
  double taper_frac = 0.05;  // cosine taper width as a fraction of n_t
  double decay_tol = 1e-8;   // end decay gate relative to the data peak
  double decay_floor = 1e-12;  // gate skipped below this absolute peak
  double cond_cap = 1e12;    // spectral-proximity cap on the mode systems
  double q = 4.0;            // integrability index for reported norms
  bool check_decay = true;
};

struct SolveDiagnostics {
  double residual_interior = 0.0;
  double residual_bc0 = 0.0;
  double residual_bc1 = 0.0;
  double stability_ratio = 0.0;
  int modes_solved = 0;
  double max_cond = 0.0;
  double max_imag = 0.0;  // leaked imaginary part after the inverse transform
  double rate = 0.0;      // contraction rate (perturbed solve only)
  int iterations = 0;
};

struct ScalarSolveResult {
  WeightedField phi;      // k = -1
  WeightedField phi_t;    // spectral d/dt of phi on the strip
  WeightedField residual; // discrete row residual against the untapered data
  SolveDiagnostics diag;
};

ScalarSolveResult solve_neumann_singular(const WeightedField& f,
                                         const RaySamples& g0,
                                         const RaySamples& g1,
                                         const SolverOptions& opt = {});

// Dirichlet Laplace lift: Phi_xx + Phi_yy = f2, Phi = 0 on both rays; the
// substituted symbol (i mu + 1)^2 never meets the Dirichlet theta-eigenvalues.
ScalarSolveResult solve_dirichlet_laplace(const WeightedField& f2,
                                          const SolverOptions& opt = {});

struct LinearData {
  WeightedField f1, f2;  // k = +1
  RaySamples g0, g1;     // k = 0
};

struct VectorField {
  WeightedField u, v;  // k = 0
};

struct FirstOrderResult {
  VectorField U;
  WeightedField residual;  // from the potential-level Neumann solve
  SolveDiagnostics diag;
};

// First-order system  U_x + Bhat U_y + Chat U = F,  U.alpha0_hat = g0,
// U.alpha1_hat = g1 via the Dirichlet lift and the potential reduction.
FirstOrderResult solve_first_order(const LinearData& data,
                                   const SolverOptions& opt = {});

// 2x2 matrix-valued grid field (deviation of a coefficient from its base).
struct MatrixField {
  StripGrid grid;
  std::vector<double> e00, e01, e10, e11;
  MatrixField() = default;
  explicit MatrixField(const StripGrid& g)
      : grid(g), e00(g.size(), 0.0), e01(g.size(), 0.0), e10(g.size(), 0.0),
        e11(g.size(), 0.0) {}
  bool zero = false;  // set when identically zero to skip work
};

struct RayVectorDeviation {
  std::vector<double> c0, c1;  // per t-node deviation of the two components
};

struct CoefficientDeviations {
  StripGrid grid;
  MatrixField dA, dB;  // measured in C^0
  MatrixField dC;      // measured in C^0_{(1)}
  RayVectorDeviation dalpha0, dalpha1;  // measured in C^1_{(0)}
  static CoefficientDeviations zero(const StripGrid& g);
};

// epsilon-hat of the coefficient deviations per the perturbation conditions.
double perturbation_size(const CoefficientDeviations& dev);

struct PerturbedOptions {
  double tol = 1e-9;      // successive W^{1,q}_{(0)} difference
  int max_iter = 60;
  double rate_cap = 0.95;
  double ehat_max = 0.5;  // a-priori gate on perturbation_size
};

struct PerturbedResult {
  VectorField U;
  WeightedField residual;  // of the last base-operator solve
  SolveDiagnostics diag;
  std::vector<double> diffs;  // successive-difference history
};

// Perturbed-coefficient solve by fixed point against the base operator:
// U^{n+1} = solve_first_order(data - (T - That) U^n).
PerturbedResult solve_perturbed(const CoefficientDeviations& dev,
                                const LinearData& data,
                                const SolverOptions& opt = {},
                                const PerturbedOptions& popt = {});

// Finite-difference strip derivatives (centered, one-sided at ends).
WeightedField d_t_fd(const WeightedField& f);
WeightedField d_theta_fd(const WeightedField& f);
// Physical sector derivatives e^{-t}(cos th d_t - sin th d_th) etc.
WeightedField d_x_fd(const WeightedField& f);
WeightedField d_y_fd(const WeightedField& f);

RaySamples ray_trace(const WeightedField& f, int j_row, double k);

}  // namespace conoshock

#endif
