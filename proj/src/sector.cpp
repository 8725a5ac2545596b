#include "conoshock/sector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conoshock/errors.hpp"
#include "conoshock/fft.hpp"
#include "conoshock/parallel.hpp"

namespace conoshock {

double hartman_wintner_gap(double theta, double mu) {
  if (!(theta > 0.0) || !(theta < M_PI))
    throw DomainError("hartman_wintner_gap: theta must lie in (0, pi)");
  double s = std::sin(theta), c = std::cos(theta);
  double csc2 = 1.0 / (s * s);
  double cot2 = (c * c) / (s * s);
  return mu * mu + csc2 - 0.25 * cot2;
}

std::vector<cplx> solve_mode(const ModeProblem& mp, double* cond_est) {
  const int n = static_cast<int>(mp.rhs.size());
  if (n < 3 || static_cast<int>(mp.cot_theta.size()) != n)
    throw DomainError("solve_mode: inconsistent sizes");
  const double h = mp.h_theta;
  const cplx s = -mp.lambda * mp.lambda + cplx(0.0, 1.0) * mp.lambda;
  std::vector<cplx> lower(n), diag(n), upper(n), rhs = mp.rhs;
  const double ih2 = 1.0 / (h * h);
  for (int j = 1; j + 1 < n; ++j) {
    lower[j] = ih2 - mp.cot_theta[j] / (2.0 * h);
    diag[j] = -2.0 * ih2 + s;
    upper[j] = ih2 + mp.cot_theta[j] / (2.0 * h);
  }
  // ghost elimination keeps the Neumann rows second-order
  diag[0] = -2.0 * ih2 + s;
  upper[0] = 2.0 * ih2;
  rhs[0] += (2.0 / h) * mp.bc0 - mp.cot_theta[0] * mp.bc0;
  diag[n - 1] = -2.0 * ih2 + s;
  lower[n - 1] = 2.0 * ih2;
  rhs[n - 1] += -(2.0 / h) * mp.bc1 - mp.cot_theta[n - 1] * mp.bc1;

  double cond = 0.0;
  std::vector<cplx> w = solve_tridiag(lower, diag, upper, rhs, &cond);
  if (cond_est) *cond_est = cond;
  if (cond > mp.cond_cap)
    throw SpectralProximityError("solve_mode: condition estimate " +
                                 std::to_string(cond) + " exceeds cap");
  std::vector<cplx> res = apply_tridiag(lower, diag, upper, w);
  double rmax = 0.0, scale = 0.0;
  for (int j = 0; j < n; ++j) {
    rmax = std::max(rmax, std::abs(res[j] - rhs[j]));
    scale = std::max(scale, std::abs(rhs[j]));
  }
  if (scale > 0.0 && rmax / scale > 1e-10)
    throw SolverError("solve_mode: direct-solve residual too large");
  return w;
}

namespace {

struct PipelineSetup {
  int nt = 0, nth = 0, N = 0;
  double ht = 0.0;
  std::vector<double> taper;  // over the padded index range
};

PipelineSetup make_setup(const StripGrid& g, const SolverOptions& opt) {
  PipelineSetup ps;
  ps.nt = g.n_t;
  ps.nth = g.n_theta;
  ps.N = opt.pad_factor * g.n_t;
  ps.ht = g.h_t();
  ps.taper.assign(ps.N, 0.0);
  int nr = std::max(2, static_cast<int>(std::lround(opt.taper_frac * ps.nt)));
  for (int i = 0; i < ps.nt; ++i) {
    double wl = (i < nr) ? 0.5 * (1.0 - std::cos(M_PI * i / nr)) : 1.0;
    int ir = ps.nt - 1 - i;
    double wr = (ir < nr) ? 0.5 * (1.0 - std::cos(M_PI * ir / nr)) : 1.0;
    ps.taper[i] = std::min(wl, wr);
  }
  return ps;
}

void decay_gate(const std::vector<std::vector<cplx>>& rows, int nt,
                const std::string& label, double tol, double floor) {
  double peak = 0.0, end = 0.0;
  for (const auto& row : rows) {
    for (int i = 0; i < nt; ++i) peak = std::max(peak, std::abs(row[i]));
    end = std::max({end, std::abs(row[0]), std::abs(row[nt - 1])});
  }
  if (peak > floor && end > tol * peak)
    throw TruncationError("insufficient end decay of " + label + ": " +
                          std::to_string(end / peak) + " of peak");
}

// Per-theta-row padded spectra, tapered (for the solve) and raw (for the
// residual measurement).
struct RowSpectra {
  std::vector<std::vector<cplx>> tap, raw;
};

RowSpectra transform_rows(const std::vector<std::vector<cplx>>& rows,
                          const PipelineSetup& ps) {
  RowSpectra rs;
  rs.tap.assign(rows.size(), std::vector<cplx>(ps.N, cplx(0.0)));
  rs.raw.assign(rows.size(), std::vector<cplx>(ps.N, cplx(0.0)));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (int i = 0; i < ps.nt; ++i) {
      rs.raw[j][i] = rows[j][i];
      rs.tap[j][i] = ps.taper[i] * rows[j][i];
    }
    fft_forward(rs.tap[j]);
    fft_forward(rs.raw[j]);
  }
  return rs;
}

enum class BcKind { Neumann, Dirichlet };

// Shared Fourier pipeline. `symbol(mu)` gives the zeroth-order mode
// coefficient; cot may be empty (no first-order theta term).
struct PipelineResult {
  WeightedField phi, phi_t, residual;
  SolveDiagnostics diag;
};

PipelineResult run_pipeline(const StripGrid& grid, BcKind kind,
                            const std::vector<std::vector<cplx>>& rhs_rows,
                            const std::vector<cplx>& bc0_line,
                            const std::vector<cplx>& bc1_line,
                            const SolverOptions& opt) {
  grid.validate();
  if (!(grid.omega0 > 0.0) || !(grid.omega1 < 0.5 * M_PI))
    throw DomainError("sector solver: angles must satisfy 0 < w0 < w1 < pi/2");
  PipelineSetup ps = make_setup(grid, opt);
  const int nt = ps.nt, nth = ps.nth, N = ps.N;
  const double hth = grid.h_theta();

  if (opt.check_decay) {
    decay_gate(rhs_rows, nt, "interior data", opt.decay_tol, opt.decay_floor);
    decay_gate({bc0_line}, nt, "Gamma_0 data", opt.decay_tol, opt.decay_floor);
    decay_gate({bc1_line}, nt, "Gamma_1 data", opt.decay_tol, opt.decay_floor);
  }

  RowSpectra rhs_sp = transform_rows(rhs_rows, ps);
  RowSpectra bc0_sp = transform_rows({bc0_line}, ps);
  RowSpectra bc1_sp = transform_rows({bc1_line}, ps);

  std::vector<double> cot(nth);
  for (int j = 0; j < nth; ++j) {
    double th = grid.theta(j);
    cot[j] = (kind == BcKind::Neumann) ? std::cos(th) / std::sin(th) : 0.0;
  }

  // mode solutions stored per theta row for the inverse transform
  std::vector<std::vector<cplx>> what(nth, std::vector<cplx>(N, cplx(0.0)));
  std::vector<std::vector<cplx>> wt_hat(nth, std::vector<cplx>(N, cplx(0.0)));
  std::vector<std::vector<cplx>> res_rows(nth, std::vector<cplx>(N, cplx(0.0)));
  std::vector<double> conds(N, 0.0);
  const double ih2 = 1.0 / (hth * hth);

  parallel_for(N, [&](int m) {
    double mu = fft_frequency(m, N, ps.ht);
    cplx imu(0.0, mu);
    if (kind == BcKind::Neumann) {
      ModeProblem mp;
      mp.lambda = cplx(mu, -1.0);  // symbol -mu^2 + 3 i mu + 2
      mp.cot_theta = cot;
      mp.h_theta = hth;
      mp.cond_cap = opt.cond_cap;
      mp.rhs.resize(nth);
      for (int j = 0; j < nth; ++j) mp.rhs[j] = rhs_sp.tap[j][m];
      mp.bc0 = bc0_sp.tap[0][m];
      mp.bc1 = bc1_sp.tap[0][m];
      double cond = 0.0;
      std::vector<cplx> w = solve_mode(mp, &cond);
      conds[m] = cond;
      // residual against the untapered data, same boundary-folded rows
      std::vector<cplx> lower(nth), diag(nth), upper(nth), eff(nth);
      const cplx s = -mp.lambda * mp.lambda + cplx(0.0, 1.0) * mp.lambda;
      for (int j = 1; j + 1 < nth; ++j) {
        lower[j] = ih2 - cot[j] / (2.0 * hth);
        diag[j] = -2.0 * ih2 + s;
        upper[j] = ih2 + cot[j] / (2.0 * hth);
        eff[j] = rhs_sp.raw[j][m];
      }
      diag[0] = -2.0 * ih2 + s;
      upper[0] = 2.0 * ih2;
      eff[0] = rhs_sp.raw[0][m] +
               ((2.0 / hth) - cot[0]) * bc0_sp.raw[0][m];
      diag[nth - 1] = -2.0 * ih2 + s;
      lower[nth - 1] = 2.0 * ih2;
      eff[nth - 1] = rhs_sp.raw[nth - 1][m] -
                     ((2.0 / hth) + cot[nth - 1]) * bc1_sp.raw[0][m];
      std::vector<cplx> aw = apply_tridiag(lower, diag, upper, w);
      for (int j = 0; j < nth; ++j) {
        what[j][m] = w[j];
        wt_hat[j][m] = imu * w[j];
        res_rows[j][m] = aw[j] - eff[j];
      }
    } else {
      // Dirichlet: interior unknowns only, symbol (i mu + 1)^2
      const cplx s = (imu + 1.0) * (imu + 1.0);
      const int ni = nth - 2;
      std::vector<cplx> lower(ni, ih2), diag(ni, -2.0 * ih2 + s),
          upper(ni, ih2), rhs(ni);
      for (int j = 0; j < ni; ++j) rhs[j] = rhs_sp.tap[j + 1][m];
      double cond = 0.0;
      std::vector<cplx> w = solve_tridiag(lower, diag, upper, rhs, &cond);
      conds[m] = cond;
      if (cond > opt.cond_cap)
        throw SpectralProximityError("dirichlet mode: condition cap exceeded");
      std::vector<cplx> eff(ni);
      for (int j = 0; j < ni; ++j) eff[j] = rhs_sp.raw[j + 1][m];
      std::vector<cplx> aw = apply_tridiag(lower, diag, upper, w);
      for (int j = 0; j < ni; ++j) {
        what[j + 1][m] = w[j];
        wt_hat[j + 1][m] = imu * w[j];
        res_rows[j + 1][m] = aw[j] - eff[j];
      }
    }
  });

  // inverse transforms and the unwind phi = e^t w
  PipelineResult out;
  out.phi = WeightedField(grid, -1.0);
  out.phi_t = WeightedField(grid, -1.0);
  out.residual = WeightedField(grid, 0.0);
  double max_imag = 0.0, res_int = 0.0, res_b0 = 0.0, res_b1 = 0.0;
  for (int j = 0; j < nth; ++j) {
    fft_inverse(what[j]);
    fft_inverse(wt_hat[j]);
    fft_inverse(res_rows[j]);
    for (int i = 0; i < nt; ++i) {
      double e = std::exp(grid.t(i));
      max_imag = std::max(max_imag,
                          std::max(std::abs(what[j][i].imag()),
                                   std::abs(wt_hat[j][i].imag())));
      out.phi.at(i, j) = e * what[j][i].real();
      // phi_t = e^t (w + w_t)
      out.phi_t.at(i, j) = e * (what[j][i].real() + wt_hat[j][i].real());
      out.residual.at(i, j) = res_rows[j][i].real();
    }
    for (int i = 0; i < N; ++i) {
      double a = std::abs(res_rows[j][i]);
      if (j == 0)
        res_b0 = std::max(res_b0, a);
      else if (j == nth - 1)
        res_b1 = std::max(res_b1, a);
      else
        res_int = std::max(res_int, a);
    }
  }

  double scale = 0.0;
  for (const auto& row : rhs_rows)
    for (int i = 0; i < nt; ++i) scale = std::max(scale, std::abs(row[i]));
  double bscale0 = 0.0, bscale1 = 0.0;
  for (int i = 0; i < nt; ++i) {
    bscale0 = std::max(bscale0, std::abs(bc0_line[i]));
    bscale1 = std::max(bscale1, std::abs(bc1_line[i]));
  }
  scale = std::max({scale, (2.0 / hth) * bscale0, (2.0 / hth) * bscale1});
  if (scale > 0.0) {
    out.diag.residual_interior = res_int / scale;
    out.diag.residual_bc0 = res_b0 / scale;
    out.diag.residual_bc1 = res_b1 / scale;
  }
  out.diag.modes_solved = N;
  out.diag.max_cond = *std::max_element(conds.begin(), conds.end());
  out.diag.max_imag = max_imag;
  return out;
}

}  // namespace

ScalarSolveResult solve_neumann_singular(const WeightedField& f,
                                         const RaySamples& g0,
                                         const RaySamples& g1,
                                         const SolverOptions& opt) {
  const StripGrid& g = f.grid;
  if (g0.n != g.n_t || g1.n != g.n_t)
    throw DomainError("solve_neumann_singular: ray/grid size mismatch");
  const int nt = g.n_t, nth = g.n_theta;
  // w-equation data: rhs = e^t f; Neumann values carry the ray geometric
  // factors (B0 phi = phi_theta / (r cos w0), B1 phi = -phi_theta / (r sin w1))
  std::vector<std::vector<cplx>> rows(nth, std::vector<cplx>(nt));
  for (int j = 0; j < nth; ++j)
    for (int i = 0; i < nt; ++i) rows[j][i] = std::exp(g.t(i)) * f.at(i, j);
  std::vector<cplx> bc0(nt), bc1(nt);
  const double c0 = std::cos(g.omega0), s1 = std::sin(g.omega1);
  for (int i = 0; i < nt; ++i) {
    bc0[i] = c0 * g0.values[i];
    bc1[i] = -s1 * g1.values[i];
  }
  PipelineResult pr = run_pipeline(g, BcKind::Neumann, rows, bc0, bc1, opt);
  ScalarSolveResult out{std::move(pr.phi), std::move(pr.phi_t),
                        std::move(pr.residual), pr.diag};
  double den = sobolev_norm(f, 0, opt.q) + trace_norm(g0, 0.0, opt.q) +
               trace_norm(g1, 0.0, opt.q);
  if (den > 0.0)
    out.diag.stability_ratio = sobolev_norm(out.phi, 2, opt.q) / den;
  return out;
}

ScalarSolveResult solve_dirichlet_laplace(const WeightedField& f2,
                                          const SolverOptions& opt) {
  const StripGrid& g = f2.grid;
  const int nt = g.n_t, nth = g.n_theta;
  std::vector<std::vector<cplx>> rows(nth, std::vector<cplx>(nt));
  for (int j = 0; j < nth; ++j)
    for (int i = 0; i < nt; ++i) rows[j][i] = std::exp(g.t(i)) * f2.at(i, j);
  std::vector<cplx> zero(nt, cplx(0.0));
  PipelineResult pr = run_pipeline(g, BcKind::Dirichlet, rows, zero, zero, opt);
  ScalarSolveResult out{std::move(pr.phi), std::move(pr.phi_t),
                        std::move(pr.residual), pr.diag};
  double den = sobolev_norm(f2, 0, opt.q);
  if (den > 0.0)
    out.diag.stability_ratio = sobolev_norm(out.phi, 2, opt.q) / den;
  return out;
}

WeightedField d_t_fd(const WeightedField& f) {
  const StripGrid& g = f.grid;
  WeightedField d(g, f.k);
  const int nt = g.n_t, nth = g.n_theta;
  const double h = g.h_t();
  for (int j = 0; j < nth; ++j) {
    d.at(0, j) = (-3 * f.at(0, j) + 4 * f.at(1, j) - f.at(2, j)) / (2 * h);
    for (int i = 1; i + 1 < nt; ++i)
      d.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2 * h);
    d.at(nt - 1, j) =
        (3 * f.at(nt - 1, j) - 4 * f.at(nt - 2, j) + f.at(nt - 3, j)) / (2 * h);
  }
  return d;
}

WeightedField d_theta_fd(const WeightedField& f) {
  const StripGrid& g = f.grid;
  WeightedField d(g, f.k);
  const int nt = g.n_t, nth = g.n_theta;
  const double h = g.h_theta();
  for (int i = 0; i < nt; ++i) {
    d.at(i, 0) = (-3 * f.at(i, 0) + 4 * f.at(i, 1) - f.at(i, 2)) / (2 * h);
    for (int j = 1; j + 1 < nth; ++j)
      d.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2 * h);
    d.at(i, nth - 1) =
        (3 * f.at(i, nth - 1) - 4 * f.at(i, nth - 2) + f.at(i, nth - 3)) / (2 * h);
  }
  return d;
}

WeightedField d_x_fd(const WeightedField& f) {
  const StripGrid& g = f.grid;
  WeightedField ft = d_t_fd(f), fth = d_theta_fd(f);
  WeightedField d(g, f.k + 1.0);
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(-g.t(i));
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      d.at(i, j) = e * (std::cos(th) * ft.at(i, j) - std::sin(th) * fth.at(i, j));
    }
  }
  return d;
}

WeightedField d_y_fd(const WeightedField& f) {
  const StripGrid& g = f.grid;
  WeightedField ft = d_t_fd(f), fth = d_theta_fd(f);
  WeightedField d(g, f.k + 1.0);
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(-g.t(i));
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      d.at(i, j) = e * (std::sin(th) * ft.at(i, j) + std::cos(th) * fth.at(i, j));
    }
  }
  return d;
}

RaySamples ray_trace(const WeightedField& f, int j_row, double k) {
  RaySamples r = RaySamples::on_grid(f.grid, k);
  for (int i = 0; i < f.grid.n_t; ++i) r.values[i] = f.at(i, j_row);
  return r;
}

namespace {

// Physical derivatives that reuse the spectral t-derivative from a solve.
WeightedField d_x_spectral(const WeightedField& f, const WeightedField& f_t) {
  const StripGrid& g = f.grid;
  WeightedField fth = d_theta_fd(f);
  WeightedField d(g, f.k + 1.0);
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(-g.t(i));
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      d.at(i, j) =
          e * (std::cos(th) * f_t.at(i, j) - std::sin(th) * fth.at(i, j));
    }
  }
  return d;
}

WeightedField d_y_spectral(const WeightedField& f, const WeightedField& f_t) {
  const StripGrid& g = f.grid;
  WeightedField fth = d_theta_fd(f);
  WeightedField d(g, f.k + 1.0);
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(-g.t(i));
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      d.at(i, j) =
          e * (std::sin(th) * f_t.at(i, j) + std::cos(th) * fth.at(i, j));
    }
  }
  return d;
}

}  // namespace

FirstOrderResult solve_first_order(const LinearData& data,
                                   const SolverOptions& opt) {
  const StripGrid& g = data.f1.grid;
  ScalarSolveResult lift = solve_dirichlet_laplace(data.f2, opt);
  WeightedField Phi_x = d_x_spectral(lift.phi, lift.phi_t);
  WeightedField Phi_y = d_y_spectral(lift.phi, lift.phi_t);

  // modified interior datum f~ = f1 - Phi_x / y
  WeightedField ftilde = data.f1;
  for (int i = 0; i < g.n_t; ++i) {
    double r = g.r(i);
    for (int j = 0; j < g.n_theta; ++j)
      ftilde.at(i, j) -= Phi_x.at(i, j) / (r * std::sin(g.theta(j)));
  }

  ScalarSolveResult pot = solve_neumann_singular(ftilde, data.g0, data.g1, opt);
  WeightedField phi_x = d_x_spectral(pot.phi, pot.phi_t);
  WeightedField phi_y = d_y_spectral(pot.phi, pot.phi_t);

  FirstOrderResult out;
  out.U.u = WeightedField(g, 0.0);
  out.U.v = WeightedField(g, 0.0);
  for (std::size_t idx = 0; idx < out.U.u.values.size(); ++idx) {
    out.U.u.values[idx] = phi_x.values[idx] - Phi_y.values[idx];
    out.U.v.values[idx] = phi_y.values[idx] + Phi_x.values[idx];
  }
  out.residual = std::move(pot.residual);
  out.diag = pot.diag;
  out.diag.residual_interior =
      std::max(pot.diag.residual_interior, lift.diag.residual_interior);
  out.diag.max_cond = std::max(pot.diag.max_cond, lift.diag.max_cond);
  out.diag.max_imag = std::max(pot.diag.max_imag, lift.diag.max_imag);
  double den = sobolev_norm(data.f1, 0, opt.q) + sobolev_norm(data.f2, 0, opt.q) +
               trace_norm(data.g0, 0.0, opt.q) + trace_norm(data.g1, 0.0, opt.q);
  if (den > 0.0)
    out.diag.stability_ratio =
        pair_sobolev_norm(out.U.u, out.U.v, 1, opt.q) / den;
  return out;
}

CoefficientDeviations CoefficientDeviations::zero(const StripGrid& g) {
  CoefficientDeviations d;
  d.grid = g;
  d.dA = MatrixField(g);
  d.dA.zero = true;
  d.dB = MatrixField(g);
  d.dB.zero = true;
  d.dC = MatrixField(g);
  d.dC.zero = true;
  d.dalpha0.c0.assign(g.n_t, 0.0);
  d.dalpha0.c1.assign(g.n_t, 0.0);
  d.dalpha1.c0.assign(g.n_t, 0.0);
  d.dalpha1.c1.assign(g.n_t, 0.0);
  return d;
}

double perturbation_size(const CoefficientDeviations& dev) {
  const StripGrid& g = dev.grid;
  auto sup_entries = [](const MatrixField& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.e00.size(); ++i)
      s = std::max({s, std::abs(m.e00[i]), std::abs(m.e01[i]),
                    std::abs(m.e10[i]), std::abs(m.e11[i])});
    return s;
  };
  double sAB = std::max(sup_entries(dev.dA), sup_entries(dev.dB));
  // C - Chat in C^0_{(1)}: sup of e^t |entry|
  double sC = 0.0;
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(g.t(i));
    for (int j = 0; j < g.n_theta; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * g.n_theta + j;
      sC = std::max({sC, e * std::abs(dev.dC.e00[idx]), e * std::abs(dev.dC.e01[idx]),
                     e * std::abs(dev.dC.e10[idx]), e * std::abs(dev.dC.e11[idx])});
    }
  }
  auto ray_c1 = [&](const std::vector<double>& a) {
    if (a.empty()) return 0.0;
    double s = 0.0;
    std::vector<double> d = fd_derivative(a, g.h_t());
    for (std::size_t i = 0; i < a.size(); ++i)
      s = std::max({s, std::abs(a[i]), std::abs(d[i])});
    return s;
  };
  double salpha = ray_c1(dev.dalpha0.c0) + ray_c1(dev.dalpha0.c1) +
                  ray_c1(dev.dalpha1.c0) + ray_c1(dev.dalpha1.c1);
  return sAB + sC + salpha;
}

PerturbedResult solve_perturbed(const CoefficientDeviations& dev,
                                const LinearData& data, const SolverOptions& opt,
                                const PerturbedOptions& popt) {
  const StripGrid& g = data.f1.grid;
  double ehat = perturbation_size(dev);
  if (ehat > popt.ehat_max)
    throw NonContractionError("solve_perturbed: perturbation size " +
                              std::to_string(ehat) + " exceeds gate " +
                              std::to_string(popt.ehat_max));
  PerturbedResult out;
  out.U.u = WeightedField(g, 0.0);
  out.U.v = WeightedField(g, 0.0);

  auto apply_deltaT = [&](const VectorField& U) {
    LinearData d = data;
    if (!dev.dA.zero || !dev.dB.zero || !dev.dC.zero) {
      WeightedField ux = d_x_fd(U.u), uy = d_y_fd(U.u);
      WeightedField vx = d_x_fd(U.v), vy = d_y_fd(U.v);
      for (std::size_t i = 0; i < d.f1.values.size(); ++i) {
        double t1 = 0.0, t2 = 0.0;
        if (!dev.dA.zero) {
          t1 += dev.dA.e00[i] * ux.values[i] + dev.dA.e01[i] * vx.values[i];
          t2 += dev.dA.e10[i] * ux.values[i] + dev.dA.e11[i] * vx.values[i];
        }
        if (!dev.dB.zero) {
          t1 += dev.dB.e00[i] * uy.values[i] + dev.dB.e01[i] * vy.values[i];
          t2 += dev.dB.e10[i] * uy.values[i] + dev.dB.e11[i] * vy.values[i];
        }
        if (!dev.dC.zero) {
          t1 += dev.dC.e00[i] * U.u.values[i] + dev.dC.e01[i] * U.v.values[i];
          t2 += dev.dC.e10[i] * U.u.values[i] + dev.dC.e11[i] * U.v.values[i];
        }
        d.f1.values[i] -= t1;
        d.f2.values[i] -= t2;
      }
    }
    for (int i = 0; i < g.n_t; ++i) {
      d.g0.values[i] -= dev.dalpha0.c0[i] * U.u.at(i, 0) +
                        dev.dalpha0.c1[i] * U.v.at(i, 0);
      d.g1.values[i] -= dev.dalpha1.c0[i] * U.u.at(i, g.n_theta - 1) +
                        dev.dalpha1.c1[i] * U.v.at(i, g.n_theta - 1);
    }
    return d;
  };

  SolveDiagnostics last;
  // The strict end-decay gate applies to the caller's data (first pass, where
  // U = 0). Later passes add (T - That) U^n whose tails follow the solution
  // class e^{-|t|}, slower than the data gate; their effect is measured by
  // the reported residuals instead.
  SolverOptions iter_opt = opt;
  for (int it = 0; it < popt.max_iter; ++it) {
    FirstOrderResult step = solve_first_order(apply_deltaT(out.U), iter_opt);
    iter_opt.check_decay = false;
    double diff = pair_sobolev_norm(step.U.u - out.U.u, step.U.v - out.U.v, 1, opt.q);
    out.diffs.push_back(diff);
    out.U = std::move(step.U);
    out.residual = std::move(step.residual);
    last = step.diag;
    if (diff < popt.tol) break;
    if (out.diffs.size() >= 2) {
      double rate = out.diffs.back() / out.diffs[out.diffs.size() - 2];
      if (rate >= popt.rate_cap)
        throw NonContractionError(
            "solve_perturbed: measured rate " + std::to_string(rate) +
            " at iteration " + std::to_string(it));
    }
  }
  if (!out.diffs.empty() && out.diffs.back() >= popt.tol)
    throw NonContractionError("solve_perturbed: iteration cap reached");
  out.diag = last;
  RateReport rr = contraction_diagnostics(out.diffs);
  out.diag.rate = rr.max_rate;
  out.diag.iterations = static_cast<int>(out.diffs.size());
  return out;
}

}  // namespace conoshock
