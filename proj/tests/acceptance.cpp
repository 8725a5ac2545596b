// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "conoshock/background.hpp"
#include "conoshock/errors.hpp"
#include "conoshock/iteration.hpp"
#include "conoshock/manufactured.hpp"
#include "conoshock/polar.hpp"
#include "conoshock/sector.hpp"
#include "conoshock/strip.hpp"

using namespace conoshock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

const double kGammas[] = {1.5, 2.0};
const double kBs[] = {0.5, 1.0, 2.0};
const double kNus[] = {1e-4, 1e-3, 1e-2};

// 1. Straight-shock identities across the sweep.
Check criterion1() {
  Check c;
  for (double gamma : kGammas)
    for (double b : kBs)
      for (double nu : kNus) {
        GasParameters gas = GasParameters::from_nu(gamma, nu);
        PolarPoint p = polar_point(gas, b);
        FlowState up{1.0, 0.0, gas.rho_inf};
        auto [r1, r2] = rh_residual(up, p.post, p.tau);
        auto [gform, rc2] = rh_residual_curved(up, p.post, p.tau);
        c.require(std::abs(r1) < 1e-12, "mass-flux residual");
        c.require(std::abs(r2) < 1e-12, "tangency residual");
        c.require(std::abs(gform) < 1e-12, "G-form residual");
        c.require(std::abs(rc2) < 1e-12, "curved tangency residual");
      }
  return c;
}

// 2. tau and post-shock Mach scale like nu^{1/(gamma-1)}.
Check criterion2() {
  Check c;
  for (double gamma : kGammas)
    for (double b : kBs) {
      double tlo = 1e300, thi = 0.0, mlo = 1e300, mhi = 0.0;
      for (double nu : kNus) {
        GasParameters gas = GasParameters::from_nu(gamma, nu);
        PolarPoint p = polar_point(gas, b);
        double s = std::pow(nu, 1.0 / (gamma - 1.0));
        double rt = p.tau / s, rm = mach(p.post, gamma) / s;
        tlo = std::min(tlo, rt);
        thi = std::max(thi, rt);
        mlo = std::min(mlo, rm);
        mhi = std::max(mhi, rm);
      }
      c.require(thi / tlo < 4.0, "tau ratio varies by >= 4");
      c.require(mhi / mlo < 4.0, "Mach ratio varies by >= 4");
    }
  return c;
}

// 3. Background profile properties and fourth-order kappa convergence.
Check criterion3() {
  Check c;
  for (double gamma : kGammas)
    for (double b : kBs)
      for (double nu : kNus) {
        GasParameters gas = GasParameters::from_nu(gamma, nu);
        SelfSimilarSolution sol = solve_background(gas, b);
        BackgroundReport rep = verify_background(sol);
        c.require(sol.kappa > sol.tau && sol.kappa < 1.0 / b, "kappa range");
        c.require(rep.slip_ok, "slip residual");
        c.require(rep.u0_strictly_decreasing, "u0 monotone");
        c.require(rep.v0_strictly_increasing, "v0 monotone");
        c.require(rep.subsonic, "M0 < 1");

        BackgroundOptions fine;
        fine.n_steps = 8192;
        fine.event_tol = 1e-14;
        double ref = solve_background(gas, b, fine).kappa;
        double err[3];
        int steps[3] = {8, 16, 32};
        for (int i = 0; i < 3; ++i) {
          BackgroundOptions o;
          o.n_steps = steps[i];
          o.event_tol = 1e-14;
          err[i] = std::abs(solve_background(gas, b, o).kappa - ref);
        }
        double order = std::log2(err[0] / err[2]) / 2.0;
        c.require(order > 3.5 && order < 4.5,
                  "kappa order " + std::to_string(order) + " at gamma=" +
                      std::to_string(gamma) + " b=" + std::to_string(b));
      }
  return c;
}

// 4. Hartman-Wintner gap on a 10^4-point grid plus the closed-form minimum.
Check criterion4() {
  Check c;
  double min_a = 1e300;
  for (int i = 1; i <= 100; ++i)
    for (int j = 0; j < 100; ++j) {
      double th = M_PI * i / 101.0;
      double mu = -50.0 + 100.0 * j / 99.0;
      min_a = std::min(min_a, hartman_wintner_gap(th, mu));
    }
  c.require(min_a >= 1.0 - 1e-12, "grid minimum below 1");

  auto f = [](double th) { return hartman_wintner_gap(th, 0.0); };
  double a = 0.2, b = M_PI - 0.2;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    double x = b - gr * (b - a), y = a + gr * (b - a);
    if (f(x) < f(y))
      b = y;
    else
      a = x;
  }
  double loc = 0.5 * (a + b);
  c.require(std::abs(f(loc) - 1.0) < 1e-12, "oracle minimum not 1");
  for (double th : {0.4, 1.0, 1.5708, 2.3, 2.8}) {
    double s = std::sin(th);
    c.require(std::abs(f(th) - (3.0 + s * s) / (4.0 * s * s)) < 1e-12,
              "closed form mismatch");
  }
  return c;
}

StripGrid level_grid(int lvl, double w0, double w1) {
  StripGrid g;
  g.t_min = -12.0;
  g.t_max = 12.0;
  g.n_t = 256 << lvl;
  g.n_theta = ((33 - 1) << lvl) + 1;
  g.omega0 = w0;
  g.omega1 = w1;
  return g;
}

// 5. Manufactured-solution convergence for all three solvers.
Check criterion5() {
  Check c;
  GasParameters gas = GasParameters::from_nu(2.0, 0.01);
  SelfSimilarSolution bg = solve_background(gas, 1.0);
  const Bump bumps[3] = {{1.0, 0.0, 1.5}, {0.7, -1.0, 1.2}, {1.3, 1.0, 1.4}};
  for (int cs = 0; cs < 3; ++cs) {
    std::vector<double> en, ed, ef;
    double rn = 0, rd = 0, rf = 0;
    for (int lvl = 0; lvl < 3; ++lvl) {
      StripGrid g = level_grid(lvl, bg.omega0, bg.omega1);
      {
        Trig C = cs == 0   ? Trig{false, 1.0, g.omega0}
                 : cs == 1 ? Trig{false, 1.0, g.omega1}
                           : Trig{true, 1.0, 0.0};
        NeumannCase nc = make_neumann_case(g, bumps[cs], C);
        ScalarSolveResult r = solve_neumann_singular(nc.f, nc.g0, nc.g1);
        en.push_back(linf_error(r.phi, nc.exact));
        rn = std::max({r.diag.residual_interior, r.diag.residual_bc0,
                       r.diag.residual_bc1});
      }
      {
        DirichletCase dc = make_dirichlet_case(g, bumps[cs], 1 + cs % 2);
        ScalarSolveResult r = solve_dirichlet_laplace(dc.f2);
        ed.push_back(linf_error(r.phi, dc.exact));
        rd = r.diag.residual_interior;
      }
      {
        Trig C = cs == 0   ? Trig{false, 1.0, g.omega0}
                 : cs == 1 ? Trig{true, 1.0, 0.0}
                           : Trig{false, 2.0, g.omega1};
        FirstOrderCase fc =
            make_first_order_case(g, bumps[cs], C, bumps[(cs + 1) % 3], 1);
        FirstOrderResult r = solve_first_order(fc.data);
        ef.push_back(std::max(linf_error(r.U.u, fc.exact.u),
                              linf_error(r.U.v, fc.exact.v)));
        rf = std::max({r.diag.residual_interior, r.diag.residual_bc0,
                       r.diag.residual_bc1});
      }
    }
    for (std::size_t l = 0; l + 1 < 3; ++l) {
      for (auto* e : {&en, &ed, &ef}) {
        double ratio = (*e)[l] / (*e)[l + 1];
        c.require(ratio > 3.0 && ratio < 5.0,
                  "convergence ratio " + std::to_string(ratio) + " case " +
                      std::to_string(cs));
      }
    }
    c.require(rn < 1e-6 && rd < 1e-6 && rf < 1e-6, "finest-grid residuals");
  }
  return c;
}

// 6. Stability ratios stable under grid and window doubling.
Check criterion6() {
  Check c;
  GasParameters gas = GasParameters::from_nu(2.0, 0.01);
  SelfSimilarSolution bg = solve_background(gas, 1.0);

  auto make_grid = [&](int nt, int nth, double tmax) {
    StripGrid g;
    g.t_min = -tmax;
    g.t_max = tmax;
    g.n_t = nt;
    g.n_theta = nth;
    g.omega0 = bg.omega0;
    g.omega1 = bg.omega1;
    return g;
  };
  StripGrid base = make_grid(512, 65, 12.0);
  StripGrid fine = make_grid(1024, 129, 12.0);
  StripGrid wide = make_grid(1024, 65, 24.0);

  for (int d = 0; d < 10; ++d) {
    double ctr = -1.5 + 0.3 * d, wid = 0.7 + 0.06 * d;
    int freq = 1 + d % 3;
    auto ratios_on = [&](const StripGrid& g) {
      WeightedField f(g, 1.0), f2(g, 1.0);
      RaySamples g0 = RaySamples::on_grid(g, 0.0);
      RaySamples g1 = RaySamples::on_grid(g, 0.0);
      for (int i = 0; i < g.n_t; ++i) {
        double t = g.t(i);
        double bmp = std::exp(-0.5 * (t - ctr) * (t - ctr) / (wid * wid));
        g0.values[i] = 0.5 * bmp;
        g1.values[i] = -0.3 * bmp;
        for (int j = 0; j < g.n_theta; ++j) {
          double th = g.theta(j);
          f.at(i, j) = std::exp(-t) * bmp * std::cos(freq * (th - g.omega0));
          f2.at(i, j) = std::exp(-t) * bmp *
                        std::sin(M_PI * (th - g.omega0) / (g.omega1 - g.omega0));
        }
      }
      ScalarSolveResult rn = solve_neumann_singular(f, g0, g1);
      ScalarSolveResult rd = solve_dirichlet_laplace(f2);
      LinearData data{f, f2, g0, g1};
      FirstOrderResult rf = solve_first_order(data);
      return std::array<double, 3>{rn.diag.stability_ratio,
                                   rd.diag.stability_ratio,
                                   rf.diag.stability_ratio};
    };
    auto rb = ratios_on(base), rg = ratios_on(fine), rw = ratios_on(wide);
    for (int s = 0; s < 3; ++s) {
      double lo = std::min({rb[s], rg[s], rw[s]});
      double hi = std::max({rb[s], rg[s], rw[s]});
      c.require(hi / lo < 2.0, "stability ratio drift solver " +
                                   std::to_string(s) + " datum " +
                                   std::to_string(d) + ": " +
                                   std::to_string(hi / lo));
    }
  }
  return c;
}

// 7. Perturbed solve: monotone rates in delta, refusal before divergence.
Check criterion7() {
  Check c;
  StripGrid g;
  g.t_min = -12.0;
  g.t_max = 12.0;
  g.n_t = 256;
  g.n_theta = 65;
  g.omega0 = 1.0;
  g.omega1 = 1.4;
  FirstOrderCase fc = make_first_order_case(g, Bump{1.0, 0.0, 1.5},
                                            Trig{false, 1.0, g.omega0},
                                            Bump{0.8, 0.5, 1.3}, 1);
  std::vector<double> rates;
  for (double delta : {1e-3, 3e-3, 1e-2}) {
    CoefficientDeviations dev = CoefficientDeviations::zero(g);
    dev.dA = MatrixField(g);
    for (auto& v : dev.dA.e00) v = delta;
    for (auto& v : dev.dA.e11) v = delta;
    PerturbedResult r = solve_perturbed(dev, fc.data);
    rates.push_back(r.diag.rate);
  }
  c.require(rates[0] < rates[1] && rates[1] < rates[2], "rates not monotone");

  PerturbedOptions popt;
  popt.ehat_max = 100.0;
  bool refused = false, diverged = false;
  for (double delta = 0.05; delta < 50.0; delta *= 2.0) {
    CoefficientDeviations dev = CoefficientDeviations::zero(g);
    dev.dA = MatrixField(g);
    for (auto& v : dev.dA.e00) v = delta;
    for (auto& v : dev.dA.e11) v = delta;
    try {
      PerturbedResult r = solve_perturbed(dev, fc.data, {}, popt);
      if (!std::isfinite(r.U.u.max_abs())) diverged = true;
    } catch (const NonContractionError&) {
      refused = true;
      break;
    }
  }
  c.require(refused && !diverged, "no refusal before divergence");
  return c;
}

CaseSetup acceptance_case(double eps, int nt, int nth) {
  GasParameters gas = GasParameters::from_nu(2.0, 0.01);
  CaseSetup cs = make_case_setup(gas, 1.0, -14.0, 24.0, nt, nth);
  cs.epsilon = eps;
  if (eps > 0.0) {
    cs.cone = ConeBoundary(cs.bg.omega0, {{1.0, 0.5, 1.0}}, eps);
    double mid = 0.5 * (cs.bg.omega0 + cs.bg.omega1);
    std::vector<SeparableBump> ub{
        {0, 1.0, 0.3, 1.0, mid, 0.12},
        {1, 0.7, -0.2, 1.1, cs.bg.omega1 - 0.05, 0.1}};
    cs.upstream = UpstreamField(cs.bg.omega0, cs.bg.omega1, 0.05, ub, eps);
  }
  return cs;
}

// 8. Zero perturbation returns the background in one outer pass.
Check criterion8() {
  Check c;
  CaseSetup cs = acceptance_case(0.0, 1024, 129);
  CaseSolution sol = solve_case(cs);
  c.require(sol.outer_iterations == 1, "more than one outer pass");
  c.require(sol.norm_dU < 1e-9, "delta-U norm " + std::to_string(sol.norm_dU));
  double dev = 0.0;
  for (double d : sol.front.delta_psi_dot()) dev = std::max(dev, std::abs(d));
  c.require(dev < 1e-10, "slope deviation " + std::to_string(dev));
  return c;
}

// 9. Perturbed stability runs with linear response and tail decay.
Check criterion9() {
  Check c;
  double norm_dU[2], norm_slope[2];
  for (int k = 0; k < 2; ++k) {
    double eps = (k == 0) ? 5e-4 : 1e-3;
    CaseSetup cs = acceptance_case(eps, 512, 129);
    CaseSolution sol = solve_case(cs);
    c.require(sol.inner_rate <= 0.5,
              "inner rate " + std::to_string(sol.inner_rate));
    c.require(sol.outer_rate < 1.0, "outer rate");
    double rh1 = 0.0, rh2 = 0.0;
    for (int i = 0; i < cs.grid.n_t; ++i) {
      rh1 = std::max(rh1, std::abs(sol.rh1[i]));
      rh2 = std::max(rh2, std::abs(sol.rh2[i]));
    }
    c.require(rh1 < 1e-5, "R-H (203-1) residual " + std::to_string(rh1));
    c.require(rh2 < 1e-5, "R-H (203-2) residual " + std::to_string(rh2));
    norm_dU[k] = sol.norm_dU;
    norm_slope[k] = sol.norm_dpsidot;

    const auto& dpd = sol.front.delta_psi_dot();
    double global_max = 0.0, tail_max = 0.0;
    double eta_max = sol.front.eta().back();
    for (int i = 0; i < cs.grid.n_t; ++i) {
      global_max = std::max(global_max, std::abs(dpd[i]));
      if (sol.front.eta()[i] > eta_max / 10.0)
        tail_max = std::max(tail_max, std::abs(dpd[i]));
    }
    c.require(tail_max * 2.0 <= global_max, "asymptotic-slope tail check");
  }
  double ru = norm_dU[1] / norm_dU[0];
  double rs = norm_slope[1] / norm_slope[0];
  c.require(ru > 1.8 && ru < 2.2, "delta-U response ratio " + std::to_string(ru));
  c.require(rs > 1.8 && rs < 2.2, "slope response ratio " + std::to_string(rs));
  return c;
}

// 10. Hardy inequality and exact norm identities.
Check criterion10() {
  Check c;
  StripGrid g;
  g.t_min = -12.0;
  g.t_max = 12.0;
  g.n_t = 1024;
  g.n_theta = 65;
  g.omega0 = 1.0;
  g.omega1 = 1.4;

  std::mt19937 rng(101);
  std::uniform_real_distribution<double> dc(-5.0, 5.0), dw(0.7, 2.0),
      da(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    RaySamples hp = RaySamples::on_grid(g, 0.0);
    int nb = 1 + trial % 3;
    for (int bump = 0; bump < nb; ++bump) {
      double ctr = dc(rng), wid = dw(rng), amp = da(rng);
      for (int i = 0; i < g.n_t; ++i) {
        double z = (g.t(i) - ctr) / wid;
        hp.values[i] += amp * std::exp(-0.5 * z * z);
      }
    }
    if (hp.max_abs() == 0.0) continue;
    double r = hardy_ratio(hp, 4.0);
    c.require(r <= 1.0 + 1e-3, "hardy ratio " + std::to_string(r));
  }

  std::uniform_real_distribution<double> dv(-1.0, 1.0);
  WeightedField w0(g, 0.0);
  for (auto& v : w0.values) v = dv(rng);
  for (double k : {-1.0, 1.0}) {
    WeightedField u(g, k);
    for (int i = 0; i < g.n_t; ++i)
      for (int j = 0; j < g.n_theta; ++j)
        u.at(i, j) = std::exp(-k * g.t(i)) * w0.at(i, j);
    for (int m : {0, 1, 2}) {
      double a = sobolev_norm(u, m, 4.0), bnorm = sobolev_norm(w0, m, 4.0);
      c.require(std::abs(a - bnorm) <= 1e-12 * bnorm, "weight cancellation");
    }
  }

  WeightedField f(g, 0.0), shifted(g, 0.0);
  for (int i = 0; i < g.n_t; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      double z = g.t(i), th = g.theta(j);
      f.at(i, j) = std::exp(-0.5 * z * z) * std::cos(th);
      double zs = g.t(i) - 13 * g.h_t();
      shifted.at(i, j) = std::exp(-0.5 * zs * zs) * std::cos(th);
    }
  double nf = sobolev_norm(f, 1, 4.0), ns = sobolev_norm(shifted, 1, 4.0);
  c.require(std::abs(nf - ns) <= 1e-12 * nf, "shift invariance");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    double budget_s;
    std::function<Check()> fn;
  };
  const Criterion criteria[] = {
      {"1 shock polar identities", 1.0, criterion1},
      {"2 polar asymptotics", 1.0, criterion2},
      {"3 background solution", 5.0, criterion3},
      {"4 Hartman-Wintner gap", 1.0, criterion4},
      {"5 manufactured linear solves", 60.0, criterion5},
      {"6 stability constants", 120.0, criterion6},
      {"7 perturbed-coefficient solve", 30.0, criterion7},
      {"8 fixed point at zero perturbation", 30.0, criterion8},
      {"9 perturbed stability run", 600.0, criterion9},
      {"10 Hardy/weighted-norm identities", 5.0, criterion10},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (dt > cr.budget_s) {
      c.ok = false;
      if (c.detail.empty())
        c.detail = "runtime " + std::to_string(dt) + " s over budget";
    }
    std::printf("[%s] criterion %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL",
                cr.label, dt, c.ok ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
