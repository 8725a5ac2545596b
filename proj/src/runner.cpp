#include "conoshock/runner.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "conoshock/errors.hpp"
#include "conoshock/io.hpp"
#include "conoshock/manufactured.hpp"
#include "conoshock/parallel.hpp"

namespace conoshock {

using nlohmann::json;

CaseSetup setup_from_config(const CaseConfig& cfg) {
  GasParameters gas = GasParameters::from_nu(cfg.gamma, cfg.resolved_nu());
  double b;
  if (cfg.b) {
    b = *cfg.b;
  } else {
    b = solve_b_for_omega0(gas, *cfg.omega0_target);
  }
  IterationOptions opt;
  opt.tol_inner = cfg.tol_inner;
  opt.tol_outer = cfg.tol_outer;
  opt.max_inner = cfg.max_inner;
  opt.max_outer = cfg.max_outer;
  opt.nu0 = cfg.nu_cap;
  opt.eps_margin = cfg.eps_margin;
  opt.q = cfg.q;
  opt.solver.q = cfg.q;
  CaseSetup cs = make_case_setup(gas, b, cfg.t_min, cfg.t_max, cfg.n_t,
                                 cfg.n_theta, opt);
  cs.epsilon = cfg.epsilon;
  cs.cone = ConeBoundary(cs.bg.omega0, cfg.cone_bumps, cfg.epsilon, cfg.q);
  std::vector<SeparableBump> ub;
  for (const auto& u : cfg.upstream_bumps) {
    SeparableBump s;
    s.component = u.component;
    s.amp = u.amp;
    s.t_center = u.t_center;
    s.t_width = u.t_width;
    s.theta_center = cs.bg.omega0 + u.theta_frac * (cs.bg.omega1 - cs.bg.omega0);
    s.theta_width = u.theta_width;
    ub.push_back(s);
  }
  cs.upstream = UpstreamField(cs.bg.omega0, cs.bg.omega1, cfg.delta_hat0, ub,
                              cfg.epsilon, cfg.q);
  return cs;
}

namespace {

std::string csv_row(const std::vector<double>& vals) {
  std::string s;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) s += ",";
    s += fmt_g17(vals[i]);
  }
  s += "\n";
  return s;
}

int run_polar(const CaseConfig& cfg, ArtifactWriter& aw) {
  GasParameters gas = GasParameters::from_nu(cfg.gamma, cfg.resolved_nu());
  double b = cfg.b ? *cfg.b : solve_b_for_omega0(gas, *cfg.omega0_target);
  TauOptions topt;
  topt.nu_cap = cfg.nu_cap;
  TauResult tr = solve_tau(gas.nu, gas.gamma, b, topt);
  PolarPoint p = polar_point(gas, b, topt);
  FlowState up{1.0, 0.0, gas.rho_inf};
  auto [r1, r2] = rh_residual(up, p.post, p.tau);
  auto [gform, curved2] = rh_residual_curved(up, p.post, p.tau);

  json j;
  j["gamma"] = gas.gamma;
  j["nu"] = gas.nu;
  j["b"] = b;
  j["tau"] = p.tau;
  j["omega1"] = p.omega1;
  j["post"] = {{"u", p.post.u}, {"v", p.post.v}, {"rho", p.post.rho},
               {"mach", mach(p.post, gas.gamma)}};
  j["rh_residual"] = {r1, r2};
  j["rh_curved"] = {gform, curved2};
  j["roots"] = tr.all_roots;
  j["ambiguous"] = tr.ambiguous;
  aw.write_text("polar.json", j.dump(2) + "\n");

  std::string csv = "omega1,tau,u,v,rho,turning_angle,mach_post\n";
  for (const auto& s : emit_apple_curve(gas.gamma, gas.nu, cfg.polar_samples))
    csv += csv_row({s.omega1, s.tau, s.u, s.v, s.rho, s.turning_angle, s.mach_post});
  aw.write_text("apple.csv", csv);
  return 0;
}

int run_background(const CaseConfig& cfg, ArtifactWriter& aw) {
  GasParameters gas = GasParameters::from_nu(cfg.gamma, cfg.resolved_nu());
  double b = cfg.b ? *cfg.b : solve_b_for_omega0(gas, *cfg.omega0_target);
  SelfSimilarSolution sol = solve_background(gas, b);
  BackgroundReport rep = verify_background(sol);

  std::string csv = "sigma,theta,u0,v0,rho0,q0,M0\n";
  for (std::size_t i = 0; i < sol.sigma.size(); ++i) {
    double q = std::hypot(sol.u0[i], sol.v0[i]);
    double rho = density_from_speed(q, gas);
    double m = q / std::sqrt(sound_speed_sq_from_speed(q, gas));
    csv += csv_row({sol.sigma[i], std::atan2(1.0, sol.sigma[i]), sol.u0[i],
                    sol.v0[i], rho, q, m});
  }
  aw.write_text("profile.csv", csv);
  aw.write_text("summary.csv", "tau,kappa,omega0,omega1\n" +
                                   csv_row({sol.tau, sol.kappa, sol.omega0,
                                            sol.omega1}));
  json j;
  j["tau"] = sol.tau;
  j["kappa"] = sol.kappa;
  j["omega0"] = sol.omega0;
  j["omega1"] = sol.omega1;
  j["checks"] = {{"u0_strictly_decreasing", rep.u0_strictly_decreasing},
                 {"v0_strictly_increasing", rep.v0_strictly_increasing},
                 {"q0_nonincreasing", rep.q0_nonincreasing},
                 {"m0_nonincreasing", rep.m0_nonincreasing},
                 {"subsonic", rep.subsonic},
                 {"kappa_in_range", rep.kappa_in_range},
                 {"v0_max_bound", rep.v0_max_bound},
                 {"slip_ok", rep.slip_ok}};
  j["slip_residual"] = rep.slip_residual;
  j["max_mach"] = rep.max_mach;
  j["pass"] = rep.all();
  aw.write_text("background.json", j.dump(2) + "\n");
  return rep.all() ? 0 : 2;
}

int run_linsolve(const CaseConfig& cfg, ArtifactWriter& aw) {
  GasParameters gas = GasParameters::from_nu(cfg.gamma, cfg.resolved_nu());
  double b = cfg.b ? *cfg.b : solve_b_for_omega0(gas, *cfg.omega0_target);
  SelfSimilarSolution bg = solve_background(gas, b);

  struct Row {
    std::string solver;
    int cse, level, nt, nth;
    double err, ri, r0, r1;
  };
  std::vector<Row> rows;
  for (int lvl = 0; lvl < cfg.linsolve_levels; ++lvl) {
    StripGrid g;
    g.t_min = cfg.linsolve_t_min;
    g.t_max = cfg.linsolve_t_max;
    g.n_t = cfg.linsolve_base_n_t << lvl;
    g.n_theta = ((cfg.linsolve_base_n_theta - 1) << lvl) + 1;
    g.omega0 = bg.omega0;
    g.omega1 = bg.omega1;
    SolverOptions sopt;
    sopt.q = cfg.q;

    const Bump bumps[3] = {{1.0, 0.0, 1.5}, {0.7, -1.0, 1.2}, {1.3, 1.0, 1.4}};
    for (int c = 0; c < 3; ++c) {
      {
        Trig C{false, 1.0, (c == 1) ? g.omega1 : g.omega0};
        if (c == 2) C = Trig{true, 1.0, 0.0};
        NeumannCase nc = make_neumann_case(g, bumps[c], C);
        ScalarSolveResult r = solve_neumann_singular(nc.f, nc.g0, nc.g1, sopt);
        rows.push_back({"neumann", c, lvl, g.n_t, g.n_theta,
                        linf_error(r.phi, nc.exact), r.diag.residual_interior,
                        r.diag.residual_bc0, r.diag.residual_bc1});
        if (lvl == cfg.linsolve_levels - 1)
          aw.write_text("residual_neumann_case" + std::to_string(c) + ".csv",
                        to_csv(r.residual));
      }
      {
        DirichletCase dc = make_dirichlet_case(g, bumps[c], 1 + c % 2);
        ScalarSolveResult r = solve_dirichlet_laplace(dc.f2, sopt);
        rows.push_back({"dirichlet", c, lvl, g.n_t, g.n_theta,
                        linf_error(r.phi, dc.exact), r.diag.residual_interior,
                        r.diag.residual_bc0, r.diag.residual_bc1});
      }
      {
        Trig C{false, 1.0, g.omega0};
        if (c == 1) C = Trig{true, 1.0, 0.0};
        if (c == 2) C = Trig{false, 2.0, g.omega1};
        FirstOrderCase fc = make_first_order_case(g, bumps[c], C,
                                                  bumps[(c + 1) % 3], 1);
        FirstOrderResult r = solve_first_order(fc.data, sopt);
        double err = std::max(linf_error(r.U.u, fc.exact.u),
                              linf_error(r.U.v, fc.exact.v));
        rows.push_back({"first_order", c, lvl, g.n_t, g.n_theta, err,
                        r.diag.residual_interior, r.diag.residual_bc0,
                        r.diag.residual_bc1});
      }
    }
  }

  std::string csv = "solver,case,level,n_t,n_theta,err_inf,res_interior,res_bc0,res_bc1\n";
  for (const auto& r : rows)
    csv += r.solver + "," + std::to_string(r.cse) + "," + std::to_string(r.level) +
           "," + std::to_string(r.nt) + "," + std::to_string(r.nth) + "," +
           fmt_g17(r.err) + "," + fmt_g17(r.ri) + "," + fmt_g17(r.r0) + "," +
           fmt_g17(r.r1) + "\n";
  aw.write_text("convergence.csv", csv);

  json j;
  bool pass = true;
  json ratios = json::array();
  for (const std::string solver : {"neumann", "dirichlet", "first_order"}) {
    for (int c = 0; c < 3; ++c) {
      std::vector<double> errs;
      double finest_res = 0.0;
      for (const auto& r : rows)
        if (r.solver == solver && r.cse == c) {
          errs.push_back(r.err);
          finest_res = std::max({r.ri, r.r0, r.r1});
        }
      for (std::size_t l = 0; l + 1 < errs.size(); ++l) {
        double ratio = errs[l] / errs[l + 1];
        bool ok = ratio >= 3.0 && ratio <= 5.0;
        pass = pass && ok;
        ratios.push_back({{"solver", solver}, {"case", c}, {"level", (int)l},
                          {"ratio", ratio}, {"ok", ok}});
      }
      pass = pass && finest_res < 1e-6;
    }
  }
  j["ratios"] = ratios;
  j["pass"] = pass;
  aw.write_text("linsolve.json", j.dump(2) + "\n");
  return pass ? 0 : 2;
}

int run_solve(const CaseConfig& cfg, ArtifactWriter& aw) {
  CaseSetup cs = setup_from_config(cfg);
  CaseSolution sol = solve_case(cs);
  const StripGrid& g = cs.grid;

  std::string field = "xi,eta,x,y,u,v,rho,mach\n";
  for (int i = 0; i < g.n_t; i += cfg.emit_stride) {
    double r = g.r(i);
    for (int j = 0; j < g.n_theta; j += cfg.emit_stride) {
      double th = g.theta(j);
      double xi = r * std::cos(th), eta = r * std::sin(th);
      auto [x, y] = map_to_physical(xi, eta, sol.front, cs.cone);
      double u = sol.bgr.u0[j] + sol.deltaU.u.at(i, j);
      double v = sol.bgr.v0[j] + sol.deltaU.v.at(i, j);
      double q = std::hypot(u, v);
      double rho = density_from_speed(q, cs.gas);
      double m = q / std::sqrt(sound_speed_sq_from_speed(q, cs.gas));
      field += csv_row({xi, eta, x, y, u, v, rho, m});
    }
  }
  aw.write_text("flowfield.csv", field);

  std::string shock = "eta,psi,psi_dot,rh_res1,rh_res2\n";
  for (int i = 0; i < g.n_t; ++i)
    shock += csv_row({sol.front.eta()[i], sol.front.psi_node(i),
                      sol.front.psi_dot_node(i), sol.rh1[i], sol.rh2[i]});
  aw.write_text("shock.csv", shock);
  aw.write_text("lin_residual.csv", to_csv(sol.lin_residual));

  double rh1_max = 0.0, rh2_max = 0.0, slope_dev_max = 0.0;
  for (int i = 0; i < g.n_t; ++i) {
    rh1_max = std::max(rh1_max, std::abs(sol.rh1[i]));
    rh2_max = std::max(rh2_max, std::abs(sol.rh2[i]));
    slope_dev_max = std::max(slope_dev_max, std::abs(sol.front.delta_psi_dot()[i]));
  }

  json j;
  j["epsilon"] = cs.epsilon;
  j["nu"] = cs.gas.nu;
  j["gamma"] = cs.gas.gamma;
  j["b"] = cs.b;
  j["tau"] = cs.bg.tau;
  j["kappa"] = cs.bg.kappa;
  j["norm_deltaU_W1q0"] = sol.norm_dU;
  j["norm_dpsidot_Gamma1"] = sol.norm_dpsidot;
  j["recorded_M"] = sol.recorded_M;
  j["recorded_MS"] = sol.recorded_MS;
  j["inner_rate"] = sol.inner_rate;
  j["outer_rate"] = sol.outer_rate;
  j["outer_iterations"] = sol.outer_iterations;
  j["inner_iterations"] = sol.inner_iterations;
  j["outer_diffs"] = sol.outer_diffs;
  j["rh1_max"] = rh1_max;
  j["rh2_max"] = rh2_max;
  j["max_slope_deviation"] = slope_dev_max;
  j["linear_solver"] = {{"residual_interior", sol.last_lin.residual_interior},
                        {"residual_bc0", sol.last_lin.residual_bc0},
                        {"residual_bc1", sol.last_lin.residual_bc1},
                        {"stability_ratio", sol.last_lin.stability_ratio},
                        {"modes_solved", sol.last_lin.modes_solved},
                        {"rate", sol.last_lin.rate}};
  bool pass = rh1_max < 1e-5 && rh2_max < 1e-5 && sol.outer_rate < 1.0;
  j["pass"] = pass;
  aw.write_text("report.json", j.dump(2) + "\n");
  return pass ? 0 : 2;
}

int run_sweep(const CaseConfig& cfg, ArtifactWriter& aw) {
  struct Point {
    double gamma, b, nu;
    std::string row;
    bool ok = false;
  };
  std::vector<Point> pts;
  for (double gamma : cfg.sweep_gamma)
    for (double b : cfg.sweep_b)
      for (double nu : cfg.sweep_nu) pts.push_back({gamma, b, nu, "", false});

  // points are independent; emission order stays fixed
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    Point& pt = pts[i];
    GasParameters gas = GasParameters::from_nu(pt.gamma, pt.nu);
    PolarPoint p = polar_point(gas, pt.b);
    FlowState up{1.0, 0.0, gas.rho_inf};
    auto [r1, r2] = rh_residual(up, p.post, p.tau);
    SelfSimilarSolution bg = solve_background(gas, pt.b);
    BackgroundReport rep = verify_background(bg);
    double ratio = p.tau / std::pow(pt.nu, 1.0 / (pt.gamma - 1.0));
    pt.ok = rep.all() && std::abs(r1) < 1e-12 && std::abs(r2) < 1e-12 &&
            mach(p.post, pt.gamma) < 1.0;
    pt.row = csv_row({pt.gamma, pt.b, pt.nu, p.tau, bg.kappa, bg.omega0,
                      bg.omega1, r1, r2, mach(p.post, pt.gamma),
                      rep.slip_residual, ratio, pt.ok ? 1.0 : 0.0});
  });

  std::string csv =
      "gamma,b,nu,tau,kappa,omega0,omega1,rh1,rh2,mach_post,slip_residual,"
      "tau_ratio,checks_pass\n";
  bool all_pass = true;
  json points = json::array();
  for (const auto& pt : pts) {
    csv += pt.row;
    all_pass = all_pass && pt.ok;
    points.push_back(
        {{"gamma", pt.gamma}, {"b", pt.b}, {"nu", pt.nu}, {"pass", pt.ok}});
  }
  aw.write_text("sweep.csv", csv);
  json j;
  j["points"] = points;
  j["pass"] = all_pass;
  aw.write_text("report.json", j.dump(2) + "\n");
  return all_pass ? 0 : 2;
}

}  // namespace

int run_subcommand(const std::string& name, const CaseConfig& cfg,
                   const std::string& out_dir) {
  ArtifactWriter aw{std::filesystem::path(out_dir)};
  int rc = 0;
  try {
    if (name == "polar")
      rc = run_polar(cfg, aw);
    else if (name == "background")
      rc = run_background(cfg, aw);
    else if (name == "linsolve")
      rc = run_linsolve(cfg, aw);
    else if (name == "solve")
      rc = run_solve(cfg, aw);
    else if (name == "sweep")
      rc = run_sweep(cfg, aw);
    else
      throw ConfigError("unknown subcommand: " + name);
  } catch (const SolverError& e) {
    json j;
    j["status"] = "error";
    j["message"] = e.what();
    aw.write_text("error.json", j.dump(2) + "\n");
    aw.finish();
    return 1;
  }
  aw.finish();
  return rc;
}

}  // namespace conoshock
