#ifndef CONOSHOCK_CONFIG_HPP
#define CONOSHOCK_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "conoshock/perturbation.hpp"

namespace conoshock {

/// Flat key=value case file with sections. Unknown keys, conflicting keys and
/// invariant violations are reported with line numbers; emission is canonical
/// (fixed order, 17 significant digits) so emit(parse(.)) is idempotent.

struct UpstreamBumpConfig {
  int component = 0;  // 0 = u, 1 = v
  double amp = 1.0;
  double t_center = 0.0, t_width = 1.0;
  double theta_frac = 0.5;  // position across the sector, 0 = cone, 1 = shock
  double theta_width = 0.1;
};

struct CaseConfig {
  // [gas] -- exactly one of nu/mach_inf and one of b/omega0_target
  double gamma = 2.0;
  std::optional<double> nu, mach_inf;
  std::optional<double> b, omega0_target;

  // [grid]
  double t_min = -14.0, t_max = 26.0;
  int n_t = 1024, n_theta = 129;

  // [cone], [upstream]
  std::vector<LogBump> cone_bumps;
  std::vector<UpstreamBumpConfig> upstream_bumps;

  // [run]
  double epsilon = 0.0;
  double q = 4.0;
  double tol_inner = 1e-9, tol_outer = 1e-8;
  int max_inner = 50, max_outer = 30;
  double nu_cap = 0.05, eps_margin = 0.1;
  double delta_hat0 = 0.05;
  unsigned seed = 0;
  int emit_stride = 1;

  // [polar]
  int polar_samples = 200;

  // [linsolve]
  int linsolve_levels = 3;
  int linsolve_base_n_t = 256, linsolve_base_n_theta = 33;
  double linsolve_t_min = -12.0, linsolve_t_max = 12.0;

  // [sweep]
  std::vector<double> sweep_gamma{1.5, 2.0};
  std::vector<double> sweep_b{0.5, 1.0, 2.0};
  std::vector<double> sweep_nu{1e-4, 1e-3, 1e-2};

  double resolved_nu() const;  // from nu or mach_inf
};

CaseConfig parse_case(const std::string& text);
CaseConfig parse_case_file(const std::string& path);
std::string emit_case(const CaseConfig& cfg);

std::string fmt_g17(double v);

}  // namespace conoshock

#endif
