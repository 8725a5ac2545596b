#ifndef CONOSHOCK_PERTURBATION_HPP
#define CONOSHOCK_PERTURBATION_HPP

#include <vector>

#include "conoshock/strip.hpp"

namespace conoshock {

/// Analytic descriptors for the admissible perturbations: the cone boundary
/// slope delta phi'(x) as a finite sum of log-space Gaussian bumps, and the
/// upstream velocity perturbation as separable bumps on the extended sector.

struct LogBump {
  double amp = 1.0;    // bump amplitude
  double center = 0.0; // ln x at the peak
  double width = 1.0;  // in t = ln x
};

class ConeBoundary {
 public:
  // Unit-shaped bumps are rescaled so that the combined
  // C^2_{(0)} + W^{1,q}_{(0)} norm of delta phi' equals epsilon exactly.
  ConeBoundary(double omega0, std::vector<LogBump> bumps, double epsilon,
               double q = 4.0);
  static ConeBoundary unperturbed(double omega0);

  double omega0() const { return omega0_; }
  double epsilon() const { return eps_; }
  double tan_omega0() const { return tan_w0_; }

  double delta_phi_prime(double x) const;   // phi'(x) - tan(omega0)
  double delta_phi_prime_d(double x) const; // d/dx of the deviation
  double phi_prime(double x) const { return tan_w0_ + delta_phi_prime(x); }
  double phi_second(double x) const { return delta_phi_prime_d(x); }
  // phi(x) - x tan(omega0) = integral of the deviation from 0 (closed form).
  double delta_phi_int(double x) const;
  double phi(double x) const { return x * tan_w0_ + delta_phi_int(x); }

  double combined_norm(double q) const;  // of the deviation, on a fine grid

 private:
  double omega0_ = 0.0, tan_w0_ = 0.0, eps_ = 0.0;
  std::vector<LogBump> bumps_;  // amplitudes already scaled
};

struct SeparableBump {
  int component = 0;      // 0: delta u-, 1: delta v-
  double amp = 1.0;
  double t_center = 0.0, t_width = 1.0;
  double theta_center = 0.0, theta_width = 0.2;  // radians
};

class UpstreamField {
 public:
  // Bumps are rescaled so that W^{1,q}_{(0)}(Omega_e) of (delta u-, delta v-)
  // plus C^1_{(1)}(Omega_e) of the xi-derivative equals epsilon.
  UpstreamField(double omega0, double omega1, double delta_hat0,
                std::vector<SeparableBump> bumps, double epsilon, double q = 4.0);
  static UpstreamField unperturbed(double omega0, double omega1);

  double epsilon() const { return eps_; }
  double delta_hat0() const { return dhat0_; }

  // deviation of the upstream velocity from (1, 0) at a physical point
  double delta_u(double x, double y) const;
  double delta_v(double x, double y) const;
  double d_xi_delta_u(double x, double y) const;  // analytic x-derivative
  double d_xi_delta_v(double x, double y) const;

  // point lies in the extended sector Omega_e
  bool in_extended_sector(double x, double y) const;

  double combined_norm(double q) const;

 private:
  double omega0_ = 0.0, omega1_ = 0.0, dhat0_ = 0.05, eps_ = 0.0;
  std::vector<SeparableBump> bumps_;
  double eval(int comp, double x, double y, bool xi_deriv) const;
};

}  // namespace conoshock

#endif
