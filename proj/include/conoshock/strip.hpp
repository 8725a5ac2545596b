#ifndef CONOSHOCK_STRIP_HPP
#define CONOSHOCK_STRIP_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace conoshock {

/// Truncated log-polar strip: t = ln r on a periodic-convention uniform grid
/// (nodes t_min + i h_t, i < n_t, h_t = (t_max - t_min)/n_t), theta inclusive
/// of both rays.
struct StripGrid {
  double t_min = -12.0, t_max = 12.0;
  int n_t = 1024;  // power of two
  double omega0 = 0.0, omega1 = 0.0;
  int n_theta = 129;

  double h_t() const { return (t_max - t_min) / n_t; }
  double h_theta() const { return (omega1 - omega0) / (n_theta - 1); }
  double t(int i) const { return t_min + i * h_t(); }
  double theta(int j) const { return omega0 + j * h_theta(); }
  double r(int i) const;
  std::size_t size() const { return static_cast<std::size_t>(n_t) * n_theta; }
  std::uint64_t fingerprint() const;
  void validate() const;  // throws DomainError on invariant violations
};

bool same_grid(const StripGrid& a, const StripGrid& b);

/// Grid function u(t_i, theta_j) with a weight exponent k: the norms below
/// act on the weighted representative e^{kt} u.
struct WeightedField {
  StripGrid grid;
  double k = 0.0;
  std::vector<double> values;  // row-major, index i*n_theta + j

  WeightedField() = default;
  WeightedField(const StripGrid& g, double weight);
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n_theta + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_theta + j]; }
  double max_abs() const;
};

WeightedField operator+(const WeightedField& a, const WeightedField& b);
WeightedField operator-(const WeightedField& a, const WeightedField& b);
WeightedField operator*(double s, const WeightedField& a);

/// Samples along one ray, indexed by the parent t-grid.
struct RaySamples {
  double t_min = -12.0, t_max = 12.0;
  int n = 1024;
  double k = 0.0;
  std::vector<double> values;

  double h() const { return (t_max - t_min) / n; }
  double t(int i) const { return t_min + i * h(); }
  double r(int i) const;
  static RaySamples on_grid(const StripGrid& g, double weight);
  double max_abs() const;
};

RaySamples operator+(const RaySamples& a, const RaySamples& b);
RaySamples operator-(const RaySamples& a, const RaySamples& b);
RaySamples operator*(double s, const RaySamples& a);

// Sample an analytic field given in sector coordinates (x, y) onto the grid.
WeightedField to_log_polar(const StripGrid& g, double weight,
                           const std::function<double(double, double)>& f);

// Evaluate a field back at a physical point (bilinear in (t, theta); exact at
// node images).
double eval_physical(const WeightedField& f, double x, double y);

// Discrete weighted Sobolev norm: L^q of all derivatives of e^{kt}u up to
// order m (centered second-order differences, one-sided at the ends,
// trapezoid quadrature). m in {0, 1, 2}.
double sobolev_norm(const WeightedField& f, int m, double q);

// Discrete weighted Hoelder norm: sup of |d^a (e^{kt}u)| for |a| <= m.
double holder_norm(const WeightedField& f, int m);

// W^{1,q} line norm of e^{kt}g, the full-derivative surrogate for the
// fractional trace norm.
double trace_norm(const RaySamples& g, double q);
double trace_norm(const RaySamples& g, double k_override, double q);

// Combined Gamma_1 norm: W^{0,q}_{(0)} + C^0.
double gamma1_norm(const RaySamples& g, double q);

// ||h(e^t)/e^t||_q / ||h'(e^t)||_q for h reconstructed from h' samples
// (h(0) = 0 by construction). Contract: <= 1 + quadrature error.
double hardy_ratio(const RaySamples& hprime, double q);

// Pair norm used for iteration states: (sum of q-th powers)^(1/q).
double pair_sobolev_norm(const WeightedField& u, const WeightedField& v, int m,
                         double q);

// Diagnostic dump, header "t,theta,value".
std::string to_csv(const WeightedField& f);

}  // namespace conoshock

#endif
