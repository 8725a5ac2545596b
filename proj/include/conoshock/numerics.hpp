#ifndef CONOSHOCK_NUMERICS_HPP
#define CONOSHOCK_NUMERICS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace conoshock {

using cplx = std::complex<double>;

// Bisection on [lo, hi] assuming f(lo)*f(hi) <= 0; tolerance on the argument.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 200);

// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing x.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double xq) const;
  double derivative(double xq) const;
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_, y_, d_;  // node slopes
  std::size_t locate(double xq) const;
};

// Complex tridiagonal Thomas solve. `lower[0]` and `upper[n-1]` are unused.
// cond_est receives a cheap growth-based condition estimate.
std::vector<cplx> solve_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& rhs,
                                double* cond_est = nullptr);

// y = A x for the same tridiagonal layout.
std::vector<cplx> apply_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& x);

// Second-order finite-difference derivative along a uniformly spaced vector
// (centered inside, one-sided at the ends).
std::vector<double> fd_derivative(const std::vector<double>& v, double h);

// Trapezoid weights for n uniformly spaced nodes with spacing h.
std::vector<double> trapezoid_weights(int n, double h);

// Geometric-rate report for a sequence of successive-difference norms.
struct RateReport {
  std::vector<double> rates;   // d[i+1]/d[i]
  double geometric_rate = 0.0; // (d_last/d_first)^(1/(n-1))
  double max_rate = 0.0;
  bool contracting = false;    // max_rate < 1
};
RateReport contraction_diagnostics(const std::vector<double>& diffs);

// FNV-1a 64-bit content hash (used for artifact manifests).
std::uint64_t fnv1a64(const void* data, std::size_t n);

}  // namespace conoshock

#endif
