#include "conoshock/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "conoshock/errors.hpp"

namespace conoshock {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw RootNotFoundError("bisect: no sign change on bracket");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw DomainError("Pchip: need >= 2 nodes and matching sizes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i])) throw DomainError("Pchip: x not increasing");
  d_.assign(n, 0.0);
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      // weighted harmonic mean keeps the interpolant monotone
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0)
      d = 0.0;
    else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
      d = 3.0 * d0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t Pchip::locate(double xq) const {
  if (xq <= x_.front()) return 0;
  if (xq >= x_.back()) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Pchip::operator()(double xq) const {
  std::size_t i = locate(xq);
  double h = x_[i + 1] - x_[i];
  double s = (xq - x_[i]) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double Pchip::derivative(double xq) const {
  std::size_t i = locate(xq);
  double h = x_[i + 1] - x_[i];
  double s = (xq - x_[i]) / h;
  double dh00 = 6 * s * (s - 1) / h;
  double dh10 = (1 - 4 * s + 3 * s * s);
  double dh01 = -6 * s * (s - 1) / h;
  double dh11 = (3 * s * s - 2 * s);
  return dh00 * y_[i] + dh10 * d_[i] + dh01 * y_[i + 1] + dh11 * d_[i + 1];
}

std::vector<cplx> solve_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& rhs,
                                double* cond_est) {
  const std::size_t n = diag.size();
  std::vector<cplx> c(n), d(n), x(n);
  double max_mag = 0.0, min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(lower[i]);
    if (i + 1 < n) row += std::abs(upper[i]);
    max_mag = std::max(max_mag, row);
  }
  cplx piv = diag[0];
  min_pivot = std::min(min_pivot, std::abs(piv));
  if (std::abs(piv) == 0.0) throw SpectralProximityError("tridiag: zero pivot");
  c[0] = upper[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    double ap = std::abs(piv);
    min_pivot = std::min(min_pivot, ap);
    if (ap == 0.0) throw SpectralProximityError("tridiag: zero pivot");
    if (i + 1 < n) c[i] = upper[i] / piv;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  if (cond_est) *cond_est = max_mag / min_pivot;
  return x;
}

std::vector<cplx> apply_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& x) {
  const std::size_t n = diag.size();
  std::vector<cplx> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = diag[i] * x[i];
    if (i > 0) v += lower[i] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::vector<double> fd_derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / h;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> trapezoid_weights(int n, double h) {
  std::vector<double> w(static_cast<std::size_t>(n), h);
  if (n >= 1) w.front() = 0.5 * h;
  if (n >= 2) w.back() = 0.5 * h;
  return w;
}

RateReport contraction_diagnostics(const std::vector<double>& diffs) {
  RateReport rep;
  if (diffs.size() < 2) {
    rep.contracting = true;
    return rep;
  }
  for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
    if (diffs[i] <= 0.0) break;  // converged exactly; later ratios meaningless
    rep.rates.push_back(diffs[i + 1] / diffs[i]);
  }
  if (!rep.rates.empty()) {
    rep.max_rate = *std::max_element(rep.rates.begin(), rep.rates.end());
    double first = diffs.front(), last = diffs[rep.rates.size()];
    if (first > 0.0 && last > 0.0)
      rep.geometric_rate =
          std::pow(last / first, 1.0 / static_cast<double>(rep.rates.size()));
  }
  rep.contracting = rep.max_rate < 1.0;
  return rep;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace conoshock
