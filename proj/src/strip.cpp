#include "conoshock/strip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

double StripGrid::r(int i) const { return std::exp(t(i)); }

std::uint64_t StripGrid::fingerprint() const {
  double buf[4] = {t_min, t_max, omega0, omega1};
  std::uint64_t h = fnv1a64(buf, sizeof(buf));
  int ibuf[2] = {n_t, n_theta};
  h ^= fnv1a64(ibuf, sizeof(ibuf));
  return h;
}

void StripGrid::validate() const {
  if (!(t_min < t_max)) throw DomainError("StripGrid: t_min must be < t_max");
  if (n_t < 8 || (n_t & (n_t - 1)) != 0)
    throw DomainError("StripGrid: n_t must be a power of two >= 8");
  if (!(omega0 < omega1)) throw DomainError("StripGrid: omega0 must be < omega1");
  if (n_theta < 5) throw DomainError("StripGrid: n_theta too small");
}

bool same_grid(const StripGrid& a, const StripGrid& b) {
  return a.fingerprint() == b.fingerprint();
}

WeightedField::WeightedField(const StripGrid& g, double weight)
    : grid(g), k(weight), values(g.size(), 0.0) {}

double WeightedField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void check_compatible(const WeightedField& a, const WeightedField& b) {
  if (!same_grid(a.grid, b.grid) || a.k != b.k)
    throw DomainError("WeightedField: incompatible operands");
}
}  // namespace

WeightedField operator+(const WeightedField& a, const WeightedField& b) {
  check_compatible(a, b);
  WeightedField c = a;
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += b.values[i];
  return c;
}

WeightedField operator-(const WeightedField& a, const WeightedField& b) {
  check_compatible(a, b);
  WeightedField c = a;
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] -= b.values[i];
  return c;
}

WeightedField operator*(double s, const WeightedField& a) {
  WeightedField c = a;
  for (double& v : c.values) v *= s;
  return c;
}

double RaySamples::r(int i) const { return std::exp(t(i)); }

RaySamples RaySamples::on_grid(const StripGrid& g, double weight) {
  RaySamples r;
  r.t_min = g.t_min;
  r.t_max = g.t_max;
  r.n = g.n_t;
  r.k = weight;
  r.values.assign(g.n_t, 0.0);
  return r;
}

double RaySamples::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

RaySamples operator+(const RaySamples& a, const RaySamples& b) {
  RaySamples c = a;
  for (int i = 0; i < c.n; ++i) c.values[i] += b.values[i];
  return c;
}

RaySamples operator-(const RaySamples& a, const RaySamples& b) {
  RaySamples c = a;
  for (int i = 0; i < c.n; ++i) c.values[i] -= b.values[i];
  return c;
}

RaySamples operator*(double s, const RaySamples& a) {
  RaySamples c = a;
  for (double& v : c.values) v *= s;
  return c;
}

WeightedField to_log_polar(const StripGrid& g, double weight,
                           const std::function<double(double, double)>& f) {
  WeightedField out(g, weight);
  for (int i = 0; i < g.n_t; ++i) {
    double r = g.r(i);
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      out.at(i, j) = f(r * std::cos(th), r * std::sin(th));
    }
  }
  return out;
}

double eval_physical(const WeightedField& f, double x, double y) {
  const StripGrid& g = f.grid;
  double r = std::hypot(x, y);
  if (!(r > 0.0)) throw DomainError("eval_physical: point at the vertex");
  double t = std::log(r);
  double th = std::atan2(y, x);
  if (th < g.omega0 - 1e-12 || th > g.omega1 + 1e-12)
    throw DomainError("eval_physical: angle outside the sector");
  double ft = (t - g.t_min) / g.h_t();
  double fj = (th - g.omega0) / g.h_theta();
  int i0 = std::clamp(static_cast<int>(std::floor(ft)), 0, g.n_t - 2);
  int j0 = std::clamp(static_cast<int>(std::floor(fj)), 0, g.n_theta - 2);
  double a = ft - i0, b = fj - j0;
  // snap to avoid interpolating across a node due to roundoff
  if (std::abs(a) < 1e-12) a = 0.0;
  if (std::abs(b) < 1e-12) b = 0.0;
  if (std::abs(a - 1.0) < 1e-12) a = 1.0;
  if (std::abs(b - 1.0) < 1e-12) b = 1.0;
  return (1 - a) * (1 - b) * f.at(i0, j0) + a * (1 - b) * f.at(i0 + 1, j0) +
         (1 - a) * b * f.at(i0, j0 + 1) + a * b * f.at(i0 + 1, j0 + 1);
}

namespace {

// Weighted representative w = e^{kt} u as a dense matrix.
std::vector<double> weighted_rep(const WeightedField& f) {
  const StripGrid& g = f.grid;
  std::vector<double> w(f.values.size());
  for (int i = 0; i < g.n_t; ++i) {
    double e = std::exp(f.k * g.t(i));
    for (int j = 0; j < g.n_theta; ++j)
      w[static_cast<std::size_t>(i) * g.n_theta + j] =
          e * f.at(i, j);
  }
  return w;
}

// One-sided/centered second-order derivative of a row-major matrix along t.
std::vector<double> d_t(const std::vector<double>& w, int nt, int nth, double h) {
  std::vector<double> d(w.size());
  auto idx = [nth](int i, int j) { return static_cast<std::size_t>(i) * nth + j; };
  for (int j = 0; j < nth; ++j) {
    d[idx(0, j)] = (-3 * w[idx(0, j)] + 4 * w[idx(1, j)] - w[idx(2, j)]) / (2 * h);
    for (int i = 1; i + 1 < nt; ++i)
      d[idx(i, j)] = (w[idx(i + 1, j)] - w[idx(i - 1, j)]) / (2 * h);
    d[idx(nt - 1, j)] =
        (3 * w[idx(nt - 1, j)] - 4 * w[idx(nt - 2, j)] + w[idx(nt - 3, j)]) / (2 * h);
  }
  return d;
}

std::vector<double> d_theta(const std::vector<double>& w, int nt, int nth,
                            double h) {
  std::vector<double> d(w.size());
  auto idx = [nth](int i, int j) { return static_cast<std::size_t>(i) * nth + j; };
  for (int i = 0; i < nt; ++i) {
    d[idx(i, 0)] = (-3 * w[idx(i, 0)] + 4 * w[idx(i, 1)] - w[idx(i, 2)]) / (2 * h);
    for (int j = 1; j + 1 < nth; ++j)
      d[idx(i, j)] = (w[idx(i, j + 1)] - w[idx(i, j - 1)]) / (2 * h);
    d[idx(i, nth - 1)] =
        (3 * w[idx(i, nth - 1)] - 4 * w[idx(i, nth - 2)] + w[idx(i, nth - 3)]) /
        (2 * h);
  }
  return d;
}

// |x|^q with fast paths for the common even integer exponents
inline double pow_q(double x, double q) {
  if (q == 2.0) return x * x;
  if (q == 4.0) {
    double y = x * x;
    return y * y;
  }
  return std::pow(std::abs(x), q);
}

double lq_power(const std::vector<double>& w, int nt, int nth, double ht,
                double hth, double q) {
  std::vector<double> wt = trapezoid_weights(nt, ht);
  std::vector<double> wh = trapezoid_weights(nth, hth);
  double acc = 0.0;
  for (int i = 0; i < nt; ++i) {
    double row = 0.0;
    for (int j = 0; j < nth; ++j)
      row += wh[j] * pow_q(w[static_cast<std::size_t>(i) * nth + j], q);
    acc += wt[i] * row;
  }
  return acc;
}

}  // namespace

double sobolev_norm(const WeightedField& f, int m, double q) {
  if (m < 0 || m > 2) throw DomainError("sobolev_norm: m must be 0, 1 or 2");
  if (!(q > 1.0)) throw DomainError("sobolev_norm: q must exceed 1");
  const StripGrid& g = f.grid;
  const int nt = g.n_t, nth = g.n_theta;
  const double ht = g.h_t(), hth = g.h_theta();
  std::vector<double> w = weighted_rep(f);
  double acc = lq_power(w, nt, nth, ht, hth, q);
  if (m >= 1) {
    std::vector<double> wt = d_t(w, nt, nth, ht);
    std::vector<double> wh = d_theta(w, nt, nth, hth);
    acc += lq_power(wt, nt, nth, ht, hth, q);
    acc += lq_power(wh, nt, nth, ht, hth, q);
    if (m == 2) {
      acc += lq_power(d_t(wt, nt, nth, ht), nt, nth, ht, hth, q);
      acc += lq_power(d_theta(wh, nt, nth, hth), nt, nth, ht, hth, q);
      acc += lq_power(d_theta(wt, nt, nth, hth), nt, nth, ht, hth, q);
    }
  }
  return std::pow(acc, 1.0 / q);
}

double holder_norm(const WeightedField& f, int m) {
  if (m < 0 || m > 2) throw DomainError("holder_norm: m must be 0, 1 or 2");
  const StripGrid& g = f.grid;
  const int nt = g.n_t, nth = g.n_theta;
  std::vector<double> w = weighted_rep(f);
  auto sup = [](const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s = std::max(s, std::abs(x));
    return s;
  };
  double norm = sup(w);
  if (m >= 1) {
    std::vector<double> wt = d_t(w, nt, nth, g.h_t());
    std::vector<double> wh = d_theta(w, nt, nth, g.h_theta());
    norm = std::max({norm, sup(wt), sup(wh)});
    if (m == 2)
      norm = std::max({norm, sup(d_t(wt, nt, nth, g.h_t())),
                       sup(d_theta(wh, nt, nth, g.h_theta())),
                       sup(d_theta(wt, nt, nth, g.h_theta()))});
  }
  return norm;
}

namespace {

std::vector<double> weighted_line(const RaySamples& g, double k) {
  std::vector<double> w(g.values.size());
  for (int i = 0; i < g.n; ++i) w[i] = std::exp(k * g.t(i)) * g.values[i];
  return w;
}

double line_lq(const std::vector<double>& w, double h, double q) {
  std::vector<double> tw = trapezoid_weights(static_cast<int>(w.size()), h);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += tw[i] * pow_q(w[i], q);
  return acc;
}

}  // namespace

double trace_norm(const RaySamples& g, double k_override, double q) {
  std::vector<double> w = weighted_line(g, k_override);
  std::vector<double> dw = fd_derivative(w, g.h());
  return std::pow(line_lq(w, g.h(), q) + line_lq(dw, g.h(), q), 1.0 / q);
}

double trace_norm(const RaySamples& g, double q) { return trace_norm(g, g.k, q); }

double gamma1_norm(const RaySamples& g, double q) {
  std::vector<double> w = weighted_line(g, 0.0);
  double sup = 0.0;
  for (double x : w) sup = std::max(sup, std::abs(x));
  return std::pow(line_lq(w, g.h(), q), 1.0 / q) + sup;
}

double hardy_ratio(const RaySamples& hprime, double q) {
  const int n = hprime.n;
  const double h = hprime.h();
  // h(x) = integral of h' from 0; h' treated as zero below the window
  std::vector<double> hv(n, 0.0);
  double x_prev = hprime.r(0);
  hv[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    double x = hprime.r(i);
    hv[i] = hv[i - 1] + 0.5 * (x - x_prev) * (hprime.values[i] + hprime.values[i - 1]);
    x_prev = x;
  }
  std::vector<double> ratio(n), dv(n);
  for (int i = 0; i < n; ++i) {
    ratio[i] = hv[i] / hprime.r(i);
    dv[i] = hprime.values[i];
  }
  double num = std::pow(line_lq(ratio, h, q), 1.0 / q);
  double den = std::pow(line_lq(dv, h, q), 1.0 / q);
  if (den == 0.0) throw DomainError("hardy_ratio: zero denominator");
  return num / den;
}

double pair_sobolev_norm(const WeightedField& u, const WeightedField& v, int m,
                         double q) {
  double a = sobolev_norm(u, m, q), b = sobolev_norm(v, m, q);
  return std::pow(std::pow(a, q) + std::pow(b, q), 1.0 / q);
}

std::string to_csv(const WeightedField& f) {
  std::string out = "t,theta,value\n";
  char buf[96];
  for (int i = 0; i < f.grid.n_t; ++i)
    for (int j = 0; j < f.grid.n_theta; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", f.grid.t(i),
                    f.grid.theta(j), f.at(i, j));
      out += buf;
    }
  return out;
}

}  // namespace conoshock
