#include "conoshock/manufactured.hpp"

#include <cmath>

namespace conoshock {

double Bump::val(double t) const {
  double z = (t - center) / width;
  return amp * std::exp(-0.5 * z * z);
}
double Bump::d1(double t) const {
  double z = (t - center) / width;
  return -val(t) * z / width;
}
double Bump::d2(double t) const {
  double z = (t - center) / width;
  return val(t) * (z * z - 1.0) / (width * width);
}

double Trig::val(double th) const {
  double a = freq * (th - phase);
  return use_sin ? std::sin(a) : std::cos(a);
}
double Trig::d1(double th) const {
  double a = freq * (th - phase);
  return freq * (use_sin ? std::cos(a) : -std::sin(a));
}
double Trig::d2(double th) const { return -freq * freq * val(th); }

NeumannCase make_neumann_case(const StripGrid& g, const Bump& B, const Trig& C) {
  NeumannCase out;
  out.exact = WeightedField(g, -1.0);
  out.f = WeightedField(g, 1.0);
  out.g0 = RaySamples::on_grid(g, 0.0);
  out.g1 = RaySamples::on_grid(g, 0.0);
  const double cw0 = std::cos(g.omega0), sw1 = std::sin(g.omega1);
  for (int i = 0; i < g.n_t; ++i) {
    double t = g.t(i);
    double b = B.val(t), b1 = B.d1(t), b2 = B.d2(t);
    out.g0.values[i] = b * C.d1(g.omega0) / cw0;
    out.g1.values[i] = -b * C.d1(g.omega1) / sw1;
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      double c = C.val(th), c1 = C.d1(th), c2 = C.d2(th);
      out.exact.at(i, j) = std::exp(t) * b * c;
      // e^{2t} f = (2B + 3B' + B'') C + B C'' + cot(th) B C'
      double cot = std::cos(th) / std::sin(th);
      out.f.at(i, j) =
          std::exp(-t) * ((2 * b + 3 * b1 + b2) * c + b * c2 + cot * b * c1);
    }
  }
  return out;
}

DirichletCase make_dirichlet_case(const StripGrid& g, const Bump& B, int mode_k) {
  DirichletCase out;
  out.exact = WeightedField(g, -1.0);
  out.f2 = WeightedField(g, 1.0);
  const double L = g.omega1 - g.omega0;
  const double kk = mode_k * M_PI / L;
  for (int i = 0; i < g.n_t; ++i) {
    double t = g.t(i);
    double b = B.val(t), b1 = B.d1(t), b2 = B.d2(t);
    for (int j = 0; j < g.n_theta; ++j) {
      double s = std::sin(kk * (g.theta(j) - g.omega0));
      out.exact.at(i, j) = std::exp(t) * b * s;
      // e^{2t} f2 = (B + 2B' + B'') S + B S''
      out.f2.at(i, j) = std::exp(-t) * ((b + 2 * b1 + b2) * s - kk * kk * b * s);
    }
  }
  return out;
}

FirstOrderCase make_first_order_case(const StripGrid& g, const Bump& B1,
                                     const Trig& C1, const Bump& B2, int mode_k) {
  FirstOrderCase out;
  out.exact.u = WeightedField(g, 0.0);
  out.exact.v = WeightedField(g, 0.0);
  out.data.f1 = WeightedField(g, 1.0);
  out.data.f2 = WeightedField(g, 1.0);
  out.data.g0 = RaySamples::on_grid(g, 0.0);
  out.data.g1 = RaySamples::on_grid(g, 0.0);
  const double L = g.omega1 - g.omega0;
  const double kk = mode_k * M_PI / L;
  const double tw0 = std::tan(g.omega0), cw1 = 1.0 / std::tan(g.omega1);

  for (int i = 0; i < g.n_t; ++i) {
    double t = g.t(i);
    double b = B1.val(t), b1 = B1.d1(t), b2 = B1.d2(t);
    double a = B2.val(t), a1 = B2.d1(t), a2 = B2.d2(t);
    double emt = std::exp(-t);
    for (int j = 0; j < g.n_theta; ++j) {
      double th = g.theta(j);
      double sn = std::sin(th), cs = std::cos(th);
      double cot = cs / sn;
      double c = C1.val(th), c1 = C1.d1(th), c2 = C1.d2(th);
      double S = std::sin(kk * (th - g.omega0)), S1 = kk * std::cos(kk * (th - g.omega0));

      // phi = e^t b c: gradient in sector coordinates
      double phi_t_over_et = (b + b1) * c;  // e^{-t} phi_t
      double phi_th_over_et = b * c1;
      double phi_x = cs * phi_t_over_et - sn * phi_th_over_et;
      double phi_y = sn * phi_t_over_et + cs * phi_th_over_et;

      // Phi = e^t a S
      double Phi_t_over_et = (a + a1) * S;
      double Phi_th_over_et = a * S1;
      double Phi_x = cs * Phi_t_over_et - sn * Phi_th_over_et;
      double Phi_y = sn * Phi_t_over_et + cs * Phi_th_over_et;

      double u = phi_x - Phi_y;
      double v = phi_y + Phi_x;
      out.exact.u.at(i, j) = u;
      out.exact.v.at(i, j) = v;

      // f1 = L0 phi + Phi_x / y, f2 = Laplace Phi (both exact identities)
      double L0phi = emt * ((2 * b + 3 * b1 + b2) * c + b * c2 + cot * b * c1);
      double lapPhi = emt * ((a + 2 * a1 + a2) * S - kk * kk * a * S);
      out.data.f1.at(i, j) = L0phi + Phi_x / (std::exp(t) * sn);
      out.data.f2.at(i, j) = lapPhi;
      if (j == 0) out.data.g0.values[i] = v - tw0 * u;
      if (j == g.n_theta - 1) out.data.g1.values[i] = u - cw1 * v;
    }
  }
  return out;
}

double linf_error(const WeightedField& computed, const WeightedField& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < computed.values.size(); ++i)
    e = std::max(e, std::abs(computed.values[i] - exact.values[i]));
  return e;
}

}  // namespace conoshock
