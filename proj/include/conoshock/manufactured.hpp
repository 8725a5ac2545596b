#ifndef CONOSHOCK_MANUFACTURED_HPP
#define CONOSHOCK_MANUFACTURED_HPP

#include "conoshock/sector.hpp"
#include "conoshock/strip.hpp"

namespace conoshock {

/// Closed-form fields of the shape e^{t} B(t) C(theta) with Gaussian B and
/// trigonometric C, plus the data they induce for each of the three solvers.

struct Bump {
  double amp = 1.0, center = 0.0, width = 1.5;
  double val(double t) const;
  double d1(double t) const;
  double d2(double t) const;
};

struct Trig {
  bool use_sin = false;
  double freq = 1.0;
  double phase = 0.0;  // cos(freq*(theta - phase)) or sin(...)
  double val(double th) const;
  double d1(double th) const;
  double d2(double th) const;
};

struct NeumannCase {
  WeightedField exact;  // phi, k = -1
  WeightedField f;      // k = +1
  RaySamples g0, g1;
};

// phi = e^t B(t) C(theta); data from the polar identities
//   e^{2t} f = phi_tt + phi_thth + phi_t + cot th phi_th,
//   g0 = B C'(w0)/cos w0,  g1 = -B C'(w1)/sin w1.
NeumannCase make_neumann_case(const StripGrid& g, const Bump& B, const Trig& C);

struct DirichletCase {
  WeightedField exact;  // Phi, k = -1
  WeightedField f2;     // k = +1
};

// Phi = e^t B(t) sin(k pi (theta - w0)/(w1 - w0)).
DirichletCase make_dirichlet_case(const StripGrid& g, const Bump& B, int mode_k);

struct FirstOrderCase {
  VectorField exact;  // U = (grad phi) - (Phi_y, -Phi_x)
  LinearData data;
};

// Potentials phi = e^t B1 C1 and Phi = e^t B2 sin(k pi (theta-w0)/L); all data
// fields evaluated in closed form.
FirstOrderCase make_first_order_case(const StripGrid& g, const Bump& B1,
                                     const Trig& C1, const Bump& B2, int mode_k);

// Max-norm difference against a grid field.
double linf_error(const WeightedField& computed, const WeightedField& exact);

}  // namespace conoshock

#endif
