#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "conoshock/errors.hpp"
#include "conoshock/manufactured.hpp"
#include "conoshock/parallel.hpp"
#include "conoshock/sector.hpp"

using namespace conoshock;

namespace {

StripGrid test_grid(int nt = 256, int nth = 65) {
  StripGrid g;
  g.t_min = -12.0;
  g.t_max = 12.0;
  g.n_t = nt;
  g.omega0 = 1.0;
  g.omega1 = 1.4;
  g.n_theta = nth;
  return g;
}

}  // namespace

TEST_CASE("hartman-wintner gap") {
  CHECK(hartman_wintner_gap(M_PI / 2, 0.7) ==
        doctest::Approx(0.49 + 1.0).epsilon(1e-14));
  CHECK_THROWS_AS(hartman_wintner_gap(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(hartman_wintner_gap(M_PI, 1.0), DomainError);

  // positive on a product grid, minimum 1 at (pi/2, 0)
  double min_a = 1e300;
  for (int i = 1; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      double th = M_PI * i / 100.0;
      double mu = -50.0 + 100.0 * j / 99.0;
      double a = hartman_wintner_gap(th, mu);
      min_a = std::min(min_a, a);
      CHECK(a > 0.0);
    }
  CHECK(min_a >= 1.0 - 1e-12);

  // golden-section oracle for the theta-minimum and its closed form
  auto f = [](double th) { return hartman_wintner_gap(th, 0.0); };
  double a = 0.2, b = M_PI - 0.2;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    double c = b - gr * (b - a), d = a + gr * (b - a);
    if (f(c) < f(d))
      b = d;
    else
      a = c;
  }
  double loc = 0.5 * (a + b);
  CHECK(loc == doctest::Approx(M_PI / 2).epsilon(1e-6));
  CHECK(f(loc) == doctest::Approx(1.0).epsilon(1e-12));
  for (double th : {0.3, 0.9, 1.5, 2.2, 2.9}) {
    double s = std::sin(th);
    CHECK(hartman_wintner_gap(th, 0.0) ==
          doctest::Approx((3.0 + s * s) / (4.0 * s * s)).epsilon(1e-13));
  }
}

TEST_CASE("mode symbol identity on the shifted line") {
  for (int i = 0; i < 1000; ++i) {
    double mu = -500.0 + i;
    cplx lambda(mu, -1.0);
    cplx s = -lambda * lambda + cplx(0.0, 1.0) * lambda;
    cplx expected(-mu * mu + 2.0, 3.0 * mu);
    CHECK(std::abs(s - expected) <= 1e-12 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("solve_mode") {
  StripGrid g = test_grid();
  const int n = g.n_theta;
  std::vector<double> cot(n);
  for (int j = 0; j < n; ++j) cot[j] = std::cos(g.theta(j)) / std::sin(g.theta(j));

  SUBCASE("zero data gives the trivial solution") {
    for (double mu : {0.0, 1.5, -3.0}) {
      ModeProblem mp;
      mp.lambda = cplx(mu, -1.0);
      mp.cot_theta = cot;
      mp.h_theta = g.h_theta();
      mp.rhs.assign(n, cplx(0.0));
      std::vector<cplx> w = solve_mode(mp);
      for (const auto& z : w) CHECK(std::abs(z) == 0.0);
    }
  }

  SUBCASE("manufactured cosine profile recovered at second order") {
    auto err_for = [&](int nth) {
      StripGrid gg = test_grid(256, nth);
      std::vector<double> cc(nth);
      for (int j = 0; j < nth; ++j)
        cc[j] = std::cos(gg.theta(j)) / std::sin(gg.theta(j));
      double mu = 2.0;
      ModeProblem mp;
      mp.lambda = cplx(mu, -1.0);
      mp.cot_theta = cc;
      mp.h_theta = gg.h_theta();
      cplx s = -mp.lambda * mp.lambda + cplx(0.0, 1.0) * mp.lambda;
      mp.rhs.resize(nth);
      for (int j = 0; j < nth; ++j) {
        double th = gg.theta(j);
        // phi = cos th: phi'' + cot(th) phi' + s phi = (s - 2) cos th
        mp.rhs[j] = (s - 2.0) * std::cos(th);
      }
      mp.bc0 = -std::sin(gg.omega0);
      mp.bc1 = -std::sin(gg.omega1);
      std::vector<cplx> w = solve_mode(mp);
      double e = 0.0;
      for (int j = 0; j < nth; ++j)
        e = std::max(e, std::abs(w[j] - std::cos(gg.theta(j))));
      return e;
    };
    double e1 = err_for(65), e2 = err_for(129);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
    CHECK(e2 < 1e-6);
  }

  SUBCASE("lambda off the admissible line trips the spectral guard") {
    ModeProblem mp;
    mp.lambda = cplx(0.0, 0.0);  // constants become homogeneous solutions
    mp.cot_theta = cot;
    mp.h_theta = g.h_theta();
    mp.rhs.assign(n, cplx(0.0));
    mp.bc0 = 1.0;
    mp.bc1 = -1.0;
    CHECK_THROWS_AS(solve_mode(mp), SpectralProximityError);
  }
}

TEST_CASE("neumann solver") {
  StripGrid g = test_grid();

  SUBCASE("zero data gives the zero solution") {
    WeightedField f(g, 1.0);
    RaySamples g0 = RaySamples::on_grid(g, 0.0), g1 = RaySamples::on_grid(g, 0.0);
    ScalarSolveResult r = solve_neumann_singular(f, g0, g1);
    CHECK(r.phi.max_abs() == 0.0);
  }

  SUBCASE("manufactured recovery at second order with small residuals") {
    Bump B{1.0, 0.0, 1.5};
    for (int variant = 0; variant < 3; ++variant) {
      Trig C = variant == 0   ? Trig{false, 1.0, g.omega0}
               : variant == 1 ? Trig{false, 1.0, g.omega1}
                              : Trig{true, 1.0, 0.0};
      auto err_for = [&](int nt, int nth) {
        StripGrid gg = test_grid(nt, nth);
        NeumannCase nc = make_neumann_case(gg, B, C);
        ScalarSolveResult r = solve_neumann_singular(nc.f, nc.g0, nc.g1);
        CHECK(r.diag.residual_interior < 1e-7);
        CHECK(r.diag.residual_bc0 < 1e-7);
        CHECK(r.diag.residual_bc1 < 1e-7);
        return linf_error(r.phi, nc.exact);
      };
      double e1 = err_for(256, 65), e2 = err_for(512, 129);
      CAPTURE(variant);
      CHECK(e1 / e2 > 3.0);
      CHECK(e1 / e2 < 5.0);
    }
  }

  SUBCASE("non-decaying data is rejected") {
    WeightedField f(g, 1.0);
    for (int i = 0; i < g.n_t; ++i)
      for (int j = 0; j < g.n_theta; ++j) f.at(i, j) = std::exp(-g.t(i));
    // e^t f = 1 everywhere: no decay at the window ends
    RaySamples g0 = RaySamples::on_grid(g, 0.0), g1 = RaySamples::on_grid(g, 0.0);
    CHECK_THROWS_AS(solve_neumann_singular(f, g0, g1), TruncationError);
  }
}

TEST_CASE("dirichlet lift solver") {
  StripGrid g = test_grid();

  SUBCASE("zero data gives the zero lift") {
    WeightedField f2(g, 1.0);
    ScalarSolveResult r = solve_dirichlet_laplace(f2);
    CHECK(r.phi.max_abs() == 0.0);
  }

  SUBCASE("manufactured recovery at second order") {
    for (int variant = 0; variant < 3; ++variant) {
      Bump B{1.0, 0.5 * variant - 0.5, 1.4 + 0.2 * variant};
      int mode_k = 1 + variant % 2;
      auto err_for = [&](int nt, int nth) {
        StripGrid gg = test_grid(nt, nth);
        DirichletCase dc = make_dirichlet_case(gg, B, mode_k);
        ScalarSolveResult r = solve_dirichlet_laplace(dc.f2);
        CHECK(r.diag.residual_interior < 1e-7);
        return linf_error(r.phi, dc.exact);
      };
      double e1 = err_for(256, 65), e2 = err_for(512, 129);
      CAPTURE(variant);
      CHECK(e1 / e2 > 3.0);
      CHECK(e1 / e2 < 5.0);
    }
  }
}

TEST_CASE("first-order system solver") {
  StripGrid g = test_grid();

  SUBCASE("zero data") {
    LinearData d{WeightedField(g, 1.0), WeightedField(g, 1.0),
                 RaySamples::on_grid(g, 0.0), RaySamples::on_grid(g, 0.0)};
    FirstOrderResult r = solve_first_order(d);
    CHECK(r.U.u.max_abs() == 0.0);
    CHECK(r.U.v.max_abs() == 0.0);
  }

  SUBCASE("manufactured recovery at second order") {
    for (int variant = 0; variant < 3; ++variant) {
      Bump B1{1.0, 0.0, 1.5}, B2{0.8, 0.5, 1.3};
      Trig C = variant == 0   ? Trig{false, 1.0, g.omega0}
               : variant == 1 ? Trig{true, 1.0, 0.0}
                              : Trig{false, 2.0, g.omega1};
      auto err_for = [&](int nt, int nth) {
        StripGrid gg = test_grid(nt, nth);
        FirstOrderCase fc = make_first_order_case(gg, B1, C, B2, 1);
        FirstOrderResult r = solve_first_order(fc.data);
        CHECK(r.diag.residual_interior < 1e-6);
        CHECK(r.diag.residual_bc0 < 1e-6);
        CHECK(r.diag.residual_bc1 < 1e-6);
        return std::max(linf_error(r.U.u, fc.exact.u),
                        linf_error(r.U.v, fc.exact.v));
      };
      double e1 = err_for(256, 65), e2 = err_for(512, 129);
      CAPTURE(variant);
      CHECK(e1 / e2 > 3.0);
      CHECK(e1 / e2 < 5.0);
    }
  }

  SUBCASE("linearity") {
    StripGrid gg = test_grid();
    FirstOrderCase c1 = make_first_order_case(gg, Bump{1.0, 0.0, 1.5},
                                              Trig{false, 1.0, gg.omega0},
                                              Bump{0.8, 0.5, 1.3}, 1);
    FirstOrderCase c2 = make_first_order_case(gg, Bump{0.6, -1.0, 1.2},
                                              Trig{true, 1.0, 0.0},
                                              Bump{1.1, -0.5, 1.6}, 2);
    const double a = 1.7, b = -0.4;
    LinearData mix;
    mix.f1 = (a * c1.data.f1) + (b * c2.data.f1);
    mix.f2 = (a * c1.data.f2) + (b * c2.data.f2);
    mix.g0 = (a * c1.data.g0) + (b * c2.data.g0);
    mix.g1 = (a * c1.data.g1) + (b * c2.data.g1);
    FirstOrderResult r1 = solve_first_order(c1.data);
    FirstOrderResult r2 = solve_first_order(c2.data);
    FirstOrderResult rm = solve_first_order(mix);
    double scale = rm.U.u.max_abs() + rm.U.v.max_abs();
    double err = 0.0;
    for (std::size_t i = 0; i < rm.U.u.values.size(); ++i) {
      err = std::max(err, std::abs(rm.U.u.values[i] - a * r1.U.u.values[i] -
                                   b * r2.U.u.values[i]));
      err = std::max(err, std::abs(rm.U.v.values[i] - a * r1.U.v.values[i] -
                                   b * r2.U.v.values[i]));
    }
    CHECK(err / scale < 1e-10);
  }
}

TEST_CASE("solver output is independent of the worker cap") {
  StripGrid g = test_grid();
  NeumannCase nc = make_neumann_case(g, Bump{1.0, 0.0, 1.5},
                                     Trig{false, 1.0, g.omega0});
  set_worker_cap(1);
  ScalarSolveResult r1 = solve_neumann_singular(nc.f, nc.g0, nc.g1);
  set_worker_cap(4);
  ScalarSolveResult r4 = solve_neumann_singular(nc.f, nc.g0, nc.g1);
  set_worker_cap(0);  // back to the environment setting
  CHECK(r1.phi.values == r4.phi.values);
}

TEST_CASE("perturbation size") {
  StripGrid g = test_grid();
  CoefficientDeviations dev = CoefficientDeviations::zero(g);
  CHECK(perturbation_size(dev) == 0.0);

  dev.dA = MatrixField(g);
  const double delta = 1e-2;
  for (auto& v : dev.dA.e00) v = delta;
  for (auto& v : dev.dA.e11) v = delta;
  CHECK(perturbation_size(dev) == doctest::Approx(delta).epsilon(1e-14));
}

TEST_CASE("perturbed-coefficient solve") {
  StripGrid g = test_grid();
  FirstOrderCase fc = make_first_order_case(g, Bump{1.0, 0.0, 1.5},
                                            Trig{false, 1.0, g.omega0},
                                            Bump{0.8, 0.5, 1.3}, 1);

  SUBCASE("base coefficients reproduce the base solve") {
    CoefficientDeviations dev = CoefficientDeviations::zero(g);
    PerturbedResult r = solve_perturbed(dev, fc.data);
    FirstOrderResult base = solve_first_order(fc.data);
    double err = std::max(linf_error(r.U.u, base.U.u), linf_error(r.U.v, base.U.v));
    CHECK(err == 0.0);  // the corrective step vanishes identically
  }

  SUBCASE("rate grows with the identity perturbation of A") {
    std::vector<double> rates;
    for (double delta : {1e-3, 3e-3, 1e-2}) {
      CoefficientDeviations dev = CoefficientDeviations::zero(g);
      dev.dA = MatrixField(g);
      for (auto& v : dev.dA.e00) v = delta;
      for (auto& v : dev.dA.e11) v = delta;
      PerturbedResult r = solve_perturbed(dev, fc.data);
      rates.push_back(r.diag.rate);
    }
    CHECK(rates[0] < rates[1]);
    CHECK(rates[1] < rates[2]);
    CHECK(rates[2] < 0.5);
  }

  SUBCASE("refusal before divergence when the perturbation is ramped") {
    PerturbedOptions popt;
    popt.ehat_max = 100.0;  // force the refusal through the rate monitor
    bool refused = false;
    for (double delta = 0.05; delta < 20.0; delta *= 2.0) {
      CoefficientDeviations dev = CoefficientDeviations::zero(g);
      dev.dA = MatrixField(g);
      for (auto& v : dev.dA.e00) v = delta;
      for (auto& v : dev.dA.e11) v = delta;
      try {
        PerturbedResult r = solve_perturbed(dev, fc.data, {}, popt);
        CHECK(std::isfinite(r.U.u.max_abs()));
      } catch (const NonContractionError&) {
        refused = true;
        break;
      }
    }
    CHECK(refused);
  }
}
