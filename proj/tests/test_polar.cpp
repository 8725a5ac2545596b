#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"
#include "conoshock/polar.hpp"

using namespace conoshock;

TEST_CASE("polar function at the origin") {
  for (double gamma : {1.5, 2.0})
    for (double b : {0.5, 1.0, 2.0}) {
      CHECK(polar_F(0.0, 0.0, gamma, b) == 0.0);
      // d/dtau F(0, 0) by central differences
      double h = 1e-5;
      double d = (polar_F(h, 0.0, gamma, b) - polar_F(-h, 0.0, gamma, b)) / (2 * h);
      CHECK(d == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("polar function hand value") {
  // independent evaluation: inner bracket 1.75/4.5 + 0.1, exponent -1
  double inner = 1.0 * (1.0 + 2.0 * 0.5 - 0.25) / (2.0 * 1.5 * 1.5) + 0.1;
  double expected = 0.5 - (1.5 / 0.5) * (0.1 / inner);
  CHECK(polar_F(0.5, 0.1, 2.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(-0.11364).epsilon(1e-4));
  CHECK_THROWS_AS(polar_F(1.5, 0.1, 2.0, 1.0), DomainError);  // b tau >= 1
}

TEST_CASE("solve_tau against a plain bisection oracle") {
  CHECK(solve_tau(0.0, 2.0, 1.0).tau == 0.0);
  const double nu = 1e-3, gamma = 2.0, b = 1.0;
  TauResult t = solve_tau(nu, gamma, b);
  // oracle: naive bisection on a bracket around the weak root
  auto F = [&](double tau) { return polar_F(tau, nu, gamma, b); };
  double oracle = bisect(F, 1e-12, 0.1, 1e-15);
  CHECK(t.tau == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(std::abs(F(t.tau)) < 1e-13);
}

TEST_CASE("tau ratio bracket and monotone decay") {
  for (double gamma : {1.5, 2.0})
    for (double b : {0.5, 1.0, 2.0}) {
      double lo = 1e300, hi = 0.0, prev = 1e300;
      for (double nu : {1e-2, 1e-3, 1e-4, 1e-5}) {
        double tau = solve_tau(nu, gamma, b).tau;
        CHECK(tau < prev);  // tau(nu) -> 0 monotonically along the sweep
        prev = tau;
        double ratio = tau / std::pow(nu, 1.0 / (gamma - 1.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      CHECK(hi / lo < 4.0);
    }
}

TEST_CASE("solve_tau diagnostics") {
  // at gamma = 2, b = 1, nu = 0.01 both the weak and strong roots sit in the
  // bracket; the smallest is returned and the rest are reported
  TauResult t = solve_tau(1e-2, 2.0, 1.0);
  CHECK(t.ambiguous);
  CHECK(t.all_roots.size() >= 2);
  CHECK(t.tau == t.all_roots.front());
  TauOptions strict;
  strict.require_unique = true;
  CHECK_THROWS_AS(solve_tau(1e-2, 2.0, 1.0, strict), AmbiguityError);
  // no admissible nu above the cap
  CHECK_THROWS_AS(solve_tau(0.2, 2.0, 1.0), DomainError);
}

TEST_CASE("post-shock state") {
  FlowState s = post_shock_state(0.5, 1.0, 1.0);
  CHECK(s.u == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.rho == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(post_shock_state(2.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(post_shock_state(-0.1, 1.0, 1.0), DomainError);

  // tau -> 0 with nu -> 0: u, v -> 0 while rho stays O(1)
  GasParameters gas = GasParameters::from_nu(2.0, 1e-5);
  PolarPoint p = polar_point(gas, 1.0);
  CHECK(p.post.u < 1e-3);
  CHECK(p.post.v < 1e-3);
  CHECK(p.post.rho > 0.1);
  CHECK(p.post.rho < 10.0);
}

TEST_CASE("Rankine-Hugoniot residuals") {
  FlowState up{1.0, 0.0, 1.0};
  FlowState dn = post_shock_state(0.5, 1.0, 1.0);
  auto [r1, r2] = rh_residual(up, dn, 0.5);
  CHECK(std::abs(r1) < 1e-12);
  CHECK(std::abs(r2) < 1e-12);
  // identical states: zero jumps
  auto [s1, s2] = rh_residual(up, up, 0.37);
  CHECK(s1 == 0.0);
  CHECK(s2 == 0.0);
  // hand evaluation of the G form: 1*(-2/3) + 2*(1/3) = 0
  auto [gform, c2] = rh_residual_curved(up, dn, 0.5);
  CHECK(gform == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(c2) < 1e-15);
}

TEST_CASE("polar sweep invariants") {
  for (double gamma : {1.5, 1.8, 2.0})
    for (double b : {0.5, 1.0, 2.0})
      for (double nu : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        GasParameters gas = GasParameters::from_nu(gamma, nu);
        PolarPoint p = polar_point(gas, b);
        FlowState up{1.0, 0.0, gas.rho_inf};
        auto [r1, r2] = rh_residual(up, p.post, p.tau);
        CHECK(std::abs(r1) < 1e-12);
        CHECK(std::abs(r2) < 1e-12);
        CHECK(std::abs(p.post.v - b * p.post.u) < 1e-15);
        // transonic branch: subsonic downstream
        CHECK(mach(p.post, gamma) < 1.0);
      }
}

TEST_CASE("apple curve") {
  auto curve = emit_apple_curve(2.0, 0.01, 400);
  REQUIRE(curve.size() > 100);
  CHECK(std::is_sorted(curve.begin(), curve.end(),
                       [](const AppleSample& a, const AppleSample& b) {
                         return a.omega1 < b.omega1;
                       }));
  // zero-strength end: turning shrinks toward the Mach angle
  CHECK(std::abs(curve.front().turning_angle) < 1e-2);
  CHECK(curve.front().turning_angle < curve[10].turning_angle);
  // normal-shock end: symmetric, no turning
  CHECK(std::abs(curve.back().turning_angle) < 1e-9);
  // interior maximum confirmed by dense resampling around the coarse peak
  auto peak = std::max_element(curve.begin(), curve.end(),
                               [](const AppleSample& a, const AppleSample& b) {
                                 return a.turning_angle < b.turning_angle;
                               });
  CHECK(peak != curve.begin());
  CHECK(peak != curve.end() - 1);
  auto dense = emit_apple_curve(2.0, 0.01, 4000);
  auto dpeak = std::max_element(dense.begin(), dense.end(),
                                [](const AppleSample& a, const AppleSample& b) {
                                  return a.turning_angle < b.turning_angle;
                                });
  CHECK(std::abs(dpeak->omega1 - peak->omega1) < 2.0 * (M_PI / 2) / 400);
  CHECK(dpeak->turning_angle >= peak->turning_angle - 1e-12);
}

TEST_CASE("bisect rejects a bracket without sign change") {
  auto f = [](double x) { return 1.0 + x * x; };
  CHECK_THROWS_AS(bisect(f, 0.0, 1.0, 1e-12), RootNotFoundError);
}
