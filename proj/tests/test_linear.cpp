#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spde/chafee.hpp"
#include "spde/linear.hpp"

using namespace spde;

namespace {

// Problem with damping beta, reaction identically zero, chosen forcing h.
ProblemSpec forced_problem(double beta, double delta,
                           std::function<double(double, double)> h,
                           double h_sup, bool h_const, int n_modes = 64,
                           double dt = 1e-3, double alpha = 1.0) {
  ProblemSpec p;
  p.alpha = alpha;
  p.n_modes = n_modes;
  p.dt = dt;
  Nonlinearity nl;
  nl.eval = [](double, double, double) { return 0.0; };
  nl.lipschitz = [](double, double, double, double) { return 0.0; };
  nl.beta = beta;
  nl.h = std::move(h);
  nl.h_sup = h_sup;
  nl.h_time_constant = h_const;
  nl.is_zero = true;
  p.nl = nl;
  p.forcing = zero_forcing(delta);
  return p;
}

XiValue xi_at(double tau, const PathView& path, const ProblemSpec& spec,
              double tol = 1e-6) {
  XiRequest req{path};
  req.tau = tau;
  req.spec = &spec;
  req.S = required_truncation(spec, tol);
  req.tolerance = tol;
  return xi(req);
}

}  // namespace

TEST_CASE("zero forcing gives the zero quasi-solution with zero tail") {
  const ProblemSpec spec = forced_problem(
      0.5, 0.25, [](double, double) { return 0.0; }, 0.0, true);
  const WienerPath p = WienerPath::sample(3, -40.0, 1.0, spec.dt);
  XiRequest req{PathView(p)};
  req.tau = 0.0;
  req.spec = &spec;
  req.S = 10.0;
  const XiValue v = xi(req);
  CHECK(sup_norm(v.field) == 0.0);
  CHECK(v.tail_bound == 0.0);
}

TEST_CASE("steady forcing sin x at beta = 1/2 accumulates to 2 sin x") {
  const ProblemSpec spec = forced_problem(
      0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true, 64,
      1e-3, 0.0);
  const WienerPath z = WienerPath::zero(-45.0, 2.0, spec.dt);
  const XiValue v = xi_at(0.0, PathView(z), spec);
  CHECK(v.field.coeff(1) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(sup_norm(v.field) == doctest::Approx(2.0).epsilon(1e-4));

  // Independent route: long-time integration of the damped linear problem
  // from rest reaches the same profile.
  const ProblemSpec lp = linear_problem(spec);
  PathwiseSolver solver(lp, PathView(z));
  const Field settled = solver.integrate(Field(spec.n_modes), -40.0, 0.0);
  CHECK(sup_norm(sub(settled, v.field)) < 1e-4);
}

TEST_CASE("periodic forcing gives a periodic quasi-solution") {
  const double T = 1.0;
  auto h = [T](double t, double x) {
    return (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t / T)) * std::sin(x);
  };
  const ProblemSpec spec = forced_problem(0.5, 0.25, h, 1.5, false);
  const WienerPath p = WienerPath::sample(11, -90.0, 3.0, spec.dt);
  const XiValue a = xi_at(0.25, PathView(p), spec);
  const XiValue b = xi_at(0.25 + T, PathView(p), spec);
  CHECK(sup_norm(sub(a.field, b.field)) < 1e-9);
}

TEST_CASE("quasi-solution property: evolve and re-anchor") {
  SUBCASE("zero forcing: residual vanishes") {
    const ProblemSpec spec = forced_problem(
        0.5, 0.25, [](double, double) { return 0.0; }, 0.0, true);
    const WienerPath p = WienerPath::sample(5, -20.0, 3.0, spec.dt);
    XiRequest req{PathView(p)};
    req.tau = 0.0;
    req.spec = &spec;
    req.S = 10.0;
    CHECK(verify_quasi_solution(xi(req), 2.0, PathView(p), spec) == 0.0);
  }
  SUBCASE("steady deterministic case: both sides equal 2 sin x") {
    const ProblemSpec spec = forced_problem(
        0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true,
        64, 1e-3, 0.0);
    const WienerPath z = WienerPath::zero(-45.0, 3.0, spec.dt);
    const XiValue v = xi_at(0.0, PathView(z), spec);
    CHECK(verify_quasi_solution(v, 1.0, PathView(z), spec) < 1e-4);
  }
  SUBCASE("random path regression") {
    const ProblemSpec spec = forced_problem(
        0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true);
    const WienerPath p = WienerPath::sample(7, -90.0, 4.0, spec.dt);
    const XiValue v = xi_at(0.0, PathView(p), spec);
    CHECK(verify_quasi_solution(v, 2.0, PathView(p), spec) < 1e-3);
  }
}

TEST_CASE("pullback attraction at the declared exponential rate") {
  SUBCASE("beta = 1/2") {
    const ProblemSpec spec = forced_problem(
        0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true,
        64, 1e-3, 0.0);
    const WienerPath z = WienerPath::zero(-80.0, 2.0, spec.dt);
    const double ladder[] = {2.5, 5.0, 10.0, 20.0};
    const auto fit = verify_decay(single_mode(spec.n_modes, 1, 3.0), 0.0,
                                  ladder, PathView(z), spec,
                                  required_truncation(spec, 1e-6));
    CHECK(fit.fitted_rate == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("beta = 0.9 (slow rate)") {
    const ProblemSpec spec = forced_problem(
        0.9, 0.05, [](double, double x) { return std::sin(x); }, 1.0, true,
        64, 1e-3, 0.0);
    const WienerPath z = WienerPath::zero(-200.0, 2.0, spec.dt);
    const double ladder[] = {2.5, 5.0, 10.0, 20.0};
    const auto fit = verify_decay(single_mode(spec.n_modes, 1, 3.0), 0.0,
                                  ladder, PathView(z), spec,
                                  required_truncation(spec, 1e-5), 1e-5);
    CHECK(fit.fitted_rate == doctest::Approx(0.1).epsilon(0.1));
  }
  SUBCASE("starting on the quasi-solution leaves no error to decay") {
    const ProblemSpec spec = forced_problem(
        0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true);
    const WienerPath p = WienerPath::sample(9, -100.0, 2.0, spec.dt);
    const ProblemSpec lp = linear_problem(spec);
    for (double t : {2.0, 6.0}) {
      const XiValue seed_value = xi_at(-t, PathView(p).translated(-t), spec);
      PathwiseSolver solver(lp, PathView(p));
      const Field end = solver.integrate(seed_value.field, -t, 0.0);
      const XiValue target = xi_at(0.0, PathView(p), spec);
      CHECK(sup_norm(sub(end, target.field)) < 1e-4);
    }
  }
}

TEST_CASE("quasi-solution values are nonnegative fields") {
  const ChafeeSpec cs = ChafeeSpec::constant_gamma(1.5, 1.0, 1.0);
  const ProblemSpec spec = make_problem(cs, 64, 1e-3);
  const WienerPath p = WienerPath::sample(13, -90.0, 1.0, spec.dt);
  const XiValue v = xi_at(0.0, PathView(p), spec);
  CHECK(v.min_value >= -1e-10);
  CHECK(sup_norm(v.field) > 0.0);
}

TEST_CASE("linearity in the forcing amplitude") {
  auto h1 = [](double, double x) { return 0.4 + 0.1 * std::sin(x); };
  const ProblemSpec one = forced_problem(0.5, 0.25, h1, 0.5, true);
  ProblemSpec three = one;
  three.nl.h = [h1](double t, double x) { return 3.0 * h1(t, x); };
  three.nl.h_sup = 1.5;
  const WienerPath p = WienerPath::sample(17, -95.0, 1.0, one.dt);
  const double S = required_truncation(three, 1e-6);
  XiRequest ra{PathView(p)};
  ra.tau = 0.0;
  ra.spec = &one;
  ra.S = S;
  XiRequest rb{PathView(p)};
  rb.tau = 0.0;
  rb.spec = &three;
  rb.S = S;
  const XiValue a = xi(ra);
  const XiValue b = xi(rb);
  const double scale_ref = std::max(1.0, 3.0 * sup_norm(a.field));
  for (int n = 1; n <= one.n_modes; ++n) {
    const double want = 3.0 * a.field.coeff(n);
    CHECK(std::abs(b.field.coeff(n) - want) <= 1e-12 * scale_ref);
  }
}

TEST_CASE("anchor-shift consistency: shifting the forcing clock") {
  const double tau = 1.5;
  auto h = [](double t, double x) {
    return (1.2 + std::sin(0.7 * t)) * (0.5 + 0.25 * std::sin(x));
  };
  const ProblemSpec direct = forced_problem(0.5, 0.25, h, 2.0, false);
  ProblemSpec shifted = direct;
  shifted.nl.h = [h, tau](double t, double x) { return h(t + tau, x); };
  const WienerPath p = WienerPath::sample(19, -100.0, 3.0, direct.dt);
  const XiValue a = xi_at(tau, PathView(p), direct);
  const XiValue b = xi_at(0.0, PathView(p), shifted);
  CHECK(sup_norm(sub(a.field, b.field)) < 1e-10);
}

TEST_CASE("temperedness probe along plain translations") {
  const ChafeeSpec cs = ChafeeSpec::constant_gamma(1.5, 1.0, 1.0);
  const ProblemSpec spec = make_problem(cs, 64, 1e-3);
  const WienerPath p = WienerPath::sample(23, -130.0, 1.0, spec.dt);
  for (double c : {0.1, 1.0, 10.0}) {
    std::vector<double> weighted;
    for (double r : {-10.0, -20.0, -40.0}) {
      const XiValue v = xi_at(r, PathView(p).translated(r), spec);
      weighted.push_back(std::exp(c * r) * sup_norm(v.field));
    }
    // c >= 1 crushes path fluctuations rung by rung; the weakest weight is
    // a finite-sample trend statement only.
    if (c >= 1.0) {
      CHECK(weighted[1] < weighted[0]);
      CHECK(weighted[2] < weighted[1]);
    } else {
      CHECK(weighted[2] < weighted[0]);
    }
  }
}

TEST_CASE("insufficient truncation horizon raises a sized error") {
  const ProblemSpec spec = forced_problem(
      0.5, 0.25, [](double, double x) { return std::sin(x); }, 1.0, true);
  const WienerPath z = WienerPath::zero(-45.0, 1.0, spec.dt);
  XiRequest req{PathView(z)};
  req.tau = 0.0;
  req.spec = &spec;
  req.S = 3.0;  // far too small for tol 1e-6
  req.tolerance = 1e-6;
  CHECK_THROWS_AS(xi(req), TruncationError);
  try {
    xi(req);
  } catch (const TruncationError& e) {
    CHECK(e.required_S() > 3.0);
    CHECK(e.tail_bound() > 1e-6);
  }
}
