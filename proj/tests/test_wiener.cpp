#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spde/wiener.hpp"

using namespace spde;

TEST_CASE("sampled path pins omega(0) to zero on the grid") {
  const WienerPath p = WienerPath::sample(42, -10.0, 10.0, 0.01);
  CHECK(p.samples().size() == 2001);
  CHECK(p.value_at_node(0) == 0.0);
  CHECK(p.samples()[1000] == 0.0);
}

TEST_CASE("unit-time variance matches the Brownian law over many seeds") {
  const int n = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < n; ++s) {
    const WienerPath p =
        WienerPath::sample(static_cast<std::uint64_t>(s), -0.01, 1.0, 0.01);
    const double w1 = p.value(1.0);
    sum += w1;
    sumsq += w1 * w1;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("regeneration is bit-identical") {
  const WienerPath a = WienerPath::sample(42, -10.0, 10.0, 0.01);
  const WienerPath b = WienerPath::sample(42, -10.0, 10.0, 0.01);
  REQUIRE(a.samples().size() == b.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    CHECK(a.samples()[i] == b.samples()[i]);
}

TEST_CASE("extending t_max leaves negative-time samples untouched") {
  const WienerPath a = WienerPath::sample(9, -2.0, 1.0, 0.01);
  const WienerPath b = WienerPath::sample(9, -2.0, 5.0, 0.01);
  for (std::int64_t k = a.node_min(); k <= 0; ++k)
    CHECK(a.value_at_node(k) == b.value_at_node(k));
}

TEST_CASE("sampling rejects bad arguments") {
  CHECK_THROWS_AS(WienerPath::sample(1, -1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WienerPath::sample(1, -1.0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(WienerPath::sample(1, 0.0, 1.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(WienerPath::sample(1, -1.005, 1.0, 0.01),
                  std::invalid_argument);
}

TEST_CASE("shift by zero is the identity and every shift vanishes at zero") {
  const WienerPath p = WienerPath::sample(3, -5.0, 5.0, 0.01);
  const PathView v = shift(p, 0.0);
  for (double t : {-4.0, -1.0, 0.0, 2.5, 4.99})
    CHECK(v.value(t) == doctest::Approx(p.value(t)).epsilon(1e-15));
  for (double s : {-3.0, -0.5, 0.0, 1.0, 4.0})
    CHECK(shift(p, s).value(0.0) == 0.0);
}

TEST_CASE("shift composition folds exactly on the common domain") {
  const WienerPath p = WienerPath::sample(17, -5.0, 5.0, 0.01);
  const PathView once = shift(shift(PathView(p), 1.0), -1.0);
  for (double t : {-3.0, -0.25, 0.0, 1.5, 3.0})
    CHECK(once.value(t) == p.value(t));

  const PathView a = shift(shift(PathView(p), 0.75), 1.25);
  const PathView b = shift(PathView(p), 2.0);
  for (double t : {-3.0, 0.0, 1.0, 2.75}) CHECK(a.value(t) == b.value(t));
}

TEST_CASE("evaluation outside the view domain is an error") {
  const WienerPath p = WienerPath::sample(3, -1.0, 1.0, 0.01);
  CHECK_THROWS_AS(p.value(1.5), std::out_of_range);
  const PathView v = shift(p, 0.5);
  CHECK_THROWS_AS(v.value(0.75), std::out_of_range);
  CHECK_THROWS_AS(shift(p, 0.005), std::invalid_argument);  // not grid aligned
}

TEST_CASE("conjugation factor: closed-form values") {
  const WienerPath z = WienerPath::zero(-1.0, 1.0, 0.01);
  CHECK(conj_factor(z, 0.5, 1.0) == 1.0);
  CHECK(conj_factor(z, -0.25, 3.7) == 1.0);

  // omega(2) = 0.5 via an imported piecewise-linear ramp.
  std::vector<double> vals;
  for (int k = -100; k <= 200; ++k) vals.push_back(0.25 * (k / 100.0));
  const WienerPath ramp = WienerPath::from_samples(-1.0, 0.01, std::move(vals));
  CHECK(conj_factor(ramp, 2.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("conjugation factor is multiplicative under the shift group") {
  const WienerPath p = WienerPath::sample(11, -8.0, 8.0, 0.01);
  const double alpha = 0.8;
  for (double t : {-2.0, 0.5, 3.0}) {
    const PathView moved = shift(p, t);
    for (double s : {-1.0, 0.25, 2.0}) {
      const double lhs = conj_factor(moved, s, alpha);
      const double rhs =
          conj_factor(p, s + t, alpha) / conj_factor(p, t, alpha);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("refinement preserves coarse nodes bit-exactly") {
  const WienerPath p = WienerPath::sample(5, -1.0, 1.0, 0.1);
  const WienerPath fine = p.refined(4);
  CHECK(fine.dt() == doctest::Approx(0.025));
  for (std::int64_t k = p.node_min(); k <= p.node_max(); ++k)
    CHECK(fine.value_at_node(4 * k) == p.value_at_node(k));
  CHECK_THROWS_AS(p.refined(1), std::invalid_argument);
}

TEST_CASE("bridge midpoints carry the conditional variance dt/4") {
  const double dt = 0.1;
  double sum = 0.0, sumsq = 0.0;
  int count = 0;
  for (int s = 0; s < 2000; ++s) {
    const WienerPath p =
        WienerPath::sample(static_cast<std::uint64_t>(s), -0.5, 0.5, dt);
    const WienerPath f = p.refined(2);
    for (std::int64_t k = p.node_min(); k < p.node_max(); ++k) {
      const double dev = f.value_at_node(2 * k + 1) -
                         0.5 * (p.value_at_node(k) + p.value_at_node(k + 1));
      sum += dev;
      sumsq += dev * dev;
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sumsq / count - mean * mean;
  CHECK(var == doctest::Approx(dt / 4.0).epsilon(0.05));
}

TEST_CASE("the zero path refines to a finer zero path") {
  const WienerPath z = WienerPath::zero(-1.0, 1.0, 0.1).refined(8);
  for (std::int64_t k = z.node_min(); k <= z.node_max(); ++k)
    CHECK(z.value_at_node(k) == 0.0);
}

TEST_CASE("sublinearity diagnostic") {
  const WienerPath z = WienerPath::zero(-10.0, 10.0, 0.1);
  CHECK(sublinearity_report(z).max_abs_ratio == 0.0);

  const WienerPath p = WienerPath::sample(42, -1000.0, 1000.0, 0.1);
  CHECK(sublinearity_report(p).max_abs_ratio < 1.0);

  // Law-of-iterated-logarithm trend: the reported ratio shrinks (in median)
  // when the horizon grows tenfold.
  auto median_ratio = [](double horizon) {
    std::vector<double> r;
    for (int s = 100; s < 200; ++s) {
      const WienerPath p = WienerPath::sample(static_cast<std::uint64_t>(s),
                                              -horizon, horizon, 0.1);
      r.push_back(sublinearity_report(p).max_abs_ratio);
    }
    std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
    return r[r.size() / 2];
  };
  CHECK(median_ratio(100.0) < median_ratio(10.0));
}
