#include "cvfix/quadrature.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "cvfix/grid_function.hpp"

using cvfix::GridFunction;
using cvfix::QuadratureRule;

TEST_CASE("weights integrate constants exactly") {
  for (auto rule : {QuadratureRule::Trapezoid, QuadratureRule::Simpson}) {
    const Eigen::VectorXd w = cvfix::quadrature_weights(rule, 9, 0.125);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("invalid node counts are rejected") {
  CHECK_THROWS_AS(cvfix::quadrature_weights(QuadratureRule::Simpson, 8, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cvfix::quadrature_weights(QuadratureRule::Simpson, 1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cvfix::quadrature_weights(QuadratureRule::Trapezoid, 1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cvfix::quadrature_weights(QuadratureRule::Trapezoid, 2, 0.0),
                  std::invalid_argument);
}

TEST_CASE("simpson integrates cubics exactly") {
  const double got =
      cvfix::integrate(QuadratureRule::Simpson, 0.0, 1.0, 5, [](double s) { return s * s * s; });
  CHECK(got == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("convergence order against a closed-form integral") {
  // integral of sin(0.4 + s) over [0, 1] = cos(0.4) - cos(1.4).
  const double exact = std::cos(0.4) - std::cos(1.4);
  auto f = [](double s) { return std::sin(0.4 + s); };
  auto err = [&](QuadratureRule rule, Eigen::Index nodes) {
    return std::abs(cvfix::integrate(rule, 0.0, 1.0, nodes, f) - exact);
  };

  // Halving the step (nodes m -> 2m-1) should shrink the error by the rule's
  // order: ~4x for trapezoid, ~16x for simpson.
  const double t1 = err(QuadratureRule::Trapezoid, 9) / err(QuadratureRule::Trapezoid, 17);
  const double t2 = err(QuadratureRule::Trapezoid, 17) / err(QuadratureRule::Trapezoid, 33);
  CHECK(t1 > 3.4);
  CHECK(t1 < 4.6);
  CHECK(t2 > 3.4);
  CHECK(t2 < 4.6);

  const double s1 = err(QuadratureRule::Simpson, 9) / err(QuadratureRule::Simpson, 17);
  const double s2 = err(QuadratureRule::Simpson, 17) / err(QuadratureRule::Simpson, 33);
  CHECK(s1 > 13.0);
  CHECK(s1 < 19.0);
  CHECK(s2 > 13.0);
  CHECK(s2 < 19.0);
}

TEST_CASE("grid function basics") {
  const GridFunction ramp = GridFunction::linear_ramp(0.0, 1.0, 11, 2, 3.0);
  CHECK(ramp.node_count() == 11);
  CHECK(ramp.component_count() == 2);
  CHECK(ramp.step() == doctest::Approx(0.1));
  CHECK(ramp.values(10, 0) == doctest::Approx(3.0));
  CHECK(cvfix::sup_norm(ramp) == doctest::Approx(3.0));

  const GridFunction zero = GridFunction::zeros(0.0, 1.0, 11, 2);
  CHECK(cvfix::sup_distance(ramp, zero) == doctest::Approx(3.0));

  const GridFunction other = GridFunction::zeros(0.0, 2.0, 11, 2);
  CHECK_THROWS_AS(cvfix::sup_distance(ramp, other), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction::zeros(1.0, 0.0, 5, 1).validate(), std::invalid_argument);
}

TEST_CASE("grid csv round trip is exact") {
  const GridFunction g = GridFunction::sample(0.0, 2.0, 9, 2, [](double t) {
    Eigen::VectorXd v(2);
    v << std::sin(t) * 1e-7, std::exp(t);
    return v;
  });
  std::stringstream buf;
  cvfix::write_grid_csv(g, buf);
  const GridFunction back = cvfix::read_grid_csv(buf);
  REQUIRE(back.node_count() == g.node_count());
  REQUIRE(back.component_count() == g.component_count());
  CHECK(back.lower == g.lower);
  CHECK(back.upper == g.upper);
  CHECK((back.values - g.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid csv rejects malformed input") {
  std::stringstream ragged("t,x1\n0,1\n0.5,2,3\n");
  CHECK_THROWS_AS(cvfix::read_grid_csv(ragged), std::invalid_argument);
  std::stringstream nonuniform("t,x1\n0,1\n0.4,2\n1.0,3\n");
  CHECK_THROWS_AS(cvfix::read_grid_csv(nonuniform), std::invalid_argument);
}
