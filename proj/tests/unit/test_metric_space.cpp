#include "cvfix/metric_space.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "cvfix/complex_scalar.hpp"

using cvfix::AxiomReport;
using cvfix::ComplexScalar;
using cvfix::MetricSpace;
using cvfix::SequenceMonitor;

namespace {

MetricSpace<ComplexScalar> modulus_space() {
  return {[](const ComplexScalar& x, const ComplexScalar& y) {
            return ComplexScalar((x - y).modulus(), 0.0);
          },
          [](const ComplexScalar& x, const ComplexScalar& y) { return x == y; }};
}

}  // namespace

TEST_CASE("modulus metric passes all axioms on {0, 1, i}") {
  const std::vector<ComplexScalar> sample = {ComplexScalar(0, 0), ComplexScalar(1, 0),
                                             ComplexScalar(0, 1)};
  const AxiomReport report = cvfix::verify_axioms(modulus_space(), sample, 0.0);
  CHECK(report.passed);
  CHECK(report.sample_size_used == 3);
}

TEST_CASE("signed difference fails nonnegativity on {0, 1}") {
  const MetricSpace<double> signed_space{
      [](const double& x, const double& y) { return ComplexScalar(x - y, 0.0); },
      [](const double& x, const double& y) { return x == y; }};
  const AxiomReport report = cvfix::verify_axioms(signed_space, std::vector<double>{0.0, 1.0});
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.nonnegativity_violations.empty());
}

TEST_CASE("squared difference fails the triangle inequality") {
  const MetricSpace<double> sq_space{
      [](const double& x, const double& y) {
        return ComplexScalar((x - y) * (x - y), 0.0);
      },
      [](const double& x, const double& y) { return x == y; }};
  const AxiomReport report =
      cvfix::verify_axioms(sq_space, std::vector<double>{0.0, 1.0, 2.0}, 0.0);
  CHECK_FALSE(report.passed);
  // d(0,2) = 4 > d(0,1) + d(1,2) = 2.
  REQUIRE_FALSE(report.triangle_violations.empty());
  bool found = false;
  for (const auto& w : report.triangle_violations) {
    if (w.i == 0 && w.j == 2 && w.k == 1) {
      found = true;
      CHECK(w.direct.re() == doctest::Approx(4.0));
      CHECK(w.via.re() == doctest::Approx(2.0));
    }
  }
  CHECK(found);
}

TEST_CASE("asymmetric distance is caught") {
  const MetricSpace<double> asym{
      [](const double& x, const double& y) {
        return ComplexScalar(x < y ? y - x : 2.0 * (x - y), 0.0);
      },
      [](const double& x, const double& y) { return x == y; }};
  const AxiomReport report = cvfix::verify_axioms(asym, std::vector<double>{0.0, 1.0});
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.symmetry_violations.empty());
}

TEST_CASE("degenerate identity is caught") {
  const MetricSpace<double> degenerate{
      [](const double&, const double&) { return ComplexScalar(); },
      [](const double& x, const double& y) { return x == y; }};
  const AxiomReport report = cvfix::verify_axioms(degenerate, std::vector<double>{0.0, 1.0});
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.identity_violations.empty());
}

TEST_CASE("axiom sample is capped and empty samples are rejected") {
  std::vector<double> big(300);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  const MetricSpace<double> space{
      [](const double& x, const double& y) { return ComplexScalar(std::abs(x - y), 0.0); },
      [](const double& x, const double& y) { return x == y; }};
  const AxiomReport report = cvfix::verify_axioms(space, big);
  CHECK(report.sample_size_used == cvfix::kAxiomSampleCap);
  CHECK(report.passed);
  CHECK_THROWS_AS(cvfix::verify_axioms(space, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("norm-induced metrics pass axioms on random samples") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int round = 0; round < 20; ++round) {
    std::vector<ComplexScalar> sample;
    for (int i = 0; i < 12; ++i) sample.emplace_back(dist(rng), dist(rng));
    CHECK(cvfix::verify_axioms(modulus_space(), sample, 1e-12).passed);
  }
}

TEST_CASE("sequence monitor tracks step magnitudes") {
  const auto space = cvfix::make_modulus_space();
  SequenceMonitor<double> monitor;
  monitor.push(space, 1.0);
  monitor.push(space, 0.5);
  monitor.push(space, 0.25);
  REQUIRE(monitor.points().size() == 3);
  REQUIRE(monitor.step_magnitudes().size() == 2);
  CHECK(monitor.step_magnitudes()[0] == doctest::Approx(0.5));
  CHECK(monitor.step_magnitudes()[1] == doctest::Approx(0.25));
}

TEST_CASE("converges_to on the stated examples") {
  const auto space = cvfix::make_modulus_space();

  SequenceMonitor<double> constant;
  for (int i = 0; i < 5; ++i) constant.push(space, 3.25);
  CHECK(cvfix::converges_to(constant, space, 3.25, 1e-15));

  SequenceMonitor<double> harmonic_tail;
  for (double n : {1e3, 1e4, 1e5, 1e6, 1e7}) harmonic_tail.push(space, 1.0 / n);
  CHECK(cvfix::converges_to(harmonic_tail, space, 0.0, 1e-6));
  CHECK_FALSE(cvfix::converges_to(harmonic_tail, space, 1.0, 1e-6));

  CHECK_THROWS_AS(cvfix::converges_to(constant, space, 0.0, -1.0), std::invalid_argument);
  SequenceMonitor<double> empty;
  CHECK_THROWS_AS(cvfix::converges_to(empty, space, 0.0, 1e-6), std::invalid_argument);
}

TEST_CASE("cauchy prefix surrogate on the stated examples") {
  const auto space = cvfix::make_modulus_space();
  const ComplexScalar threshold(1.0, 1.0);

  SequenceMonitor<double> constant;
  for (int i = 0; i < 6; ++i) constant.push(space, 2.0);
  CHECK(cvfix::is_c_cauchy_prefix(constant, space, threshold, 0));

  SequenceMonitor<double> alternating;
  for (int i = 0; i < 8; ++i) alternating.push(space, i % 2 == 0 ? 0.0 : 3.0);
  CHECK_FALSE(cvfix::is_c_cauchy_prefix(alternating, space, threshold, 0));

  CHECK_THROWS_AS(cvfix::is_c_cauchy_prefix(constant, space, ComplexScalar(1.0, 0.0), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cvfix::is_c_cauchy_prefix(constant, space, threshold, 5),
                  std::invalid_argument);
}

TEST_CASE("cauchy prefix agrees with brute-force pairwise recomputation") {
  const auto space = cvfix::make_modulus_space();
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int round = 0; round < 50; ++round) {
    SequenceMonitor<double> monitor;
    const int len = 5 + static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) monitor.push(space, dist(rng) / (1.0 + i));
    const ComplexScalar threshold(0.4, 0.4);
    const std::size_t burn_in = rng() % static_cast<std::size_t>(len - 1);

    bool expected = true;
    for (std::size_t i = burn_in + 1; i < monitor.points().size() && expected; ++i) {
      for (std::size_t j = burn_in + 1; j < monitor.points().size() && expected; ++j) {
        if (i == j) continue;
        const ComplexScalar d =
            space.distance(monitor.points()[i], monitor.points()[j]);
        expected = cvfix::strictly_dominates(d, threshold);
      }
    }
    CHECK(cvfix::is_c_cauchy_prefix(monitor, space, threshold, burn_in) == expected);
  }
}
