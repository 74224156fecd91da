#include "cvfix/coefficients.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "cvfix/complex_scalar.hpp"

using cvfix::CoefficientTriple;
using cvfix::ComplexScalar;
using cvfix::TripleKind;

namespace {

std::vector<std::pair<ComplexScalar, ComplexScalar>> nonneg_pairs(std::mt19937_64& rng,
                                                                  int count) {
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  std::vector<std::pair<ComplexScalar, ComplexScalar>> out;
  for (int i = 0; i < count; ++i) {
    out.emplace_back(ComplexScalar(dist(rng), dist(rng)), ComplexScalar(dist(rng), dist(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("sum-form gamma on constant triples") {
  const ComplexScalar p(1.0, 2.0), q(0.5, 0.5);
  const auto g1 = cvfix::gamma_sum_form(CoefficientTriple::constants(0.2, 0.1, 0.1, TripleKind::SumForm));
  CHECK(g1(p, q) == doctest::Approx(0.5).epsilon(1e-15));
  const auto g0 = cvfix::gamma_sum_form(CoefficientTriple::constants(0.0, 0.0, 0.0, TripleKind::SumForm));
  CHECK(g0(p, q) == 0.0);
}

TEST_CASE("sum-form gamma with a decaying first coefficient") {
  // lambda1 = 0.3 / (1 + |x| + |y|), lambda2 = lambda3 = 0.1:
  // at the origin gamma = (0.3 + 0.2) / (1 - 0.2) = 0.625.
  CoefficientTriple triple(
      [](const ComplexScalar& x, const ComplexScalar& y) {
        return 0.3 / (1.0 + x.modulus() + y.modulus());
      },
      [](const ComplexScalar&, const ComplexScalar&) { return 0.1; },
      [](const ComplexScalar&, const ComplexScalar&) { return 0.1; }, TripleKind::SumForm);
  const auto gamma = cvfix::gamma_sum_form(triple);
  CHECK(gamma(ComplexScalar(), ComplexScalar()) == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("rational-form gamma on constant triples") {
  const ComplexScalar p(3.0, 0.0), q(0.0, 4.0);
  using K = TripleKind;
  CHECK(cvfix::gamma_rational_form(CoefficientTriple::constants(0.2, 0.1, 0.1, K::RationalForm))(p, q) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(cvfix::gamma_rational_form(CoefficientTriple::constants(0.5, 0.0, 0.0, K::RationalForm))(p, q) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cvfix::gamma_rational_form(CoefficientTriple::constants(0.4, 0.3, 0.2, K::RationalForm))(p, q) ==
        doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("gamma factories reject mismatched kinds") {
  const auto sum = CoefficientTriple::constants(0.2, 0.1, 0.1, TripleKind::SumForm);
  const auto rat = CoefficientTriple::constants(0.2, 0.1, 0.1, TripleKind::RationalForm);
  CHECK_THROWS_AS(cvfix::gamma_rational_form(sum), std::invalid_argument);
  CHECK_THROWS_AS(cvfix::gamma_sum_form(rat), std::invalid_argument);
  CHECK(cvfix::derive_gamma(sum).kind() == TripleKind::SumForm);
  CHECK(cvfix::derive_gamma(rat).kind() == TripleKind::RationalForm);
}

TEST_CASE("gamma reports a nonpositive denominator with the point") {
  const auto bad = CoefficientTriple::constants(0.1, 0.6, 0.5, TripleKind::SumForm);
  const auto gamma = cvfix::gamma_sum_form(bad);
  CHECK_THROWS_AS(gamma(ComplexScalar(1, 1), ComplexScalar(2, 2)), std::domain_error);
}

TEST_CASE("coefficient evaluations are range-checked") {
  CoefficientTriple outlaw(
      [](const ComplexScalar&, const ComplexScalar&) { return 1.2; },
      [](const ComplexScalar&, const ComplexScalar&) { return 0.0; },
      [](const ComplexScalar&, const ComplexScalar&) { return 0.0; }, TripleKind::SumForm);
  CHECK_THROWS_AS(outlaw.lambda1(ComplexScalar(), ComplexScalar()), std::domain_error);
  CHECK_THROWS_AS(CoefficientTriple::constants(1.0, 0.0, 0.0, TripleKind::SumForm),
                  std::invalid_argument);
}

TEST_CASE("hypothesis bound margins") {
  std::mt19937_64 rng(5);
  const auto sample = nonneg_pairs(rng, 25);

  SUBCASE("sum form passing") {
    const auto report = cvfix::check_hypothesis_bound(
        CoefficientTriple::constants(0.2, 0.1, 0.1, TripleKind::SumForm), sample);
    CHECK(report.passed);
    CHECK(report.min_margin == doctest::Approx(0.4).epsilon(1e-12));
    for (const auto& e : report.entries) {
      CHECK(e.margin == doctest::Approx(1.0 - (0.2 + 2 * 0.1 + 2 * 0.1)).epsilon(1e-12));
    }
  }
  SUBCASE("sum form failing with margin -0.1") {
    const auto report = cvfix::check_hypothesis_bound(
        CoefficientTriple::constants(0.5, 0.2, 0.1, TripleKind::SumForm), sample);
    CHECK_FALSE(report.passed);
    CHECK(report.min_margin == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(report.violations.size() == sample.size());
  }
  SUBCASE("rational form passing with margin 0.1") {
    const auto report = cvfix::check_hypothesis_bound(
        CoefficientTriple::constants(0.4, 0.3, 0.2, TripleKind::RationalForm), sample);
    CHECK(report.passed);
    CHECK(report.min_margin == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("points outside the nonnegative quadrant are rejected") {
    auto bad = sample;
    bad.emplace_back(ComplexScalar(-1.0, 0.0), ComplexScalar(0.0, 0.0));
    CHECK_THROWS_AS(cvfix::check_hypothesis_bound(
                        CoefficientTriple::constants(0.2, 0.1, 0.1, TripleKind::SumForm), bad),
                    std::invalid_argument);
  }
}

TEST_CASE("bound margin matches an independent recomputation") {
  std::mt19937_64 rng(17);
  const auto sample = nonneg_pairs(rng, 40);
  const auto triple = CoefficientTriple::modulus_decaying(0.4, 0.2, 0.1, TripleKind::SumForm);
  const auto report = cvfix::check_hypothesis_bound(triple, sample);
  REQUIRE(report.entries.size() == sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& [x, y] = sample[i];
    const double expected =
        triple.lambda1(x, y) + 2.0 * triple.lambda2(x, y) + 2.0 * triple.lambda3(x, y);
    CHECK(report.entries[i].weighted_sum == expected);  // bitwise: same pure evaluation
    CHECK(report.entries[i].margin == 1.0 - expected);
  }
}

TEST_CASE("gamma evaluation is deterministic") {
  const auto gamma = cvfix::gamma_sum_form(
      CoefficientTriple::modulus_decaying(0.3, 0.2, 0.1, TripleKind::SumForm));
  const ComplexScalar x(0.7, 1.3), y(2.0, 0.1);
  CHECK(gamma(x, y) == gamma(x, y));
}

TEST_CASE("sum-form gamma stays below one when the bound holds") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    // Random constants satisfying l1 + 2*l2 + 2*l3 < 1.
    double l1 = dist(rng), l2 = dist(rng), l3 = dist(rng);
    const double scale = (l1 + 2 * l2 + 2 * l3) / (0.999 * dist(rng) + 1e-6);
    if (scale > 1.0) {
      l1 /= scale;
      l2 /= scale;
      l3 /= scale;
    }
    if (l1 + 2 * l2 + 2 * l3 >= 1.0) continue;
    const auto gamma = cvfix::gamma_sum_form(
        CoefficientTriple::constants(l1, l2, l3, TripleKind::SumForm));
    const double g = gamma(ComplexScalar(dist(rng), dist(rng)),
                           ComplexScalar(dist(rng), dist(rng)));
    CHECK(g >= 0.0);
    CHECK(g < 1.0);
  }
}

TEST_CASE("gamma class falsifier") {
  SUBCASE("constant gamma is never flagged") {
    const auto gamma = cvfix::gamma_sum_form(
        CoefficientTriple::constants(0.25, 0.1, 0.1, TripleKind::SumForm));
    std::vector<std::vector<std::pair<ComplexScalar, ComplexScalar>>> trials(1);
    for (int n = 1; n <= 64; ++n) {
      trials[0].emplace_back(ComplexScalar(n, 0.0), ComplexScalar(0.0, 0.0));
    }
    const auto report = cvfix::falsify_gamma_class(gamma, trials);
    CHECK_FALSE(report.counterexample_found);
  }

  SUBCASE("gamma approaching one along growing arguments is flagged") {
    // gamma(x, y) = |x| / (1 + |x|) via a rational triple with l2 = l3 = 0.
    CoefficientTriple triple(
        [](const ComplexScalar& x, const ComplexScalar&) {
          return x.modulus() / (1.0 + x.modulus());
        },
        [](const ComplexScalar&, const ComplexScalar&) { return 0.0; },
        [](const ComplexScalar&, const ComplexScalar&) { return 0.0; },
        TripleKind::RationalForm);
    const auto gamma = cvfix::gamma_rational_form(triple);
    std::vector<std::vector<std::pair<ComplexScalar, ComplexScalar>>> trials(1);
    for (int n = 1; n <= 4096; ++n) {
      trials[0].emplace_back(ComplexScalar(n, 0.0), ComplexScalar(0.0, 0.0));
    }
    const auto report = cvfix::falsify_gamma_class(gamma, trials);
    CHECK(report.counterexample_found);
    CHECK(report.sequence_index == 0);
    // Independent tabulation of the tail the falsifier inspected.
    for (std::size_t n = report.tail_start; n < trials[0].size(); ++n) {
      const double g = gamma(trials[0][n].first, trials[0][n].second);
      CHECK(g > 1.0 - 1e-3);
      CHECK(trials[0][n].first.modulus() + trials[0][n].second.modulus() > 1e-3);
    }
  }

  SUBCASE("gamma approaching one only toward the origin is not flagged") {
    // gamma(x, y) = 1 - min(1, |x| + |y|): rises to 1 exactly in the allowed
    // direction (arguments shrinking to 0).
    CoefficientTriple triple(
        [](const ComplexScalar& x, const ComplexScalar& y) {
          return 1.0 - std::min(1.0, x.modulus() + y.modulus());
        },
        [](const ComplexScalar&, const ComplexScalar&) { return 0.0; },
        [](const ComplexScalar&, const ComplexScalar&) { return 0.0; },
        TripleKind::RationalForm);
    const auto gamma = cvfix::gamma_rational_form(triple);
    std::vector<std::vector<std::pair<ComplexScalar, ComplexScalar>>> trials(1);
    for (int n = 1; n <= 512; ++n) {
      trials[0].emplace_back(ComplexScalar(1.0 / n, 0.0), ComplexScalar(0.0, 1.0 / (2.0 * n)));
    }
    const auto report = cvfix::falsify_gamma_class(gamma, trials);
    CHECK_FALSE(report.counterexample_found);
  }

  SUBCASE("short sequences are rejected") {
    const auto gamma = cvfix::gamma_sum_form(
        CoefficientTriple::constants(0.25, 0.1, 0.1, TripleKind::SumForm));
    std::vector<std::vector<std::pair<ComplexScalar, ComplexScalar>>> trials(1);
    for (int n = 0; n < 10; ++n) trials[0].emplace_back(ComplexScalar(), ComplexScalar());
    CHECK_THROWS_AS(cvfix::falsify_gamma_class(gamma, trials), std::invalid_argument);
  }
}
