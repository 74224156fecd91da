#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cvfix/complex_scalar.hpp"

namespace cvfix {

/// A complex-valued metric over an arbitrary carrier type P, bundled with the
/// carrier's equality predicate. Equality is user-supplied because the "d = 0
/// iff x = y" axiom is untestable on floating-point carriers under exact
/// comparison; for grid functions the conventional predicate is a sup-norm
/// difference below a small epsilon.
///
/// The space is immutable after construction. The distance function must be
/// reentrant if callers verify axioms concurrently.
template <typename P>
struct MetricSpace {
  using DistanceFn = std::function<ComplexScalar(const P&, const P&)>;
  using EqualFn = std::function<bool(const P&, const P&)>;

  DistanceFn distance;
  EqualFn equal;
};

/// Exhaustive finite-sample verdicts for the three metric axioms. Every
/// violating tuple is listed by its indices into the sample that produced it.
struct AxiomReport {
  struct PairWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    ComplexScalar forward;   // distance(sample[i], sample[j])
    ComplexScalar backward;  // distance(sample[j], sample[i]); used by symmetry
  };
  struct TriangleWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    ComplexScalar direct;  // d(i, j)
    ComplexScalar via;     // d(i, k) + d(k, j)
  };

  std::vector<PairWitness> nonnegativity_violations;
  std::vector<PairWitness> identity_violations;
  std::vector<PairWitness> symmetry_violations;
  std::vector<TriangleWitness> triangle_violations;
  std::size_t sample_size_used = 0;
  double slack = 0.0;
  bool passed = false;
};

/// Exhaustive checks beyond this sample size get quadratically expensive in
/// distance evaluations and cubically in triangle lookups; larger samples are
/// truncated to the first kAxiomSampleCap points (recorded in the report).
inline constexpr std::size_t kAxiomSampleCap = 200;

/// Checks all pairs (and all triples, for the triangle inequality) of the
/// sample against the metric axioms. `slack` is an additive componentwise
/// tolerance for the identity, symmetry and triangle checks so that metrics
/// computed in floating point do not fail on rounding; set it to 0 for exact
/// carriers.
template <typename P>
AxiomReport verify_axioms(const MetricSpace<P>& space, const std::vector<P>& sample,
                          double slack = 1e-12) {
  if (sample.empty()) {
    throw std::invalid_argument("verify_axioms: sample must be nonempty");
  }
  AxiomReport report;
  report.slack = slack;
  const std::size_t n = std::min(sample.size(), kAxiomSampleCap);
  report.sample_size_used = n;

  std::vector<ComplexScalar> dist(n * n);
  auto at = [&](std::size_t i, std::size_t j) -> ComplexScalar& { return dist[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      at(i, j) = space.distance(sample[i], sample[j]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexScalar& d = at(i, j);
      if (d.re() < -slack || d.im() < -slack) {
        report.nonnegativity_violations.push_back({i, j, d, at(j, i)});
      }
      const bool same = space.equal(sample[i], sample[j]);
      const bool zero = d.modulus() <= slack;
      if (same != zero) {
        report.identity_violations.push_back({i, j, d, at(j, i)});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ComplexScalar& fwd = at(i, j);
      const ComplexScalar& bwd = at(j, i);
      if (std::abs(fwd.re() - bwd.re()) > slack || std::abs(fwd.im() - bwd.im()) > slack) {
        report.symmetry_violations.push_back({i, j, fwd, bwd});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const ComplexScalar via = at(i, k) + at(k, j);
        if (!leq_with_slack(at(i, j), via, slack)) {
          report.triangle_violations.push_back({i, j, k, at(i, j), via});
        }
      }
    }
  }

  report.passed = report.nonnegativity_violations.empty() && report.identity_violations.empty() &&
                  report.symmetry_violations.empty() && report.triangle_violations.empty();
  return report;
}

/// An append-only record of a sequence in a metric space together with the
/// magnitudes of consecutive distances. step_magnitudes() always has exactly
/// points().size() - 1 entries.
template <typename P>
class SequenceMonitor {
 public:
  void push(const MetricSpace<P>& space, P point) {
    if (!points_.empty()) {
      steps_.push_back(space.distance(points_.back(), point).modulus());
    }
    points_.push_back(std::move(point));
  }

  const std::vector<P>& points() const { return points_; }
  const std::vector<double>& step_magnitudes() const { return steps_; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<P> points_;
  std::vector<double> steps_;
};

/// Finite-sample surrogate for sequence convergence: true iff the magnitude of
/// the distance from the last stored point to `limit` is below `tol`.
template <typename P>
bool converges_to(const SequenceMonitor<P>& monitor, const MetricSpace<P>& space, const P& limit,
                  double tol) {
  if (tol <= 0.0) {
    throw std::invalid_argument("converges_to: tol must be positive");
  }
  if (monitor.empty()) {
    throw std::invalid_argument("converges_to: monitor holds no points");
  }
  return space.distance(monitor.points().back(), limit).modulus() < tol;
}

/// Finite-window surrogate for the Cauchy property under a strict complex
/// threshold: true iff every pairwise distance past `burn_in` is strictly
/// dominated (in both components) by `threshold`.
///
/// A true result is "consistent with Cauchy" on the stored window only; the
/// property quantifies over all tail indices and can never be proved from a
/// finite prefix.
template <typename P>
bool is_c_cauchy_prefix(const SequenceMonitor<P>& monitor, const MetricSpace<P>& space,
                        const ComplexScalar& threshold, std::size_t burn_in) {
  if (!strictly_dominates(ComplexScalar(), threshold)) {
    throw std::invalid_argument("is_c_cauchy_prefix: threshold must strictly dominate 0, got " +
                                to_string(threshold));
  }
  const std::size_t n = monitor.points().size();
  if (n < 2 || burn_in >= n - 1) {
    throw std::invalid_argument("is_c_cauchy_prefix: burn_in must leave at least two points");
  }
  for (std::size_t i = burn_in + 1; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ComplexScalar d = space.distance(monitor.points()[i], monitor.points()[j]);
      if (!strictly_dominates(d, threshold)) return false;
    }
  }
  return true;
}

/// Real line under |x - y|, embedded on the real axis of the metric codomain.
inline MetricSpace<double> make_modulus_space() {
  return MetricSpace<double>{
      [](const double& x, const double& y) { return ComplexScalar(std::abs(x - y), 0.0); },
      [](const double& x, const double& y) { return x == y; }};
}

/// Real line under |x - y| scaled into the complex plane along direction
/// (1, slope). slope = 0 recovers the plain modulus metric.
inline MetricSpace<double> make_scaled_modulus_space(double slope) {
  const ComplexScalar factor = complex_scale_factor(slope);
  return MetricSpace<double>{
      [factor](const double& x, const double& y) { return std::abs(x - y) * factor; },
      [](const double& x, const double& y) { return x == y; }};
}

}  // namespace cvfix
