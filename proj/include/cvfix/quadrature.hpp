#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cvfix {

enum class QuadratureRule { Trapezoid, Simpson };

inline const char* to_string(QuadratureRule rule) {
  return rule == QuadratureRule::Trapezoid ? "trapezoid" : "simpson";
}

/// Composite quadrature weights on a uniform grid of `nodes` points with
/// spacing `step`. Simpson needs an odd node count (an even number of
/// subintervals); trapezoid works from two nodes up.
inline Eigen::VectorXd quadrature_weights(QuadratureRule rule, Eigen::Index nodes, double step) {
  if (step <= 0.0) {
    throw std::invalid_argument("quadrature_weights: step must be positive");
  }
  Eigen::VectorXd w(nodes);
  switch (rule) {
    case QuadratureRule::Trapezoid:
      if (nodes < 2) {
        throw std::invalid_argument("quadrature_weights: trapezoid needs at least 2 nodes");
      }
      w.setConstant(step);
      w(0) = w(nodes - 1) = step / 2.0;
      break;
    case QuadratureRule::Simpson:
      if (nodes < 3 || nodes % 2 == 0) {
        throw std::invalid_argument("quadrature_weights: simpson needs an odd node count >= 3, got " +
                                    std::to_string(nodes));
      }
      for (Eigen::Index i = 0; i < nodes; ++i) {
        w(i) = (i % 2 == 1) ? 4.0 * step / 3.0 : 2.0 * step / 3.0;
      }
      w(0) = w(nodes - 1) = step / 3.0;
      break;
  }
  return w;
}

/// Integrates a scalar callable over [lower, upper] on `nodes` uniform points.
template <typename F>
double integrate(QuadratureRule rule, double lower, double upper, Eigen::Index nodes, F&& f) {
  if (!(lower <= upper)) {
    throw std::invalid_argument("integrate: lower must not exceed upper");
  }
  const double step = (upper - lower) / static_cast<double>(nodes - 1);
  const Eigen::VectorXd w = quadrature_weights(rule, nodes, step);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < nodes; ++i) {
    acc += w(i) * f(lower + static_cast<double>(i) * step);
  }
  return acc;
}

}  // namespace cvfix
