#pragma once

#include <array>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cvfix/coefficients.hpp"
#include "cvfix/complex_scalar.hpp"
#include "cvfix/grid_function.hpp"
#include "cvfix/jungck.hpp"
#include "cvfix/metric_space.hpp"
#include "cvfix/quadrature.hpp"

namespace cvfix {

/// Integral kernel (t, s, x(s)) -> R^n. Must return finite values of the
/// instance's component count.
using Kernel = std::function<Eigen::VectorXd(double t, double s, const Eigen::VectorXd& x)>;

/// One system of four integral equations x = offset_i + integral of
/// kernel_i(t, s, x(s)) ds, discretized on the shared grid of the four offset
/// functions (the quadrature nodes coincide with the representation nodes; no
/// interpolation between grids). metric_slope is the direction parameter of
/// the complex sup metric and is deliberately distinct from the interval
/// endpoints.
struct UrysohnInstance {
  std::array<Kernel, 4> kernels;
  std::array<GridFunction, 4> offsets;
  QuadratureRule rule = QuadratureRule::Simpson;
  double metric_slope = 1.0;

  double lower() const { return offsets[0].lower; }
  double upper() const { return offsets[0].upper; }
  Eigen::Index node_count() const { return offsets[0].node_count(); }
  Eigen::Index component_count() const { return offsets[0].component_count(); }

  GridFunction zero() const {
    return GridFunction::zeros(lower(), upper(), node_count(), component_count());
  }

  void validate() const {
    for (const auto& k : kernels) {
      if (!k) throw std::invalid_argument("UrysohnInstance: all four kernels required");
    }
    for (const auto& psi : offsets) {
      psi.validate();
      require_conformant(offsets[0], psi, "UrysohnInstance");
    }
    if (rule == QuadratureRule::Simpson && node_count() % 2 == 0) {
      throw std::invalid_argument("UrysohnInstance: simpson rule needs an odd node count");
    }
  }
};

/// Applies the `which`-th integral operator (1-based) to a grid function:
/// out(t_j) = sum over grid nodes s of w_s * kernel(t_j, t_s, x(t_s)).
inline GridFunction delta(const UrysohnInstance& inst, int which, const GridFunction& x) {
  if (which < 1 || which > 4) {
    throw std::invalid_argument("delta: operator index must be in 1..4");
  }
  require_conformant(inst.offsets[0], x, "delta");
  const Kernel& kernel = inst.kernels[static_cast<std::size_t>(which - 1)];
  const Eigen::Index m = x.node_count();
  const Eigen::Index n = x.component_count();
  const Eigen::VectorXd w = quadrature_weights(inst.rule, m, x.step());

  GridFunction out = GridFunction::zeros(x.lower, x.upper, m, n);
  Eigen::VectorXd acc(n);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = x.node(j);
    acc.setZero();
    for (Eigen::Index s = 0; s < m; ++s) {
      const Eigen::VectorXd value = kernel(t, x.node(s), x.values.row(s).transpose());
      if (value.size() != n || !value.allFinite()) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "kernel %d produced a bad value at (t=%.12g, s=%.12g)", which, t,
                      x.node(s));
        throw std::runtime_error(buf);
      }
      acc.noalias() += w(s) * value;
    }
    out.values.row(j) = acc.transpose();
  }
  return out;
}

/// The four self-maps of the discretized system. The two outer maps add an
/// integral image to an offset; the two inner maps subtract one from twice the
/// argument, which is what makes their preimages a contractive inner solve.
inline GridFunction apply_S(const UrysohnInstance& inst, const GridFunction& x) {
  GridFunction out = delta(inst, 1, x);
  out.values += inst.offsets[0].values;
  return out;
}

inline GridFunction apply_T(const UrysohnInstance& inst, const GridFunction& x) {
  GridFunction out = delta(inst, 2, x);
  out.values += inst.offsets[1].values;
  return out;
}

inline GridFunction apply_f(const UrysohnInstance& inst, const GridFunction& x) {
  GridFunction out = delta(inst, 3, x);
  out.values = 2.0 * x.values - out.values - inst.offsets[2].values;
  return out;
}

inline GridFunction apply_g(const UrysohnInstance& inst, const GridFunction& x) {
  GridFunction out = delta(inst, 4, x);
  out.values = 2.0 * x.values - out.values - inst.offsets[3].values;
  return out;
}

/// The complex sup metric on grid functions: the sup-norm distance scaled into
/// the complex plane along direction (1, slope). slope = 0 degenerates to the
/// plain real sup distance.
inline ComplexScalar sup_metric(const GridFunction& x, const GridFunction& y, double slope) {
  return sup_distance(x, y) * complex_scale_factor(slope);
}

/// Grid functions under the complex sup metric; equality is sup distance at or
/// below equality_eps, the conventional identification for floating-point
/// carriers.
inline MetricSpace<GridFunction> make_sup_metric_space(double slope,
                                                       double equality_eps = 1e-12) {
  const ComplexScalar factor = complex_scale_factor(slope);
  return MetricSpace<GridFunction>{
      [factor](const GridFunction& x, const GridFunction& y) {
        return sup_distance(x, y) * factor;
      },
      [equality_eps](const GridFunction& x, const GridFunction& y) {
        return sup_distance(x, y) <= equality_eps;
      }};
}

inline MetricSpace<GridFunction> make_metric_space(const UrysohnInstance& inst,
                                                   double equality_eps = 1e-12) {
  return make_sup_metric_space(inst.metric_slope, equality_eps);
}

/// Outcome of an inner preimage solve. On failure `point` is empty and
/// `residual` holds the last sup-norm residual reached.
struct PreimageOutcome {
  std::optional<GridFunction> point;
  double residual = 0.0;
  int sweeps = 0;

  bool ok() const { return point.has_value(); }
};

namespace detail {

/// Solves 2x - D(x) - psi = w by Picard sweeps on x = (w + D(x) + psi) / 2.
/// The exit residual is exact: with next = (w + D(cur) + psi) / 2, the map
/// residual of cur equals 2 * sup|next - cur|, so each sweep measures the
/// previous iterate at no extra cost.
inline PreimageOutcome inner_halving_solve(const UrysohnInstance& inst, int which,
                                           const GridFunction& psi, const GridFunction& w,
                                           const GridFunction& hint, double tol, int max_inner) {
  require_conformant(inst.offsets[0], w, "preimage");
  require_conformant(inst.offsets[0], hint, "preimage");
  if (!(tol > 0.0)) {
    throw std::invalid_argument("preimage: tol must be positive");
  }

  PreimageOutcome outcome;
  GridFunction cur = hint;
  GridFunction next = cur;
  for (int sweep = 1; sweep <= max_inner; ++sweep) {
    next = delta(inst, which, cur);
    next.values = 0.5 * (w.values + next.values + psi.values);
    outcome.sweeps = sweep;
    outcome.residual = 2.0 * sup_distance(next, cur);
    if (outcome.residual < tol) {
      outcome.point = std::move(cur);
      return outcome;
    }
    cur = next;
  }
  return outcome;  // point stays empty; residual is the last one measured
}

}  // namespace detail

inline PreimageOutcome preimage_f(const UrysohnInstance& inst, const GridFunction& w,
                                  const GridFunction& hint, double tol, int max_inner = 200) {
  return detail::inner_halving_solve(inst, 3, inst.offsets[2], w, hint, tol, max_inner);
}

inline PreimageOutcome preimage_g(const UrysohnInstance& inst, const GridFunction& w,
                                  const GridFunction& hint, double tol, int max_inner = 200) {
  return detail::inner_halving_solve(inst, 4, inst.offsets[3], w, hint, tol, max_inner);
}

/// Wires the four maps and both preimage oracles into the generic iteration
/// engine's quadruple. The instance is captured by value.
inline MapQuadruple<GridFunction> make_quadruple(const UrysohnInstance& inst,
                                                 int max_inner = 200) {
  MapQuadruple<GridFunction> quad;
  quad.S = [inst](const GridFunction& x) { return apply_S(inst, x); };
  quad.T = [inst](const GridFunction& x) { return apply_T(inst, x); };
  quad.f = [inst](const GridFunction& x) { return apply_f(inst, x); };
  quad.g = [inst](const GridFunction& x) { return apply_g(inst, x); };
  quad.preimage_f = [inst, max_inner](const GridFunction& w, const GridFunction& hint,
                                      double tol) -> std::optional<GridFunction> {
    return preimage_f(inst, w, hint, tol, max_inner).point;
  };
  quad.preimage_g = [inst, max_inner](const GridFunction& w, const GridFunction& hint,
                                      double tol) -> std::optional<GridFunction> {
    return preimage_g(inst, w, hint, tol, max_inner).point;
  };
  return quad;
}

/// Sup-norm residuals of the two structural identities that tie the four
/// equations together: the range identities make every outer-map image land in
/// the matching inner map's range, and the commutation identities force the
/// map pairs to commute at coincidence points. The exact expressions
/// evaluated are recorded in `formulas`, because two of the source tokens do
/// not type-check as displayed and the implementation must fix (and disclose)
/// a reading.
struct StructuralConditionReport {
  double range_identity_residual = 0.0;        // max of the two range identities
  double commutation_identity_residual = 0.0;  // max of the two commutation identities
  std::array<double, 2> range_parts{};
  std::array<double, 2> commutation_parts{};
  std::vector<std::string> formulas;
};

inline StructuralConditionReport structural_condition_residuals(const UrysohnInstance& inst,
                                                                const GridFunction& x) {
  require_conformant(inst.offsets[0], x, "structural_condition_residuals");
  StructuralConditionReport report;

  const auto& psi1 = inst.offsets[0].values;
  const auto& psi2 = inst.offsets[1].values;
  const auto& psi3 = inst.offsets[2].values;
  const auto& psi4 = inst.offsets[3].values;

  auto lift = [&](const Eigen::MatrixXd& v) {
    return GridFunction{x.lower, x.upper, v};
  };

  const GridFunction d1x = delta(inst, 1, x);
  const GridFunction d2x = delta(inst, 2, x);
  const GridFunction d3x = delta(inst, 3, x);
  const GridFunction d4x = delta(inst, 4, x);

  // Range identity for the (S, g) pair: psi1 + psi4 + delta1[x]
  //   - delta4[delta1[x] + psi1 + psi4] = 0.
  {
    const GridFunction inner = lift(d1x.values + psi1 + psi4);
    const Eigen::MatrixXd lhs = psi1 + psi4 + d1x.values - delta(inst, 4, inner).values;
    report.range_parts[0] = lhs.cwiseAbs().maxCoeff();
  }
  // Range identity for the (T, f) pair: psi2 + psi3 + delta2[x]
  //   - delta3[delta2[x] + psi2 + psi3] = 0.
  {
    const GridFunction inner = lift(d2x.values + psi2 + psi3);
    const Eigen::MatrixXd lhs = psi2 + psi3 + d2x.values - delta(inst, 3, inner).values;
    report.range_parts[1] = lhs.cwiseAbs().maxCoeff();
  }
  // Commutation identity for (S, f): psi1 + 3*psi3 + delta1[delta1[x] + psi1]
  //   + 2*delta3[x] + delta3[2x - delta3[x] - psi3] - 4x = 0.
  {
    const GridFunction inner1 = lift(d1x.values + psi1);
    const GridFunction inner3 = lift(2.0 * x.values - d3x.values - psi3);
    const Eigen::MatrixXd lhs = psi1 + 3.0 * psi3 + delta(inst, 1, inner1).values +
                                2.0 * d3x.values + delta(inst, 3, inner3).values - 4.0 * x.values;
    report.commutation_parts[0] = lhs.cwiseAbs().maxCoeff();
  }
  // Commutation identity for (T, g): psi2 + 3*psi4 + delta2[delta2[x] + psi2]
  //   + 2*delta4[x] + delta4[2x - delta4[x] - psi4] - 4x = 0.
  {
    const GridFunction inner2 = lift(d2x.values + psi2);
    const GridFunction inner4 = lift(2.0 * x.values - d4x.values - psi4);
    const Eigen::MatrixXd lhs = psi2 + 3.0 * psi4 + delta(inst, 2, inner2).values +
                                2.0 * d4x.values + delta(inst, 4, inner4).values - 4.0 * x.values;
    report.commutation_parts[1] = lhs.cwiseAbs().maxCoeff();
  }

  report.range_identity_residual = std::max(report.range_parts[0], report.range_parts[1]);
  report.commutation_identity_residual =
      std::max(report.commutation_parts[0], report.commutation_parts[1]);
  report.formulas = {
      "range[S,g]: psi1 + psi4 + delta1[x] - delta4[delta1[x] + psi1 + psi4]",
      "range[T,f]: psi2 + psi3 + delta2[x] - delta3[delta2[x] + psi2 + psi3]",
      "commute[S,f]: psi1 + 3*psi3 + delta1[delta1[x] + psi1] + 2*delta3[x] + "
      "delta3[2x - delta3[x] - psi3] - 4x",
      "commute[T,g]: psi2 + 3*psi4 + delta2[delta2[x] + psi2] + 2*delta4[x] + "
      "delta4[2x - delta4[x] - psi4] - 4x",
  };
  return report;
}

/// Which quantity set the pointwise contraction check evaluates. Consistent
/// uses the comparison quantities that equal the metric distances of the map
/// quadruple node by node (so the per-node inequality aggregates to the
/// metric-level contraction bound). Literal evaluates an alternate transcribed
/// set that differs in two places: the left side compares the two outer images
/// at the same argument, and the first centering term swaps one offset.
enum class BoundMode { Consistent, Literal };

/// Per-node violations of the pointwise contraction inequality
///   A(t) * factor <= l1(E, F) * B(t) + l2(E, F) * C(t) + l3(E, F) * D(t)
/// where, per pair (x, y):  A(t) = |Sx(t) - Ty(t)|, B(t) = |fx(t) - gy(t)| *
/// factor, C(t) = (|fx(t) - Sx(t)| + |gy(t) - Ty(t)|) * factor, D(t) =
/// (|fx(t) - Ty(t)| + |gy(t) - Sx(t)|) * factor, and the coefficient arguments
/// E = d(fx, 0), F = d(gy, 0) are the whole-grid distances to the origin.
struct PointwiseContractionReport {
  struct Violation {
    std::size_t pair_index = 0;
    Eigen::Index node = 0;
    ComplexScalar lhs, rhs;
  };
  std::vector<Violation> violations;
  std::size_t pairs_checked = 0;
  BoundMode mode = BoundMode::Consistent;

  bool passed() const { return violations.empty(); }
};

inline PointwiseContractionReport verify_pointwise_contraction(
    const UrysohnInstance& inst, const CoefficientTriple& triple,
    const std::vector<std::pair<GridFunction, GridFunction>>& pairs,
    BoundMode mode = BoundMode::Consistent, double slack = 1e-12) {
  PointwiseContractionReport report;
  report.mode = mode;
  const ComplexScalar factor = complex_scale_factor(inst.metric_slope);
  const ComplexScalar slack_vec(slack, slack);

  for (const auto& [x, y] : pairs) {
    require_conformant(inst.offsets[0], x, "verify_pointwise_contraction");
    require_conformant(inst.offsets[0], y, "verify_pointwise_contraction");

    const GridFunction Sx = apply_S(inst, x);
    const GridFunction Ty = apply_T(inst, y);
    const GridFunction fx = apply_f(inst, x);
    const GridFunction gy = apply_g(inst, y);

    const ComplexScalar E = sup_norm(fx) * factor;
    const ComplexScalar F = sup_norm(gy) * factor;
    const double l1 = triple.lambda1(E, F);
    const double l2 = triple.lambda2(E, F);
    const double l3 = triple.lambda3(E, F);

    // Literal-mode replacements: the left side uses T applied to x instead of
    // y, and the first centering difference uses offset 2 instead of offset 1.
    const GridFunction Tx = mode == BoundMode::Literal ? apply_T(inst, x) : Ty;
    const Eigen::MatrixXd first_centering =
        mode == BoundMode::Literal
            ? (fx.values - (Sx.values - inst.offsets[0].values) - inst.offsets[1].values).eval()
            : (fx.values - Sx.values).eval();

    for (Eigen::Index j = 0; j < x.node_count(); ++j) {
      const double a_val = mode == BoundMode::Literal
                               ? (Sx.values.row(j) - Tx.values.row(j)).cwiseAbs().maxCoeff()
                               : (Sx.values.row(j) - Ty.values.row(j)).cwiseAbs().maxCoeff();
      const double b_val = (fx.values.row(j) - gy.values.row(j)).cwiseAbs().maxCoeff();
      const double c_val = first_centering.row(j).cwiseAbs().maxCoeff() +
                           (gy.values.row(j) - Ty.values.row(j)).cwiseAbs().maxCoeff();
      const double d_val = (fx.values.row(j) - Ty.values.row(j)).cwiseAbs().maxCoeff() +
                           (gy.values.row(j) - Sx.values.row(j)).cwiseAbs().maxCoeff();

      const ComplexScalar lhs = a_val * factor;
      const ComplexScalar rhs = (l1 * b_val + l2 * c_val + l3 * d_val) * factor;
      if (!partial_leq(lhs, rhs + slack_vec)) {
        report.violations.push_back({report.pairs_checked, j, lhs, rhs});
      }
    }
    ++report.pairs_checked;
  }
  return report;
}

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double inner_tol = 0.0;        // <= 0 means tol / 10
  int max_inner = 200;
  double certificate_tol = 0.0;  // <= 0 means 100 * tol
  double decrease_slack = 1e-10;
};

/// Everything one end-to-end solve produces. The solution is the final y point
/// of the trace whether or not the run converged (callers must check
/// `status`); equation_residuals[i] is the sup-norm defect of the solution in
/// the (i+1)-th integral equation.
struct SolveResult {
  GridFunction solution;
  FixedPointCertificate<GridFunction> certificate;
  IterationTrace<GridFunction> trace;
  StructuralConditionReport conditions;
  std::array<double, 4> equation_residuals{};
  IterationStatus status = IterationStatus::MaxIterations;
};

/// Discretizes nothing new -- the instance already fixes the grid -- but wires
/// the four maps, the complex sup metric, and the derived rate function into
/// the alternating engine, then certifies the limit and measures its defect in
/// each of the four integral equations. A valid certificate means the limit is
/// simultaneously (to tolerance) a fixed point of all four maps, which is
/// exactly a common solution of the system. Coefficient arguments use the
/// origin-distance reading natural to the function space.
inline SolveResult solve_system(const UrysohnInstance& inst, const CoefficientTriple& triple,
                                const SolveOptions& options,
                                const std::vector<GridFunction>& starts) {
  inst.validate();
  if (starts.empty()) {
    throw std::invalid_argument("solve_system: need at least one starting point");
  }

  const MetricSpace<GridFunction> space = make_metric_space(inst);
  const MapQuadruple<GridFunction> quad = make_quadruple(inst, options.max_inner);
  const GammaFunction gamma = derive_gamma(triple);

  IterationOptions<GridFunction> iter;
  iter.tol = options.tol;
  iter.max_iter = options.max_iter;
  iter.inner_tol = options.inner_tol;
  iter.decrease_slack = options.decrease_slack;
  iter.gamma_args = origin_distance_args(space, inst.zero());

  SolveResult result;
  result.trace = jungck_iterate(quad, space, gamma, starts.front(), iter);
  result.status = result.trace.status;
  result.solution =
      result.trace.y_points.empty() ? starts.front() : result.trace.y_points.back();

  const double cert_tol =
      options.certificate_tol > 0.0 ? options.certificate_tol : 100.0 * options.tol;
  if (result.trace.converged()) {
    result.certificate = certify_fixed_point(quad, space, result.trace, cert_tol);
  } else {
    result.certificate.point = result.solution;
    result.certificate.tol = cert_tol;
    result.certificate.valid = false;
    result.certificate.reason = "iteration did not converge";
  }

  result.conditions = structural_condition_residuals(inst, result.solution);
  for (int i = 0; i < 4; ++i) {
    GridFunction rhs = delta(inst, i + 1, result.solution);
    rhs.values += inst.offsets[static_cast<std::size_t>(i)].values;
    result.equation_residuals[static_cast<std::size_t>(i)] =
        sup_distance(result.solution, rhs);
  }
  return result;
}

/// An instance with the four separable kernels gain_i * t * s * x and linear
/// offsets slope_i * t on [0, 1]. With slope_i = 1 - gain_i / 3 the ramp
/// x(t) = t solves all four equations exactly, which makes these instances
/// closed-form test oracles.
inline UrysohnInstance separable_linear_instance(Eigen::Index nodes,
                                                 const std::array<double, 4>& gains,
                                                 const std::array<double, 4>& offset_slopes,
                                                 QuadratureRule rule = QuadratureRule::Simpson,
                                                 double metric_slope = 1.0,
                                                 Eigen::Index components = 1) {
  UrysohnInstance inst;
  inst.rule = rule;
  inst.metric_slope = metric_slope;
  for (std::size_t i = 0; i < 4; ++i) {
    const double gain = gains[i];
    inst.kernels[i] = [gain](double t, double s, const Eigen::VectorXd& x) {
      return (gain * t * s * x).eval();
    };
    inst.offsets[i] = GridFunction::linear_ramp(0.0, 1.0, nodes, components, offset_slopes[i]);
  }
  inst.validate();
  return inst;
}

/// The default demonstration instance: gains all 0.3, offsets 0.9 * t, ramp
/// solution x(t) = t.
inline UrysohnInstance demo_instance(Eigen::Index nodes = 101, double gain = 0.3,
                                     QuadratureRule rule = QuadratureRule::Simpson,
                                     double metric_slope = 1.0) {
  const double slope = 1.0 - gain / 3.0;
  return separable_linear_instance(nodes, {gain, gain, gain, gain},
                                   {slope, slope, slope, slope}, rule, metric_slope);
}

}  // namespace cvfix
