#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cvfix/coefficients.hpp"
#include "cvfix/complex_scalar.hpp"
#include "cvfix/metric_space.hpp"

namespace cvfix {

/// Four self-maps of a carrier together with numerical preimage oracles for
/// the two "inner" maps. The oracles realize the implicit solves of the
/// alternating scheme: preimage_f(w, hint, tol) returns some x with
/// |d(f(x), w)| < tol, warm-started at hint, or nullopt on failure. Oracles
/// must be deterministic in (target, hint, tol) so traces are reproducible.
template <typename P>
struct MapQuadruple {
  using MapFn = std::function<P(const P&)>;
  using PreimageFn = std::function<std::optional<P>(const P& target, const P& hint, double tol)>;

  MapFn f, g, S, T;
  PreimageFn preimage_f, preimage_g;
};

enum class IterationStatus { Converged, MaxIterations, PreimageFailed, DecreaseViolated };

inline const char* to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::Converged: return "converged";
    case IterationStatus::MaxIterations: return "max-iterations";
    case IterationStatus::PreimageFailed: return "preimage-failed";
    case IterationStatus::DecreaseViolated: return "decrease-violated";
  }
  return "unknown";
}

/// Everything the alternating iteration produced. With y_points = {y1, y2, ...}
/// the interleaving is y_{2n-1} = S(x_{2n-2}) with g(x_{2n-1}) ~ y_{2n-1}, and
/// y_{2n} = T(x_{2n-1}) with f(x_{2n}) ~ y_{2n} (preimages hold to the inner
/// tolerance). step_norms[k] = |d(y_points[k], y_points[k+1])|. When a rate
/// function was supplied, gamma_values[k] is the rate recorded for the step
/// pair (step_norms[k], step_norms[k+1]), so it has one entry fewer than
/// step_norms.
template <typename P>
struct IterationTrace {
  std::vector<P> x_points;
  std::vector<P> y_points;
  std::vector<double> step_norms;
  std::vector<double> gamma_values;
  IterationStatus status = IterationStatus::MaxIterations;
  std::string message;

  bool converged() const { return status == IterationStatus::Converged; }
};

/// Adapter from a pair of carrier points to the nonnegative-quadrant arguments
/// a coefficient function expects. See IterationOptions::gamma_args.
template <typename P>
using ArgPairFn = std::function<std::pair<ComplexScalar, ComplexScalar>(const P&, const P&)>;

/// Maps each carrier point to its distance from a fixed origin point -- the
/// function-space reading of coefficient arguments, available whenever the
/// carrier has a natural zero.
template <typename P>
ArgPairFn<P> origin_distance_args(const MetricSpace<P>& space, P origin) {
  return [space, origin = std::move(origin)](const P& u, const P& v) {
    return std::make_pair(space.distance(u, origin), space.distance(v, origin));
  };
}

template <typename P>
struct IterationOptions {
  double tol = 1e-10;
  int max_iter = 200;         // maximum number of y points produced
  double inner_tol = 0.0;     // preimage tolerance; <= 0 means tol / 10
  double decrease_slack = 1e-10;

  /// Converts the two most recent y points into coefficient arguments when a
  /// rate function is supplied. When empty, the engine falls back to the
  /// residual reading: the arguments are the complex distances
  /// (d(y_{n-1}, y_n), d(y_n, y_{n+1})), which is what the coefficient
  /// arguments collapse to along the iteration itself.
  ArgPairFn<P> gamma_args;
};

/// The alternating two-pair iteration: from the current x, apply the outer map
/// (S on even phases, T on odd), record the new y, then solve the matching
/// inner map (g after S, f after T) for the next x via its preimage oracle.
///
/// Terminates Converged as soon as a consecutive-y distance magnitude drops
/// below tol (a start that is already a common fixed point converges after one
/// sweep with a zero step norm). When a rate function is supplied, each step's
/// recorded rate is checked against the decrease inequality
///   step_norms[k+1] <= gamma * step_norms[k] + decrease_slack,
/// and a violation stops the run with DecreaseViolated -- the contraction
/// hypotheses cannot hold for this system. Without a rate function a
/// non-decreasing step is only noted in the message.
template <typename P>
IterationTrace<P> jungck_iterate(const MapQuadruple<P>& quad, const MetricSpace<P>& space,
                                 const std::optional<GammaFunction>& gamma, const P& x0,
                                 const IterationOptions<P>& options = {}) {
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("jungck_iterate: tol must be positive");
  }
  if (options.max_iter < 2) {
    throw std::invalid_argument("jungck_iterate: max_iter must be at least 2");
  }
  if (!quad.f || !quad.g || !quad.S || !quad.T || !quad.preimage_f || !quad.preimage_g) {
    throw std::invalid_argument("jungck_iterate: all maps and both preimage oracles required");
  }
  const double inner_tol = options.inner_tol > 0.0 ? options.inner_tol : options.tol / 10.0;

  IterationTrace<P> trace;
  trace.x_points.push_back(x0);

  bool outer_is_S = true;
  bool warned_nondecreasing = false;
  ComplexScalar prev_step_distance;  // distance behind step_norms.back()

  for (int produced = 0; produced < options.max_iter; ++produced) {
    const P& x_curr = trace.x_points.back();
    P y_new = outer_is_S ? quad.S(x_curr) : quad.T(x_curr);

    if (!trace.y_points.empty()) {
      const ComplexScalar step_distance = space.distance(trace.y_points.back(), y_new);
      const double step_norm = step_distance.modulus();

      if (gamma && !trace.step_norms.empty()) {
        const P& y_prev2 = trace.y_points[trace.y_points.size() - 2];
        const P& y_prev1 = trace.y_points.back();
        const auto args = options.gamma_args
                              ? options.gamma_args(y_prev2, y_prev1)
                              : std::make_pair(prev_step_distance, step_distance);
        const double rate = (*gamma)(args.first, args.second);
        trace.gamma_values.push_back(rate);
        if (step_norm > rate * trace.step_norms.back() + options.decrease_slack) {
          trace.y_points.push_back(std::move(y_new));
          trace.step_norms.push_back(step_norm);
          trace.status = IterationStatus::DecreaseViolated;
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "step %zu: %.17g exceeds rate %.17g times previous %.17g plus slack",
                        trace.step_norms.size() - 1, step_norm, rate,
                        trace.step_norms[trace.step_norms.size() - 2]);
          trace.message = buf;
          return trace;
        }
      } else if (!gamma && !trace.step_norms.empty() && !warned_nondecreasing &&
                 step_norm > trace.step_norms.back() + options.decrease_slack) {
        trace.message = "warning: step norms are not monotone nonincreasing";
        warned_nondecreasing = true;
      }

      trace.y_points.push_back(std::move(y_new));
      trace.step_norms.push_back(step_norm);
      prev_step_distance = step_distance;

      if (step_norm < options.tol) {
        trace.status = IterationStatus::Converged;
        return trace;
      }
    } else {
      trace.y_points.push_back(std::move(y_new));
    }

    const auto& oracle = outer_is_S ? quad.preimage_g : quad.preimage_f;
    std::optional<P> x_next = oracle(trace.y_points.back(), x_curr, inner_tol);
    if (!x_next) {
      trace.status = IterationStatus::PreimageFailed;
      trace.message = std::string("preimage under ") + (outer_is_S ? "g" : "f") +
                      " failed for y point " + std::to_string(trace.y_points.size());
      return trace;
    }
    trace.x_points.push_back(std::move(*x_next));
    outer_is_S = !outer_is_S;
  }

  trace.status = IterationStatus::MaxIterations;
  return trace;
}

/// Residuals certifying that a candidate point is a common fixed point of all
/// four maps, plus the coincidence and commutation residuals at the auxiliary
/// preimage points. All residuals are distance magnitudes; the certificate is
/// valid iff every residual is below tol. `reason` is set when the
/// certificate could not even be assembled (a preimage oracle failed), in
/// which case the coincidence and commutation entries are NaN.
template <typename P>
struct FixedPointCertificate {
  P point;
  std::array<double, 4> map_residuals{};          // |d(S t, t)|, |d(T t, t)|, |d(f t, t)|, |d(g t, t)|
  std::array<double, 2> coincidence_residuals{};  // |d(S v, f v)|, |d(T u, g u)|
  std::array<double, 2> commutation_residuals{};  // |d(S f v, f S v)|, |d(T g u, g T u)|
  bool valid = false;
  double tol = 0.0;
  std::string reason;
};

/// Certifies the limit of a converged trace: t is the last y point, v solves
/// f(v) ~ t and u solves g(u) ~ t. Every stored residual is exactly one map
/// application (or two, for commutation) and one distance, so it can be
/// reproduced bit-for-bit from the certificate point.
template <typename P>
FixedPointCertificate<P> certify_fixed_point(const MapQuadruple<P>& quad,
                                             const MetricSpace<P>& space,
                                             const IterationTrace<P>& trace, double tol) {
  if (!trace.converged()) {
    throw std::invalid_argument("certify_fixed_point: trace did not converge");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("certify_fixed_point: tol must be positive");
  }

  FixedPointCertificate<P> cert;
  cert.tol = tol;
  cert.point = trace.y_points.back();
  const P& t = cert.point;

  cert.map_residuals = {space.distance(quad.S(t), t).modulus(),
                        space.distance(quad.T(t), t).modulus(),
                        space.distance(quad.f(t), t).modulus(),
                        space.distance(quad.g(t), t).modulus()};

  const double inner_tol = tol / 10.0;
  std::optional<P> v = quad.preimage_f(t, t, inner_tol);
  std::optional<P> u = quad.preimage_g(t, t, inner_tol);
  if (!v || !u) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cert.coincidence_residuals = {nan, nan};
    cert.commutation_residuals = {nan, nan};
    cert.reason = std::string("preimage under ") + (!v ? "f" : "g") +
                  " failed at the candidate point";
    cert.valid = false;
    return cert;
  }

  const P Sv = quad.S(*v), fv = quad.f(*v);
  const P Tu = quad.T(*u), gu = quad.g(*u);
  cert.coincidence_residuals = {space.distance(Sv, fv).modulus(),
                                space.distance(Tu, gu).modulus()};
  cert.commutation_residuals = {space.distance(quad.S(fv), quad.f(Sv)).modulus(),
                                space.distance(quad.T(gu), quad.g(Tu)).modulus()};

  cert.valid = true;
  for (double r : cert.map_residuals) cert.valid = cert.valid && r < tol;
  for (double r : cert.coincidence_residuals) cert.valid = cert.valid && r < tol;
  for (double r : cert.commutation_residuals) cert.valid = cert.valid && r < tol;
  return cert;
}

/// Per-pair outcome of sampling a contraction inequality. Violations carry
/// both sides so reports can show exactly what failed; they are findings, not
/// errors.
struct ContractionReport {
  struct Violation {
    std::size_t pair_index = 0;
    ComplexScalar lhs, rhs;
  };
  std::vector<Violation> violations;
  std::size_t pairs_checked = 0;

  bool passed() const { return violations.empty(); }
};

/// Samples the additive contraction bound
///   d(Sx, Ty) <= l1*d(fx, gy) + l2*(d(fx, Sx) + d(gy, Ty))
///                + l3*(d(fx, Ty) + d(gy, Sx))
/// over the given pairs, in the componentwise order with additive slack.
/// Coefficient arguments come from `args` when supplied; the default is the
/// residual pair (d(fx, Sx), d(gy, Ty)).
template <typename P>
ContractionReport verify_contraction_sum(const MapQuadruple<P>& quad, const MetricSpace<P>& space,
                                         const CoefficientTriple& triple,
                                         const std::vector<std::pair<P, P>>& pairs,
                                         const ArgPairFn<P>& args = {}, double slack = 1e-12) {
  if (triple.kind() != TripleKind::SumForm) {
    throw std::invalid_argument("verify_contraction_sum requires a sum-form triple");
  }
  ContractionReport report;
  const ComplexScalar slack_vec(slack, slack);
  for (const auto& [x, y] : pairs) {
    const P fx = quad.f(x), gy = quad.g(y), Sx = quad.S(x), Ty = quad.T(y);
    const ComplexScalar lhs = space.distance(Sx, Ty);
    const ComplexScalar d_fg = space.distance(fx, gy);
    const ComplexScalar d_fS = space.distance(fx, Sx);
    const ComplexScalar d_gT = space.distance(gy, Ty);
    const ComplexScalar d_fT = space.distance(fx, Ty);
    const ComplexScalar d_gS = space.distance(gy, Sx);

    const auto lam_args = args ? args(fx, gy) : std::make_pair(d_fS, d_gT);
    const double l1 = triple.lambda1(lam_args.first, lam_args.second);
    const double l2 = triple.lambda2(lam_args.first, lam_args.second);
    const double l3 = triple.lambda3(lam_args.first, lam_args.second);

    const ComplexScalar rhs = l1 * d_fg + l2 * (d_fS + d_gT) + l3 * (d_fT + d_gS);
    if (!partial_leq(lhs, rhs + slack_vec)) {
      report.violations.push_back({report.pairs_checked, lhs, rhs});
    }
    ++report.pairs_checked;
  }
  return report;
}

/// Samples the rational contraction bound
///   d(Sx, Ty) <= l1*d(fx, gy) + l2*d(Sx, fx)*d(Ty, gy)/(1 + d(fx, gy))
///                + l3*d(Sx, gy)*d(Ty, gy)/(1 + d(fx, gy))
/// with the complex products and quotient taken literally.
template <typename P>
ContractionReport verify_contraction_rational(const MapQuadruple<P>& quad,
                                              const MetricSpace<P>& space,
                                              const CoefficientTriple& triple,
                                              const std::vector<std::pair<P, P>>& pairs,
                                              const ArgPairFn<P>& args = {},
                                              double slack = 1e-12) {
  if (triple.kind() != TripleKind::RationalForm) {
    throw std::invalid_argument("verify_contraction_rational requires a rational-form triple");
  }
  ContractionReport report;
  const ComplexScalar one(1.0, 0.0);
  const ComplexScalar slack_vec(slack, slack);
  for (const auto& [x, y] : pairs) {
    const P fx = quad.f(x), gy = quad.g(y), Sx = quad.S(x), Ty = quad.T(y);
    const ComplexScalar lhs = space.distance(Sx, Ty);
    const ComplexScalar d_fg = space.distance(fx, gy);
    const ComplexScalar d_Sf = space.distance(Sx, fx);
    const ComplexScalar d_Tg = space.distance(Ty, gy);
    const ComplexScalar d_Sg = space.distance(Sx, gy);

    const ComplexScalar denom = one + d_fg;
    if (denom == ComplexScalar()) {
      throw std::domain_error(
          "verify_contraction_rational: degenerate denominator 1 + d(fx, gy) = 0 (the distance "
          "nonnegativity axiom must be failing)");
    }

    const auto lam_args = args ? args(fx, gy) : std::make_pair(d_Sf, d_Tg);
    const double l1 = triple.lambda1(lam_args.first, lam_args.second);
    const double l2 = triple.lambda2(lam_args.first, lam_args.second);
    const double l3 = triple.lambda3(lam_args.first, lam_args.second);

    const ComplexScalar rhs =
        l1 * d_fg + l2 * ((d_Sf * d_Tg) / denom) + l3 * ((d_Sg * d_Tg) / denom);
    if (!partial_leq(lhs, rhs + slack_vec)) {
      report.violations.push_back({report.pairs_checked, lhs, rhs});
    }
    ++report.pairs_checked;
  }
  return report;
}

/// Constant-coefficient specialization: validates the scalar bound up front
/// (sum form: l1 + 2*l2 + 2*l3 < 1; rational form: l1 + l2 + l3 < 1) and only
/// samples the matching contraction inequality when the bound holds.
struct ConstantContractionReport {
  bool bound_ok = false;
  double bound_margin = 0.0;
  ContractionReport contraction;  // pairs_checked == 0 when the bound was rejected

  bool passed() const { return bound_ok && contraction.passed(); }
};

template <typename P>
ConstantContractionReport verify_constant_contraction(
    const MapQuadruple<P>& quad, const MetricSpace<P>& space, double l1, double l2, double l3,
    TripleKind kind, const std::vector<std::pair<P, P>>& pairs, const ArgPairFn<P>& args = {},
    double slack = 1e-12) {
  ConstantContractionReport report;
  const double weighted = kind == TripleKind::SumForm ? l1 + 2.0 * l2 + 2.0 * l3 : l1 + l2 + l3;
  report.bound_margin = 1.0 - weighted;
  report.bound_ok = report.bound_margin > 0.0;
  if (!report.bound_ok) return report;

  const CoefficientTriple triple = CoefficientTriple::constants(l1, l2, l3, kind);
  report.contraction = kind == TripleKind::SumForm
                           ? verify_contraction_sum(quad, space, triple, pairs, args, slack)
                           : verify_contraction_rational(quad, space, triple, pairs, args, slack);
  return report;
}

/// Checks, sample point by sample point, that each outer map's image admits a
/// preimage under the matching inner map: T(x) under f and S(x) under g.
/// "Witnessed" means every oracle call succeeded with a recomputed residual
/// below tol; failures are findings, not errors.
struct RangeInclusionReport {
  struct Entry {
    std::size_t index = 0;
    bool t_in_f_range = false;
    double t_residual = 0.0;  // |d(f(p), T x)| for the found p, or last residual proxy
    bool s_in_g_range = false;
    double s_residual = 0.0;
  };
  std::vector<Entry> entries;
  bool witnessed = false;
};

template <typename P>
RangeInclusionReport verify_range_inclusion(const MapQuadruple<P>& quad,
                                            const MetricSpace<P>& space,
                                            const std::vector<P>& sample, double tol) {
  if (!quad.preimage_f || !quad.preimage_g) {
    throw std::invalid_argument("verify_range_inclusion: preimage oracles required");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("verify_range_inclusion: tol must be positive");
  }
  RangeInclusionReport report;
  report.witnessed = true;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    RangeInclusionReport::Entry entry;
    entry.index = i;

    const P tx = quad.T(sample[i]);
    if (auto p = quad.preimage_f(tx, sample[i], tol)) {
      entry.t_residual = space.distance(quad.f(*p), tx).modulus();
      entry.t_in_f_range = entry.t_residual < tol;
    } else {
      entry.t_residual = nan;
    }

    const P sx = quad.S(sample[i]);
    if (auto p = quad.preimage_g(sx, sample[i], tol)) {
      entry.s_residual = space.distance(quad.g(*p), sx).modulus();
      entry.s_in_g_range = entry.s_residual < tol;
    } else {
      entry.s_residual = nan;
    }

    report.witnessed = report.witnessed && entry.t_in_f_range && entry.s_in_g_range;
    report.entries.push_back(entry);
  }
  return report;
}

/// Limits of independent runs from multiple starts, with all pairwise distance
/// magnitudes among the converged limits. Consistent with uniqueness iff every
/// run converged and every pairwise magnitude is below merge_tol.
template <typename P>
struct UniquenessReport {
  struct PairDistance {
    std::size_t start_i = 0;
    std::size_t start_j = 0;
    double magnitude = 0.0;
  };
  std::vector<IterationStatus> statuses;
  std::vector<std::optional<P>> limits;  // index-aligned with starts
  std::vector<PairDistance> pairwise;
  double max_pairwise = 0.0;
  bool unique_consistent = false;
};

template <typename P>
UniquenessReport<P> uniqueness_probe(const MapQuadruple<P>& quad, const MetricSpace<P>& space,
                                     const std::optional<GammaFunction>& gamma,
                                     const std::vector<P>& starts,
                                     const IterationOptions<P>& options, double merge_tol) {
  if (starts.size() < 2) {
    throw std::invalid_argument("uniqueness_probe: need at least two starting points");
  }
  if (!(merge_tol > 0.0)) {
    throw std::invalid_argument("uniqueness_probe: merge_tol must be positive");
  }
  UniquenessReport<P> report;
  bool all_converged = true;
  for (const P& x0 : starts) {
    IterationTrace<P> trace = jungck_iterate(quad, space, gamma, x0, options);
    report.statuses.push_back(trace.status);
    if (trace.converged()) {
      report.limits.emplace_back(trace.y_points.back());
    } else {
      report.limits.emplace_back(std::nullopt);
      all_converged = false;
    }
  }
  for (std::size_t i = 0; i < report.limits.size(); ++i) {
    for (std::size_t j = i + 1; j < report.limits.size(); ++j) {
      if (report.limits[i] && report.limits[j]) {
        const double m = space.distance(*report.limits[i], *report.limits[j]).modulus();
        report.pairwise.push_back({i, j, m});
        report.max_pairwise = std::max(report.max_pairwise, m);
      }
    }
  }
  report.unique_consistent = all_converged && report.max_pairwise < merge_tol;
  return report;
}

/// Writes a trace as CSV with columns n, step_norm, gamma_value. Row n is the
/// 1-based step index; the gamma column is empty on the first row and whenever
/// no rate function was supplied. Numbers are printed with full round-trip
/// precision so identical traces serialize identically.
template <typename P>
void write_trace_csv(const IterationTrace<P>& trace, std::ostream& out) {
  out << "n,step_norm,gamma_value\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.step_norms.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,", i + 1, trace.step_norms[i]);
    out << buf;
    if (i >= 1 && i - 1 < trace.gamma_values.size()) {
      std::snprintf(buf, sizeof(buf), "%.17g", trace.gamma_values[i - 1]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace cvfix
