#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvfix/complex_scalar.hpp"

namespace cvfix {

/// Which contraction family a coefficient triple feeds. The sum form pairs
/// with the additive contraction bound (and the pointwise hypothesis
/// lambda1 + 2*lambda2 + 2*lambda3 < 1); the rational form pairs with the
/// quotient bound (hypothesis lambda1 + lambda2 + lambda3 < 1).
enum class TripleKind { SumForm, RationalForm };

inline const char* to_string(TripleKind k) {
  return k == TripleKind::SumForm ? "sum" : "rational";
}

/// Three coefficient functions on the nonnegative quadrant of the complex
/// plane. Each evaluation is range-checked into [0, 1); user-supplied closures
/// must be pure and reentrant.
class CoefficientTriple {
 public:
  using LambdaFn = std::function<double(const ComplexScalar&, const ComplexScalar&)>;

  CoefficientTriple(LambdaFn l1, LambdaFn l2, LambdaFn l3, TripleKind kind)
      : l1_(std::move(l1)), l2_(std::move(l2)), l3_(std::move(l3)), kind_(kind) {
    if (!l1_ || !l2_ || !l3_) {
      throw std::invalid_argument("CoefficientTriple: all three coefficient functions required");
    }
  }

  /// Constant coefficients. Values must already lie in [0, 1).
  static CoefficientTriple constants(double c1, double c2, double c3, TripleKind kind) {
    for (double c : {c1, c2, c3}) {
      if (!(c >= 0.0 && c < 1.0)) {
        throw std::invalid_argument("CoefficientTriple::constants: values must lie in [0, 1)");
      }
    }
    auto lift = [](double c) {
      return [c](const ComplexScalar&, const ComplexScalar&) { return c; };
    };
    return CoefficientTriple(lift(c1), lift(c2), lift(c3), kind);
  }

  /// Coefficients that decay with the argument magnitudes:
  /// lambda_i(x, y) = c_i / (1 + |x| + |y|). Peak value c_i is attained at the
  /// origin, so the same [0, 1) constraint applies to the c_i.
  static CoefficientTriple modulus_decaying(double c1, double c2, double c3, TripleKind kind) {
    for (double c : {c1, c2, c3}) {
      if (!(c >= 0.0 && c < 1.0)) {
        throw std::invalid_argument(
            "CoefficientTriple::modulus_decaying: peak values must lie in [0, 1)");
      }
    }
    auto decay = [](double c) {
      return [c](const ComplexScalar& x, const ComplexScalar& y) {
        return c / (1.0 + x.modulus() + y.modulus());
      };
    };
    return CoefficientTriple(decay(c1), decay(c2), decay(c3), kind);
  }

  double lambda1(const ComplexScalar& x, const ComplexScalar& y) const { return eval(l1_, 1, x, y); }
  double lambda2(const ComplexScalar& x, const ComplexScalar& y) const { return eval(l2_, 2, x, y); }
  double lambda3(const ComplexScalar& x, const ComplexScalar& y) const { return eval(l3_, 3, x, y); }

  TripleKind kind() const { return kind_; }

 private:
  static double eval(const LambdaFn& fn, int which, const ComplexScalar& x,
                     const ComplexScalar& y) {
    const double v = fn(x, y);
    if (!(v >= 0.0 && v < 1.0)) {
      throw std::domain_error("coefficient lambda" + std::to_string(which) + " returned " +
                              std::to_string(v) + " outside [0, 1) at x=" + to_string(x) +
                              ", y=" + to_string(y));
    }
    return v;
  }

  LambdaFn l1_, l2_, l3_;
  TripleKind kind_;
};

/// The derived decrease-rate function. Always built from a triple (never
/// user-supplied directly) so the algebraic link between the rate and the
/// coefficients stays intact; the two factory functions below pick the
/// formula matching the triple's kind.
class GammaFunction {
 public:
  double operator()(const ComplexScalar& x, const ComplexScalar& y) const {
    const double l1 = triple_.lambda1(x, y);
    const double l2 = triple_.lambda2(x, y);
    const double l3 = triple_.lambda3(x, y);
    const double denom = 1.0 - l2 - l3;
    if (denom <= 0.0) {
      throw std::domain_error("gamma denominator 1 - lambda2 - lambda3 = " +
                              std::to_string(denom) + " is not positive at x=" + to_string(x) +
                              ", y=" + to_string(y));
    }
    const double numer = kind_ == TripleKind::SumForm ? l1 + l2 + l3 : l1;
    return numer / denom;
  }

  TripleKind kind() const { return kind_; }
  const CoefficientTriple& parent() const { return triple_; }

 private:
  friend GammaFunction gamma_sum_form(const CoefficientTriple&);
  friend GammaFunction gamma_rational_form(const CoefficientTriple&);

  GammaFunction(CoefficientTriple triple, TripleKind kind)
      : triple_(std::move(triple)), kind_(kind) {}

  CoefficientTriple triple_;
  TripleKind kind_;
};

/// gamma(x, y) = (l1 + l2 + l3) / (1 - l2 - l3), for sum-form triples.
inline GammaFunction gamma_sum_form(const CoefficientTriple& triple) {
  if (triple.kind() != TripleKind::SumForm) {
    throw std::invalid_argument("gamma_sum_form requires a sum-form triple");
  }
  return GammaFunction(triple, TripleKind::SumForm);
}

/// gamma(x, y) = l1 / (1 - l2 - l3), for rational-form triples.
inline GammaFunction gamma_rational_form(const CoefficientTriple& triple) {
  if (triple.kind() != TripleKind::RationalForm) {
    throw std::invalid_argument("gamma_rational_form requires a rational-form triple");
  }
  return GammaFunction(triple, TripleKind::RationalForm);
}

/// Derives the gamma formula matching the triple's kind.
inline GammaFunction derive_gamma(const CoefficientTriple& triple) {
  return triple.kind() == TripleKind::SumForm ? gamma_sum_form(triple)
                                              : gamma_rational_form(triple);
}

/// Pointwise margins of the coefficient bound: 1 - (l1 + 2*l2 + 2*l3) for
/// sum-form triples, 1 - (l1 + l2 + l3) for rational-form ones. A nonpositive
/// margin anywhere fails the hypothesis and is listed with its witness.
struct HypothesisBoundReport {
  struct Entry {
    ComplexScalar x, y;
    double weighted_sum = 0.0;
    double margin = 0.0;
  };
  std::vector<Entry> entries;
  std::vector<std::size_t> violations;  // indices into entries with margin <= 0
  double min_margin = 1.0;
  bool passed = false;
};

inline HypothesisBoundReport check_hypothesis_bound(
    const CoefficientTriple& triple,
    const std::vector<std::pair<ComplexScalar, ComplexScalar>>& sample) {
  HypothesisBoundReport report;
  const ComplexScalar zero;
  for (const auto& [x, y] : sample) {
    if (!partial_leq(zero, x) || !partial_leq(zero, y)) {
      throw std::invalid_argument("check_hypothesis_bound: sample point (" + to_string(x) + ", " +
                                  to_string(y) + ") lies outside the nonnegative quadrant");
    }
    const double l1 = triple.lambda1(x, y);
    const double l2 = triple.lambda2(x, y);
    const double l3 = triple.lambda3(x, y);
    const double weighted =
        triple.kind() == TripleKind::SumForm ? l1 + 2.0 * l2 + 2.0 * l3 : l1 + l2 + l3;
    HypothesisBoundReport::Entry entry{x, y, weighted, 1.0 - weighted};
    if (entry.margin <= 0.0) report.violations.push_back(report.entries.size());
    report.min_margin = std::min(report.min_margin, entry.margin);
    report.entries.push_back(entry);
  }
  report.passed = report.violations.empty();
  return report;
}

/// Result of probing whether a gamma function can be *dis*qualified from the
/// admissible class: the class requires that gamma can only approach 1 along
/// argument pairs shrinking to 0. Membership is falsifiable at finite scale,
/// never provable; `counterexample_found == false` means exactly "no
/// counterexample found on these trials".
struct GammaClassReport {
  bool counterexample_found = false;
  std::size_t sequence_index = 0;  // valid only when a counterexample was found
  std::size_t tail_start = 0;
  double min_tail_gamma = 0.0;
  double min_tail_argument_size = 0.0;  // min over the tail of |x| + |y|
  std::string summary;
};

/// Scans each trial sequence's tail (its last quarter). A sequence witnesses a
/// counterexample when gamma stays above 1 - class_eps across the whole tail
/// while the argument size |x| + |y| stays above class_eps -- the rate
/// approaches 1 without the arguments approaching 0. Pair size is measured as
/// |x| + |y|.
inline GammaClassReport falsify_gamma_class(
    const GammaFunction& gamma,
    const std::vector<std::vector<std::pair<ComplexScalar, ComplexScalar>>>& trial_sequences,
    double class_eps = 1e-3) {
  GammaClassReport report;
  for (std::size_t s = 0; s < trial_sequences.size(); ++s) {
    const auto& seq = trial_sequences[s];
    if (seq.size() < 16) {
      throw std::invalid_argument("falsify_gamma_class: trial sequences need at least 16 points");
    }
    const std::size_t tail_start = seq.size() - seq.size() / 4;
    double min_gamma = 1.0;
    double min_size = 0.0;
    bool first = true;
    bool tail_qualifies = true;
    for (std::size_t n = tail_start; n < seq.size(); ++n) {
      const double g = gamma(seq[n].first, seq[n].second);
      const double size = seq[n].first.modulus() + seq[n].second.modulus();
      min_gamma = first ? g : std::min(min_gamma, g);
      min_size = first ? size : std::min(min_size, size);
      first = false;
      if (g <= 1.0 - class_eps || size <= class_eps) {
        tail_qualifies = false;
        break;
      }
    }
    if (tail_qualifies) {
      report.counterexample_found = true;
      report.sequence_index = s;
      report.tail_start = tail_start;
      report.min_tail_gamma = min_gamma;
      report.min_tail_argument_size = min_size;
      report.summary = "counterexample: sequence " + std::to_string(s) +
                       " keeps gamma > " + std::to_string(1.0 - class_eps) +
                       " with argument size > " + std::to_string(class_eps) +
                       " across its tail";
      return report;
    }
  }
  report.summary = "no counterexample found on " + std::to_string(trial_sequences.size()) +
                   " trial sequences (class membership is not provable at finite scale)";
  return report;
}

}  // namespace cvfix
