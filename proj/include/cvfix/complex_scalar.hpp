#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cvfix {

/// A complex number carrying the componentwise partial order used by
/// complex-valued metrics: z1 <= z2 iff Re(z1) <= Re(z2) and Im(z1) <= Im(z2).
///
/// Both components are validated once, at construction; NaN and infinity never
/// enter any ordered operation. Comparisons are exact (no tolerance) -- the
/// order axioms, antisymmetry in particular, do not survive fuzzy comparison.
/// Numerical slack belongs to the layers that consume distances, not here.
class ComplexScalar {
 public:
  ComplexScalar() = default;

  ComplexScalar(double re, double im) : re_(re), im_(im) {
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw std::domain_error("ComplexScalar requires finite components, got (" +
                              std::to_string(re) + ", " + std::to_string(im) + ")");
    }
  }

  static ComplexScalar from_polar(double magnitude, double angle) {
    return ComplexScalar(magnitude * std::cos(angle), magnitude * std::sin(angle));
  }

  double re() const { return re_; }
  double im() const { return im_; }

  double modulus() const { return std::hypot(re_, im_); }

  friend bool operator==(const ComplexScalar& a, const ComplexScalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ComplexScalar& a, const ComplexScalar& b) { return !(a == b); }

  friend ComplexScalar operator+(const ComplexScalar& a, const ComplexScalar& b) {
    return ComplexScalar(a.re_ + b.re_, a.im_ + b.im_);
  }
  friend ComplexScalar operator-(const ComplexScalar& a, const ComplexScalar& b) {
    return ComplexScalar(a.re_ - b.re_, a.im_ - b.im_);
  }
  friend ComplexScalar operator-(const ComplexScalar& a) { return ComplexScalar(-a.re_, -a.im_); }

  friend ComplexScalar operator*(double s, const ComplexScalar& z) {
    return ComplexScalar(s * z.re_, s * z.im_);
  }
  friend ComplexScalar operator*(const ComplexScalar& z, double s) { return s * z; }

  friend ComplexScalar operator*(const ComplexScalar& a, const ComplexScalar& b) {
    return ComplexScalar(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
  }

  /// Complex quotient. Throws std::domain_error on an exactly zero divisor.
  friend ComplexScalar operator/(const ComplexScalar& a, const ComplexScalar& b) {
    const double denom = b.re_ * b.re_ + b.im_ * b.im_;
    if (denom == 0.0) {
      throw std::domain_error("ComplexScalar division by zero");
    }
    return ComplexScalar((a.re_ * b.re_ + a.im_ * b.im_) / denom,
                         (a.im_ * b.re_ - a.re_ * b.im_) / denom);
  }

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

/// How an ordered pair (z1, z2) sits in the componentwise partial order.
/// Exactly one tag applies to any pair; Incomparable covers every pair for
/// which z1 <= z2 fails.
enum class OrderCase {
  Equal,            // Re equal, Im equal
  RealOnlyLess,     // Re strictly less, Im equal
  ImagOnlyLess,     // Re equal, Im strictly less
  BothStrictlyLess, // both components strictly less
  Incomparable,
};

inline const char* to_string(OrderCase c) {
  switch (c) {
    case OrderCase::Equal: return "equal";
    case OrderCase::RealOnlyLess: return "real-only-less";
    case OrderCase::ImagOnlyLess: return "imag-only-less";
    case OrderCase::BothStrictlyLess: return "both-strictly-less";
    case OrderCase::Incomparable: return "incomparable";
  }
  return "unknown";
}

/// z1 <= z2 in the componentwise order. Exact comparison.
inline bool partial_leq(const ComplexScalar& z1, const ComplexScalar& z2) {
  return z1.re() <= z2.re() && z1.im() <= z2.im();
}

inline OrderCase classify(const ComplexScalar& z1, const ComplexScalar& z2) {
  if (!partial_leq(z1, z2)) return OrderCase::Incomparable;
  const bool re_eq = z1.re() == z2.re();
  const bool im_eq = z1.im() == z2.im();
  if (re_eq && im_eq) return OrderCase::Equal;
  if (!re_eq && im_eq) return OrderCase::RealOnlyLess;
  if (re_eq && !im_eq) return OrderCase::ImagOnlyLess;
  return OrderCase::BothStrictlyLess;
}

/// z1 precedes z2 and z1 != z2: at least one component strictly increases and
/// none decreases.
inline bool strict_less(const ComplexScalar& z1, const ComplexScalar& z2) {
  const OrderCase c = classify(z1, z2);
  return c == OrderCase::RealOnlyLess || c == OrderCase::ImagOnlyLess ||
         c == OrderCase::BothStrictlyLess;
}

/// Both components strictly increase. This is the strong relation used by the
/// Cauchy threshold tests: strictly_dominates(z1, z2) means z2 dominates z1 in
/// both components.
inline bool strictly_dominates(const ComplexScalar& z1, const ComplexScalar& z2) {
  return classify(z1, z2) == OrderCase::BothStrictlyLess;
}

/// z1 <= z2 up to an additive componentwise slack. Used by the verification
/// layers, never by the order predicates above.
inline bool leq_with_slack(const ComplexScalar& z1, const ComplexScalar& z2, double slack) {
  return z1.re() <= z2.re() + slack && z1.im() <= z2.im() + slack;
}

/// The unit-direction scale sqrt(1 + slope^2) * (cos(atan(slope)) + i sin(atan(slope))).
/// Computed in polar form; numerically it equals 1 + i*slope to within rounding,
/// which is what turns a real sup-norm distance into a genuinely complex metric
/// value along a fixed direction.
inline ComplexScalar complex_scale_factor(double slope) {
  if (!std::isfinite(slope)) {
    throw std::domain_error("complex_scale_factor requires a finite slope");
  }
  return ComplexScalar::from_polar(std::sqrt(1.0 + slope * slope), std::atan(slope));
}

/// Short fixed-precision rendering, for error messages and reports.
inline std::string to_string(const ComplexScalar& z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.12g, %.12g)", z.re(), z.im());
  return std::string(buf);
}

}  // namespace cvfix
