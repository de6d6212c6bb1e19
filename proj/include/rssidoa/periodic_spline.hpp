#pragma once

#include <span>
#include <vector>

namespace rssidoa {

/// Coefficients of one spline piece in local form
/// s(x) = a + b*t + c*t^2 + d*t^3 with t = x - knot.
struct CubicPiece {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double value(double t) const { return a + t * (b + t * (c + t * d)); }
  double derivative(double t) const { return b + t * (2.0 * c + 3.0 * t * d); }
};

/// Interpolating cubic spline on a circle of circumference 360 (degrees).
///
/// Knots may be unevenly spaced; the wrap interval from the last knot back to
/// the first (plus 360) is an ordinary piece. The interpolant is C2 everywhere,
/// including across the wrap.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;

  /// Knots must be strictly increasing, lie in [0, 360), and number at least 4.
  /// Throws Error{TooFewPoints} or Error{DomainError}.
  PeriodicCubicSpline(std::span<const double> knots_deg, std::span<const double> values);

  double value(double x_deg) const;
  double derivative(double x_deg) const;

  /// Index of the piece covering x, plus the local offset from its left knot.
  std::size_t locate(double x_deg, double& t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<CubicPiece>& pieces() const { return pieces_; }
  /// Width of piece j; the last piece wraps through 360.
  double width(std::size_t j) const { return widths_[j]; }

  /// Global minimum of the interpolant over [lo, hi] (degrees, hi - lo <= 360),
  /// found analytically piece by piece. Ties go to the smallest x.
  double argmin_on(double lo_deg, double hi_deg, double& min_value) const;

 private:
  std::vector<double> knots_;
  std::vector<double> widths_;
  std::vector<CubicPiece> pieces_;
};

}  // namespace rssidoa
