#pragma once

#include <cmath>
#include <numbers>

namespace rssidoa {

inline constexpr double kFullTurnDeg = 360.0;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Reduce an angle to [0, 360).
inline double wrap_deg(double angle_deg) {
  double r = std::fmod(angle_deg, kFullTurnDeg);
  if (r < 0.0) r += kFullTurnDeg;
  // fmod of a tiny negative value can round back up to exactly 360
  if (r >= kFullTurnDeg) r = 0.0;
  return r;
}

/// Shortest angular separation, in [0, 180].
inline double circular_distance_deg(double a_deg, double b_deg) {
  const double d = std::fabs(wrap_deg(a_deg) - wrap_deg(b_deg));
  return d > 180.0 ? kFullTurnDeg - d : d;
}

/// Signed shortest difference a - b, in (-180, 180].
inline double circular_difference_deg(double a_deg, double b_deg) {
  double d = wrap_deg(a_deg) - wrap_deg(b_deg);
  if (d > 180.0) d -= kFullTurnDeg;
  if (d <= -180.0) d += kFullTurnDeg;
  return d;
}

}  // namespace rssidoa
