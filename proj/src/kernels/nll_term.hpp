#pragma once

#include <cmath>
#include <numbers>

namespace rssidoa::detail {

inline constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 ln(2 pi)

/// One sensor's contribution to the Gaussian negative log-likelihood.
inline double nll_term(double p, double g, double ps, double s2, double k) {
  const double gps = g * ps;
  const double mu = s2 + gps;
  const double var = (2.0 / k) * (s2 * s2 + 2.0 * s2 * gps);
  const double r = p - mu;
  return kHalfLogTwoPi + 0.5 * std::log(var) + (r * r) / (2.0 * var);
}

}  // namespace rssidoa::detail
