#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rssidoa/pattern.hpp"
#include "rssidoa/signal_model.hpp"

namespace rssidoa {

/// Azimuth entry of the Fisher information and its reciprocal bound, with
/// theta measured in degrees (so crlb is in deg^2).
struct CrlbReport {
  double theta_deg = 0.0;
  double fisher_11 = 0.0;
  double crlb = 0.0;  ///< +inf when singular
  std::vector<double> per_sensor_terms;
  bool singular = false;
};

/// Information threshold below which the bound is reported as undefined.
inline constexpr double kSingularInformation = 1e-30;

/// Per sensor: (dvar/dtheta)^2 / (2 var^2) + (dmu/dtheta)^2 / var, where
/// dmu/dtheta = ps g' and dvar/dtheta = (4 sigma2 ps / K) g'.
/// Throws Error{SingularInformation} when the information vanishes.
CrlbReport fisher_theta(const PowerPattern& pattern, const SignalParams& params, std::size_t k);

/// fisher_theta at each angle with theta substituted into the template.
/// Singular angles come back flagged (singular = true, crlb = +inf) instead of throwing.
std::vector<CrlbReport> crlb_sweep(const PowerPattern& pattern, const SignalParams& params_template,
                                   std::size_t k, std::span<const double> angles_deg);

}  // namespace rssidoa
