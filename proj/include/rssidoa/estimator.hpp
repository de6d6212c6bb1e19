#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rssidoa/pattern.hpp"
#include "rssidoa/signal_model.hpp"

namespace rssidoa {

/// Objective minimized over the nuisance parameters at one fixed azimuth.
struct ProfileResult {
  double value = 0.0;
  double ps_hat = 0.0;
  double sigma2_hat = 0.0;
};

/// Profiled negative log-likelihood sampled on candidate azimuths.
struct ObjectiveCurve {
  std::vector<double> angles_deg;
  std::vector<double> values;
  std::vector<ProfileResult> nuisance;

  /// Index of the smallest value; exact ties go to the smallest angle.
  std::size_t argmin() const;
};

struct DoaEstimate {
  double theta_deg = 0.0;         ///< final azimuth in [0, 360)
  double ps_hat = 0.0;            ///< nuisance estimates at the coarse argmin
  double sigma2_hat = 0.0;
  double objective = 0.0;         ///< minimum of the interpolated objective curve
  double coarse_theta_deg = 0.0;  ///< grid argmin before refinement
  double spline_theta_deg = 0.0;  ///< argmin of the interpolated curve
  bool degenerate = false;        ///< flat curve: no directional information
  bool polished = false;          ///< theta_deg came from the profile polish
  double polished_objective = 0.0;
};

/// Knobs of the estimation pipeline. Defaults reproduce the documented method.
struct EstimatorOptions {
  /// After spline refinement, minimize the exact profiled objective over the
  /// continuous pattern within half a knot spacing of the spline minimum.
  bool polish = true;
  double polish_tolerance_deg = 1e-5;
  /// Re-use the nuisance estimates of the coarse argmin at every angle instead
  /// of profiling each angle separately.
  bool shared_nuisance = false;
};

/// Sum over sensors of the negative Gaussian log-density of P_{r,m}.
double neg_log_likelihood(const PowerVector& p_r, const PowerPattern& pattern,
                          const SignalParams& params, std::size_t k);

/// Minimize over (ps, sigma2) at a fixed azimuth.
///
/// Works in units of median(p_r): a 40 x 40 log grid spanning [1e-6, 1e6]
/// for both parameters (plus the method-of-moments guess), then up to 60
/// alternating golden-section line searches in log-parameter space.
ProfileResult profile_objective(const PowerVector& p_r, const PowerPattern& pattern, std::size_t k,
                                double theta_deg);

/// Same as profile_objective with the sensor gains supplied directly.
ProfileResult profile_gains(std::span<const double> p_r, std::span<const double> gains,
                            std::size_t k);

/// Profile at every knot angle of the pattern.
ObjectiveCurve estimate_coarse(const PowerVector& p_r, const PowerPattern& pattern, std::size_t k,
                               const EstimatorOptions& options = {});

/// Periodic cubic spline through the curve, scanned on a 1 degree grid (and the
/// curve's own angles), then minimized analytically around the best grid point.
DoaEstimate refine_by_spline(const ObjectiveCurve& curve);

/// Single-pulse pipeline: average power, coarse grid, spline refinement and,
/// when enabled, the profile polish.
DoaEstimate estimate(const SampleBlock& block, const PowerPattern& pattern,
                     const EstimatorOptions& options = {});

/// Same pipeline starting from an already averaged power vector.
DoaEstimate estimate_from_power(const PowerVector& p_r, const PowerPattern& pattern,
                                const EstimatorOptions& options = {});

}  // namespace rssidoa
