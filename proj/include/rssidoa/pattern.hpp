#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rssidoa/periodic_spline.hpp"

namespace rssidoa {

/// One ESD-gun trial: the reading of one sensor for one calibration shot.
struct CalibrationRecord {
  double angle_deg = 0.0;
  std::size_t sensor_index = 0;
  std::size_t trial_index = 0;
  double rssi = 0.0;
};

/// Normalized per-sensor received power versus source azimuth.
///
/// Holds the averaged calibration matrix (knots x sensors, globally scaled so
/// its largest entry is exactly 1) and one periodic cubic spline per sensor
/// that extends the knot values to a continuous, differentiable g_m(theta).
/// Immutable once built; safe to share across threads.
class PowerPattern {
 public:
  PowerPattern() = default;

  /// Validates and fits splines. `gains` is row-major (knot, sensor) and must
  /// already be normalized: every entry in [0, 1] and the maximum exactly 1.
  static PowerPattern from_normalized_gains(std::vector<double> knot_angles_deg,
                                            std::size_t num_sensors, std::vector<double> gains);

  std::size_t num_sensors() const { return num_sensors_; }
  std::size_t num_knots() const { return knots_.size(); }
  const std::vector<double>& knot_angles_deg() const { return knots_; }
  /// Row-major (knot, sensor).
  const std::vector<double>& gains() const { return gains_; }
  double gain_at_knot(std::size_t knot, std::size_t sensor) const {
    return gains_[knot * num_sensors_ + sensor];
  }
  const PeriodicCubicSpline& spline(std::size_t sensor) const { return splines_[sensor]; }

  /// Unclamped spline value; gain_at() is the clamped public query.
  double raw_gain(std::size_t sensor, double angle_deg) const;

  /// All sensor gains at one azimuth, clamped to >= 0.
  void gains_at(double angle_deg, std::span<double> out) const;

 private:
  std::vector<double> knots_;
  std::size_t num_sensors_ = 0;
  std::vector<double> gains_;
  std::vector<PeriodicCubicSpline> splines_;
};

/// Average trials per (angle, sensor) cell, normalize by the global maximum,
/// and fit the per-sensor periodic splines.
///
/// Trial means are computed on sorted values with compensated summation, so
/// reordering the records never changes a bit of the result.
PowerPattern build_pattern(std::span<const CalibrationRecord> records);

/// Spline value at `angle_deg` (reduced mod 360), clamped at zero.
double gain_at(const PowerPattern& pattern, std::size_t sensor, double angle_deg);

/// d g_m / d theta per degree, from the unclamped spline.
double gain_derivative(const PowerPattern& pattern, std::size_t sensor, double angle_deg);

/// CSV with header `angle_deg,sensor_index,trial_index,rssi`.
std::vector<CalibrationRecord> read_calibration_csv(std::istream& in);
void write_calibration_csv(std::ostream& out, std::span<const CalibrationRecord> records);

/// JSON document with keys knot_angles_deg, num_sensors, gains (row-major).
std::string pattern_to_json(const PowerPattern& pattern);
PowerPattern pattern_from_json(const std::string& text);

}  // namespace rssidoa
