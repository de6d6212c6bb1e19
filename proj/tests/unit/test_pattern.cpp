#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rssidoa/error.hpp"
#include "rssidoa/harness.hpp"
#include "rssidoa/pattern.hpp"

using namespace rssidoa;

namespace {

std::vector<CalibrationRecord> small_calibration() {
  std::vector<CalibrationRecord> r;
  const double angles[] = {0.0, 90.0, 180.0, 270.0, 315.0};
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (double a : angles)
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t t = 0; t < 4; ++t) r.push_back({a, m, t, u(gen)});
  return r;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("build_pattern averages trials and normalizes by the global max") {
  const auto recs = small_calibration();
  std::map<std::pair<double, std::size_t>, std::vector<double>> cells;
  for (const auto& r : recs) cells[{r.angle_deg, r.sensor_index}].push_back(r.rssi);
  std::map<std::pair<double, std::size_t>, double> means;
  double mx = 0.0;
  for (auto& [key, v] : cells) {
    double s = 0.0;
    for (double x : v) s += x;
    means[key] = s / v.size();
    mx = std::max(mx, means[key]);
  }
  const PowerPattern p = build_pattern(recs);
  REQUIRE(p.num_sensors() == 3);
  REQUIRE(p.num_knots() == 5);
  double got_max = 0.0;
  for (std::size_t i = 0; i < p.num_knots(); ++i)
    for (std::size_t m = 0; m < 3; ++m) {
      const double want = means[{p.knot_angles_deg()[i], m}] / mx;
      CHECK(std::fabs(p.gain_at_knot(i, m) - want) <= 1e-14);
      got_max = std::max(got_max, p.gain_at_knot(i, m));
      CHECK(std::fabs(gain_at(p, m, p.knot_angles_deg()[i]) - want) <= 1e-12);
    }
  CHECK(got_max == 1.0);
}

TEST_CASE("build_pattern does not depend on record order") {
  auto recs = small_calibration();
  const PowerPattern a = build_pattern(recs);
  std::mt19937_64 gen(5);
  std::shuffle(recs.begin(), recs.end(), gen);
  const PowerPattern b = build_pattern(recs);
  CHECK(a.gains() == b.gains());
}

TEST_CASE("build_pattern errors") {
  CHECK(kind_of([] { build_pattern({}); }) == ErrorKind::EmptyCalibration);
  auto recs = small_calibration();
  std::erase_if(recs, [](const CalibrationRecord& r) { return r.angle_deg == 90.0 && r.sensor_index == 2; });
  CHECK(kind_of([&] { build_pattern(recs); }) == ErrorKind::MissingCell);
  auto zero = small_calibration();
  for (auto& r : zero) r.rssi = 0.0;
  CHECK(kind_of([&] { build_pattern(zero); }) == ErrorKind::AllZero);
  auto few = small_calibration();
  std::erase_if(few, [](const CalibrationRecord& r) { return r.angle_deg >= 270.0; });
  CHECK(kind_of([&] { build_pattern(few); }) == ErrorKind::TooFewPoints);
  const PowerPattern p = build_pattern(small_calibration());
  CHECK(kind_of([&] { gain_at(p, 3, 10.0); }) == ErrorKind::SensorOutOfRange);
}

TEST_CASE("gain_at wraps, clamps, and its derivative matches finite differences") {
  const PowerPattern p = synth_pattern({}, default_knots());
  for (double a = 0.0; a < 360.0; a += 13.7) {
    for (std::size_t m = 0; m < 4; ++m) {
      CHECK(std::fabs(gain_at(p, m, a) - gain_at(p, m, a + 720.0)) <= 1e-12);
      CHECK(gain_at(p, m, a) >= 0.0);
      const double e = 1e-5;
      const double fd = (p.raw_gain(m, a + e) - p.raw_gain(m, a - e)) / (2 * e);
      CHECK(std::fabs(gain_derivative(p, m, a) - fd) <= 1e-7);
    }
  }
}

TEST_CASE("synthetic cardioid pattern") {
  const PowerPattern p = synth_pattern({}, default_knots());
  SyntheticPatternSpec s;
  CHECK(synthetic_gain(s, 0, 0.0) == doctest::Approx(1.0));
  CHECK(synthetic_gain(s, 0, 180.0) == doctest::Approx(0.0));
  for (double a = 1.0; a < 180.0; a += 17.0) CHECK(synthetic_gain(s, 0, a) == doctest::Approx(synthetic_gain(s, 0, -a)));
  // 18-knot spline against the closed form
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 360.0);
  double worst = 0.0, mx = 0.0;
  for (double k : default_knots())
    for (std::size_t m = 0; m < 4; ++m) mx = std::max(mx, synthetic_gain(s, m, k));
  for (int i = 0; i < 1000; ++i) {
    const double a = u(gen);
    for (std::size_t m = 0; m < 4; ++m)
      worst = std::max(worst, std::fabs(gain_at(p, m, a) - synthetic_gain(s, m, a) / mx));
  }
  CHECK(worst <= 0.01);
  CHECK_THROWS_AS(synth_pattern({1, {}, 1.0}, default_knots()), Error);
  CHECK_THROWS_AS(synth_pattern({4, {}, 0.0}, default_knots()), Error);
  const std::vector<double> three{0, 120, 240};
  CHECK_THROWS_AS(synth_pattern({}, three), Error);
}

TEST_CASE("calibration CSV and pattern JSON round trip") {
  const auto recs = synth_calibration({}, default_knots(), 3, 0.05, 9);
  std::stringstream ss;
  write_calibration_csv(ss, recs);
  const auto back = read_calibration_csv(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].angle_deg == recs[i].angle_deg);
    CHECK(back[i].sensor_index == recs[i].sensor_index);
    CHECK(back[i].rssi == recs[i].rssi);
  }
  const PowerPattern p = build_pattern(back);
  const PowerPattern q = pattern_from_json(pattern_to_json(p));
  CHECK(p.gains() == q.gains());
  CHECK(p.knot_angles_deg() == q.knot_angles_deg());

  std::stringstream bad("angle_deg,sensor_index,trial_index,rssi\n10,0,0,abc\n");
  CHECK(kind_of([&] { read_calibration_csv(bad); }) == ErrorKind::ParseError);
}
