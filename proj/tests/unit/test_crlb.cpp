#include <cmath>
#include <vector>

#include "doctest.h"
#include "rssidoa/crlb.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/harness.hpp"

using namespace rssidoa;

namespace {

const PowerPattern& cardioid() {
  static const PowerPattern p = synth_pattern({}, default_knots());
  return p;
}

// Gaussian Fisher information for a scalar parameter with theta-dependent mean
// and variance, using numerically differentiated moments.
double fd_fisher(const PowerPattern& p, const SignalParams& sp, std::size_t k) {
  const double h = 1e-4;
  double info = 0.0;
  for (std::size_t m = 0; m < p.num_sensors(); ++m) {
    SignalParams a = sp, b = sp;
    a.theta_deg -= h;
    b.theta_deg += h;
    const auto ga = gaussian_moments(p, a, k, m), gb = gaussian_moments(p, b, k, m), g0 = gaussian_moments(p, sp, k, m);
    const double dmu = (gb.mu - ga.mu) / (2 * h), dvar = (gb.var - ga.var) / (2 * h);
    info += dmu * dmu / g0.var + 0.5 * dvar * dvar / (g0.var * g0.var);
  }
  return info;
}

}  // namespace

TEST_CASE("fisher_theta matches differentiated Gaussian moments") {
  const PowerPattern& p = cardioid();
  for (double a : {25.0, 80.0, 143.0, 301.0}) {
    const SignalParams sp{a, 10.0, 1.0};
    const CrlbReport r = fisher_theta(p, sp, 64);
    CHECK(r.fisher_11 == doctest::Approx(fd_fisher(p, sp, 64)).epsilon(1e-6));
    double sum = 0.0;
    for (double t : r.per_sensor_terms) sum += t;
    CHECK(sum == doctest::Approx(r.fisher_11));
    CHECK(r.crlb == doctest::Approx(1.0 / r.fisher_11));
  }
}

TEST_CASE("crlb shrinks with K and is mirror symmetric") {
  const PowerPattern& p = cardioid();
  for (double a : {40.0, 80.0, 150.0}) {
    double prev = 1e300;
    for (std::size_t k : {16u, 64u, 256u}) {
      const double c = fisher_theta(p, {a, 10.0, 1.0}, k).crlb;
      CHECK(c < prev);
      prev = c;
    }
  }
  // Boresights at 0/90/180/270 and knots symmetric about 0 -> pattern mirrors.
  const auto knots = knot_ring(0.0, 20.0);
  const PowerPattern sym = synth_pattern({}, knots);
  for (double a : {20.0, 70.0, 130.0}) {
    const double l = fisher_theta(sym, {a, 10.0, 1.0}, 64).crlb;
    const double r = fisher_theta(sym, {360.0 - a, 10.0, 1.0}, 64).crlb;
    CHECK(std::fabs(l - r) <= 1e-9 * l);
  }
}

TEST_CASE("flat pattern carries no azimuth information") {
  const std::vector<double> knots{0, 90, 180, 270};
  const PowerPattern flat = PowerPattern::from_normalized_gains(knots, 2, std::vector<double>(8, 1.0));
  CHECK_THROWS_AS(fisher_theta(flat, {10.0, 5.0, 1.0}, 16), Error);
  const std::vector<double> angles{10.0, 100.0};
  const auto sweep = crlb_sweep(flat, {0.0, 5.0, 1.0}, 16, angles);
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].singular);
  CHECK(std::isinf(sweep[1].crlb));
  CHECK_THROWS_AS(crlb_sweep(flat, {0.0, 5.0, 1.0}, 16, {}), Error);
  CHECK_THROWS_AS(fisher_theta(cardioid(), {10.0, 5.0, 0.0}, 16), Error);
}
