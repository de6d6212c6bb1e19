#include "rssidoa/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rssidoa/error.hpp"

namespace rssidoa {

namespace {

constexpr double kSeriesEps = 1e-17;

// z above which the Hankel expansion is used, given 4 nu^2.
bool use_asymptotic(double four_nu2, double z) { return z > 700.0 && z > 2.0 * four_nu2; }

double log_bessel_i_hankel(double nu, double z) {
  // I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k / z^k,
  // a_k = prod_{i=1..k} (4nu^2 - (2i-1)^2) / (k! 8^k).
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * z);
    const double a = std::fabs(term);
    if (a > prev_abs) break;  // series started to diverge
    sum += term;
    if (a < kSeriesEps * std::fabs(sum)) break;
    prev_abs = a;
  }
  return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
}

double log_bessel_i_series(double nu, double z) {
  // term_j = (z/2)^(2j+nu) / (j! Gamma(j+nu+1)); ratio term_{j+1}/term_j = q / ((j+1)(j+nu+1)).
  const double half_z = 0.5 * z;
  const double q = half_z * half_z;
  const double log_half_z = std::log(half_z);

  // Largest term sits where the ratio crosses 1.
  const double peak_real = 0.5 * (-(nu + 2.0) + std::sqrt(nu * nu + 4.0 * q));
  const double peak = peak_real > 0.0 ? std::floor(peak_real) : 0.0;

  const double log_peak =
      (2.0 * peak + nu) * log_half_z - std::lgamma(peak + 1.0) - std::lgamma(peak + nu + 1.0);

  // Sum relative to the peak term.
  double sum = 1.0;
  double t = 1.0;
  for (double j = peak;; j += 1.0) {
    t *= q / ((j + 1.0) * (j + nu + 1.0));
    sum += t;
    if (t < kSeriesEps * sum) break;
  }
  t = 1.0;
  for (double j = peak; j > 0.0; j -= 1.0) {
    t *= (j * (j + nu)) / q;
    sum += t;
    if (t < kSeriesEps * sum) break;
  }
  return log_peak + std::log(sum);
}

}  // namespace

double log_bessel_i(double nu, double z) {
  if (!(nu >= -0.5) || !(z >= 0.0)) {
    throw Error(ErrorKind::DomainError, "log_bessel_i needs nu >= -1/2 and z >= 0");
  }
  if (z == 0.0) {
    if (nu == 0.0) return 0.0;
    if (nu > 0.0) return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::infinity();  // nu = -1/2
  }
  if (nu == -0.5) {
    // I_{-1/2}(z) = sqrt(2 / (pi z)) cosh z
    const double log_cosh = z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2;
    return 0.5 * std::log(2.0 / (std::numbers::pi * z)) + log_cosh;
  }
  if (use_asymptotic(4.0 * nu * nu, z)) return log_bessel_i_hankel(nu, z);
  return log_bessel_i_series(nu, z);
}

}  // namespace rssidoa
