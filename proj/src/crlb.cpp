#include "rssidoa/crlb.hpp"

#include <limits>

#include "rssidoa/error.hpp"

namespace rssidoa {

namespace {

CrlbReport fisher_unchecked(const PowerPattern& pattern, const SignalParams& params, std::size_t k) {
  if (!(params.sigma2 > 0.0)) throw Error(ErrorKind::DomainError, "sigma2 must be > 0");
  if (!(params.ps >= 0.0)) throw Error(ErrorKind::DomainError, "ps must be >= 0");
  if (k < 1) throw Error(ErrorKind::InvalidK, "samples per block must be >= 1");

  const double kd = static_cast<double>(k);
  const double s2 = params.sigma2;
  CrlbReport r;
  r.theta_deg = params.theta_deg;
  r.per_sensor_terms.resize(pattern.num_sensors());
  for (std::size_t m = 0; m < pattern.num_sensors(); ++m) {
    const double g = gain_at(pattern, m, params.theta_deg);
    const double dg = gain_derivative(pattern, m, params.theta_deg);
    const double var = (2.0 / kd) * (s2 * s2 + 2.0 * s2 * g * params.ps);
    const double dmu = params.ps * dg;
    const double dvar = (4.0 * s2 * params.ps / kd) * dg;
    const double term = (dvar * dvar) / (2.0 * var * var) + (dmu * dmu) / var;
    r.per_sensor_terms[m] = term;
    r.fisher_11 += term;
  }
  if (r.fisher_11 <= kSingularInformation) {
    r.singular = true;
    r.crlb = std::numeric_limits<double>::infinity();
  } else {
    r.crlb = 1.0 / r.fisher_11;
  }
  return r;
}

}  // namespace

CrlbReport fisher_theta(const PowerPattern& pattern, const SignalParams& params, std::size_t k) {
  CrlbReport r = fisher_unchecked(pattern, params, k);
  if (r.singular) {
    throw Error(ErrorKind::SingularInformation,
                "azimuth information vanishes at " + std::to_string(params.theta_deg) + " deg");
  }
  return r;
}

std::vector<CrlbReport> crlb_sweep(const PowerPattern& pattern, const SignalParams& params_template,
                                   std::size_t k, std::span<const double> angles_deg) {
  if (angles_deg.empty()) throw Error(ErrorKind::TooFewPoints, "crlb sweep needs angles");
  std::vector<CrlbReport> out;
  out.reserve(angles_deg.size());
  for (double a : angles_deg) {
    SignalParams p = params_template;
    p.theta_deg = a;
    out.push_back(fisher_unchecked(pattern, p, k));
  }
  return out;
}

}  // namespace rssidoa
