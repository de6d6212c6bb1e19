#include "rssidoa/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "golden.hpp"
#include "kernels/nll_term.hpp"
#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/kernels/kernels.hpp"
#include "rssidoa/periodic_spline.hpp"

namespace rssidoa {

namespace {

constexpr std::size_t kGridSize = 40;
constexpr double kGridLogLo = -6.0;  // decades relative to median(p_r)
constexpr double kGridLogHi = 6.0;
constexpr int kLineSearches = 60;
constexpr double kLineTolerance = 1e-9;  // in natural-log units of the parameter

struct LogGrid {
  std::array<double, kGridSize> values{};
  double log_step = 0.0;
};

const LogGrid& nuisance_grid() {
  static const LogGrid grid = [] {
    LogGrid g;
    for (std::size_t i = 0; i < kGridSize; ++i) {
      const double decade = kGridLogLo + (kGridLogHi - kGridLogLo) * static_cast<double>(i) /
                                             static_cast<double>(kGridSize - 1);
      g.values[i] = std::pow(10.0, decade);
    }
    g.log_step = (kGridLogHi - kGridLogLo) / static_cast<double>(kGridSize - 1) * std::log(10.0);
    return g;
  }();
  return grid;
}

double nll_sum(std::span<const double> p, std::span<const double> g, double ps, double s2, double k) {
  double total = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) total += detail::nll_term(p[m], g[m], ps, s2, k);
  return total;
}

double median_of(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

}  // namespace

std::size_t ObjectiveCurve::argmin() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

double neg_log_likelihood(const PowerVector& p_r, const PowerPattern& pattern,
                          const SignalParams& params, std::size_t k) {
  if (p_r.p_r.size() != pattern.num_sensors()) {
    throw Error(ErrorKind::DimensionMismatch, "power vector length differs from sensor count");
  }
  if (k != p_r.k_per_block) {
    throw Error(ErrorKind::DimensionMismatch, "k differs from the power vector's block length");
  }
  if (!(params.sigma2 > 0.0)) throw Error(ErrorKind::DomainError, "sigma2 must be > 0");
  if (!(params.ps >= 0.0)) throw Error(ErrorKind::DomainError, "ps must be >= 0");
  std::vector<double> gains(pattern.num_sensors());
  pattern.gains_at(params.theta_deg, gains);
  return nll_sum(p_r.p_r, gains, params.ps, params.sigma2, static_cast<double>(k));
}

ProfileResult profile_gains(std::span<const double> p_r, std::span<const double> gains,
                            std::size_t k) {
  if (p_r.size() != gains.size() || p_r.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "power vector and gains differ in length");
  }
  if (k < 1) throw Error(ErrorKind::InvalidK, "samples per block must be >= 1");
  double max_p = 0.0;
  for (double v : p_r) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::DomainError, "average powers must be finite and >= 0");
    }
    max_p = std::max(max_p, v);
  }
  if (max_p == 0.0) throw Error(ErrorKind::DegenerateInput, "every average power is zero");

  // Work in units of the median power so the grid is scale-free.
  double scale = median_of(p_r);
  if (scale <= 0.0) scale = max_p;
  const std::size_t m_count = p_r.size();
  std::vector<double> pn(m_count);
  for (std::size_t m = 0; m < m_count; ++m) pn[m] = p_r[m] / scale;
  const double kd = static_cast<double>(k);

  // Stage 1: exhaustive log grid.
  const LogGrid& grid = nuisance_grid();
  constexpr std::size_t kCells = kGridSize * kGridSize;
  std::array<double, kCells> cand_ps{};
  std::array<double, kCells> cand_s2{};
  std::array<double, kCells> cand_v{};
  for (std::size_t i = 0; i < kGridSize; ++i) {
    for (std::size_t j = 0; j < kGridSize; ++j) {
      cand_ps[i * kGridSize + j] = grid.values[i];
      cand_s2[i * kGridSize + j] = grid.values[j];
    }
  }
  kernels::nll_batch({gains, pn, kd}, cand_ps, cand_s2, cand_v);

  std::size_t best_cell = 0;
  for (std::size_t c = 1; c < kCells; ++c) {
    if (cand_v[c] < cand_v[best_cell]) best_cell = c;
  }
  double log_ps = std::log(cand_ps[best_cell]);
  double log_s2 = std::log(cand_s2[best_cell]);
  // Re-evaluate on the scalar path so stage 2 compares like with like.
  double best = nll_sum(pn, gains, cand_ps[best_cell], cand_s2[best_cell], kd);

  // Moment guess: weakest sensor is mostly noise, strongest sees the full signal.
  {
    const double min_p = *std::min_element(pn.begin(), pn.end());
    const double max_pn = *std::max_element(pn.begin(), pn.end());
    const double floor = grid.values.front();
    const double s2_0 = std::max(min_p, floor);
    const double ps_0 = std::max(max_pn - s2_0, floor);
    const double v0 = nll_sum(pn, gains, ps_0, s2_0, kd);
    if (v0 < best) {
      best = v0;
      log_ps = std::log(ps_0);
      log_s2 = std::log(s2_0);
    }
  }

  // Stage 2: alternating golden-section line searches in log space, each over
  // one grid step either side of the current point.
  const double half_width = grid.log_step;
  double cycle_start = best;
  for (int iter = 0; iter < kLineSearches; ++iter) {
    const bool along_ps = (iter % 2 == 0);
    const double centre = along_ps ? log_ps : log_s2;
    const double other = along_ps ? std::exp(log_s2) : std::exp(log_ps);
    const auto line = detail::golden_section(
        [&](double u) {
          return along_ps ? nll_sum(pn, gains, std::exp(u), other, kd)
                          : nll_sum(pn, gains, other, std::exp(u), kd);
        },
        centre - half_width, centre + half_width, kLineTolerance);
    if (line.f < best) {
      best = line.f;
      (along_ps ? log_ps : log_s2) = line.x;
    }
    if (!along_ps) {
      if (cycle_start - best <= 1e-14 * (1.0 + std::fabs(best))) break;
      cycle_start = best;
    }
  }

  ProfileResult out;
  out.value = best + static_cast<double>(m_count) * std::log(scale);
  out.ps_hat = std::exp(log_ps) * scale;
  out.sigma2_hat = std::exp(log_s2) * scale;
  return out;
}

ProfileResult profile_objective(const PowerVector& p_r, const PowerPattern& pattern, std::size_t k,
                                double theta_deg) {
  if (p_r.p_r.size() != pattern.num_sensors()) {
    throw Error(ErrorKind::DimensionMismatch, "power vector length differs from sensor count");
  }
  std::vector<double> gains(pattern.num_sensors());
  pattern.gains_at(theta_deg, gains);
  return profile_gains(p_r.p_r, gains, k);
}

ObjectiveCurve estimate_coarse(const PowerVector& p_r, const PowerPattern& pattern, std::size_t k,
                               const EstimatorOptions& options) {
  if (p_r.p_r.size() != pattern.num_sensors()) {
    throw Error(ErrorKind::DimensionMismatch, "power vector length differs from sensor count");
  }
  ObjectiveCurve curve;
  const std::size_t n = pattern.num_knots();
  curve.angles_deg = pattern.knot_angles_deg();
  curve.values.resize(n);
  curve.nuisance.resize(n);

  std::vector<double> gains(pattern.num_sensors());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < pattern.num_sensors(); ++m) gains[m] = pattern.gain_at_knot(i, m);
    curve.nuisance[i] = profile_gains(p_r.p_r, gains, k);
    curve.values[i] = curve.nuisance[i].value;
  }

  if (options.shared_nuisance) {
    const ProfileResult shared = curve.nuisance[curve.argmin()];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t m = 0; m < pattern.num_sensors(); ++m) gains[m] = pattern.gain_at_knot(i, m);
      curve.values[i] =
          nll_sum(p_r.p_r, gains, shared.ps_hat, shared.sigma2_hat, static_cast<double>(k));
      curve.nuisance[i] = {curve.values[i], shared.ps_hat, shared.sigma2_hat};
    }
  }
  return curve;
}

DoaEstimate refine_by_spline(const ObjectiveCurve& curve) {
  const std::size_t n = curve.angles_deg.size();
  if (n < 4) throw Error(ErrorKind::TooFewPoints, "spline refinement needs at least 4 points");
  if (curve.values.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "curve angles and values differ in length");
  }

  DoaEstimate est;
  const std::size_t coarse = curve.argmin();
  est.coarse_theta_deg = curve.angles_deg[coarse];
  if (curve.nuisance.size() == n) {
    est.ps_hat = curve.nuisance[coarse].ps_hat;
    est.sigma2_hat = curve.nuisance[coarse].sigma2_hat;
  }

  const auto [lo_it, hi_it] = std::minmax_element(curve.values.begin(), curve.values.end());
  const double spread = *hi_it - *lo_it;
  const double magnitude = std::max({1.0, std::fabs(*lo_it), std::fabs(*hi_it)});
  if (spread <= 1e-12 * magnitude) {
    est.degenerate = true;
    est.theta_deg = curve.angles_deg.front();
    est.spline_theta_deg = est.theta_deg;
    est.objective = curve.values.front();
    return est;
  }

  const PeriodicCubicSpline spline(curve.angles_deg, curve.values);

  // Scan the 1 degree grid together with the curve's own angles.
  double best_angle = curve.angles_deg[coarse];
  double best_value = curve.values[coarse];
  auto consider = [&](double a, double v) {
    if (v < best_value || (v == best_value && a < best_angle)) {
      best_value = v;
      best_angle = a;
    }
  };
  for (int deg = 0; deg < 360; ++deg) consider(deg, spline.value(deg));
  for (std::size_t i = 0; i < n; ++i) consider(curve.angles_deg[i], curve.values[i]);

  double polished_value = 0.0;
  const double polished = spline.argmin_on(best_angle - 1.0, best_angle + 1.0, polished_value);
  if (polished_value < best_value) {
    best_value = polished_value;
    best_angle = polished;
  }

  est.theta_deg = wrap_deg(best_angle);
  est.spline_theta_deg = est.theta_deg;
  est.objective = best_value;
  return est;
}

DoaEstimate estimate_from_power(const PowerVector& p_r, const PowerPattern& pattern,
                                const EstimatorOptions& options) {
  const std::size_t k = p_r.k_per_block;
  const ObjectiveCurve curve = estimate_coarse(p_r, pattern, k, options);
  DoaEstimate est = refine_by_spline(curve);
  if (!options.polish || est.degenerate) return est;

  // Widest knot gap bounds how far the spline minimum can sit from the truth.
  double max_gap = 0.0;
  const auto& knots = pattern.knot_angles_deg();
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double next = (i + 1 < knots.size()) ? knots[i + 1] : knots.front() + kFullTurnDeg;
    max_gap = std::max(max_gap, next - knots[i]);
  }
  const double half_window = 0.5 * max_gap;

  std::vector<double> gains(pattern.num_sensors());
  auto objective_at = [&](double angle) {
    pattern.gains_at(angle, gains);
    return profile_gains(p_r.p_r, gains, k).value;
  };

  const double start = est.spline_theta_deg;
  const double start_value = objective_at(start);
  const auto line = detail::golden_section(objective_at, start - half_window, start + half_window,
                                           options.polish_tolerance_deg);
  if (line.f < start_value) {
    est.theta_deg = wrap_deg(line.x);
    est.polished_objective = line.f;
  } else {
    est.theta_deg = wrap_deg(start);
    est.polished_objective = start_value;
  }
  est.polished = true;
  return est;
}

DoaEstimate estimate(const SampleBlock& block, const PowerPattern& pattern,
                     const EstimatorOptions& options) {
  if (block.num_sensors() != pattern.num_sensors()) {
    throw Error(ErrorKind::DimensionMismatch, "block sensor count differs from pattern");
  }
  return estimate_from_power(average_power(block), pattern, options);
}

}  // namespace rssidoa
