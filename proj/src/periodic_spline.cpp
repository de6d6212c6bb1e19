#include "rssidoa/periodic_spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"

namespace rssidoa {

namespace {

// Solves the cyclic tridiagonal system
//   lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]   (indices mod n)
// via Sherman-Morrison on top of the Thomas algorithm.
std::vector<double> solve_cyclic_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                             std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  const double alpha = upper[n - 1];  // bottom-left corner
  const double beta = lower[0];       // top-right corner
  const double gamma = -diag[0];

  diag[0] -= gamma;
  diag[n - 1] -= alpha * beta / gamma;

  auto thomas = [&](std::vector<double> d) {
    std::vector<double> c_prime(n), d_prime(n), x(n);
    c_prime[0] = upper[0] / diag[0];
    d_prime[0] = d[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = diag[i] - lower[i] * c_prime[i - 1];
      c_prime[i] = (i + 1 < n) ? upper[i] / m : 0.0;
      d_prime[i] = (d[i] - lower[i] * d_prime[i - 1]) / m;
    }
    x[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    return x;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;

  const std::vector<double> x = thomas(std::move(rhs));
  const std::vector<double> z = thomas(std::move(u));

  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

}  // namespace

PeriodicCubicSpline::PeriodicCubicSpline(std::span<const double> knots_deg,
                                         std::span<const double> values) {
  const std::size_t n = knots_deg.size();
  if (n != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "spline knots and values differ in length");
  }
  if (n < 4) throw Error(ErrorKind::TooFewPoints, "periodic spline needs at least 4 knots");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(knots_deg[i] >= 0.0 && knots_deg[i] < kFullTurnDeg)) {
      throw Error(ErrorKind::DomainError, "spline knot outside [0, 360)");
    }
    if (i > 0 && !(knots_deg[i] > knots_deg[i - 1])) {
      throw Error(ErrorKind::DomainError, "spline knots must be strictly increasing");
    }
    if (!std::isfinite(values[i])) throw Error(ErrorKind::DomainError, "spline value not finite");
  }

  knots_.assign(knots_deg.begin(), knots_deg.end());
  widths_.resize(n);
  for (std::size_t j = 0; j + 1 < n; ++j) widths_[j] = knots_[j + 1] - knots_[j];
  widths_[n - 1] = knots_[0] + kFullTurnDeg - knots_[n - 1];

  // Second derivatives at the knots.
  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t prev = (j + n - 1) % n;
    const std::size_t next = (j + 1) % n;
    const double h_prev = widths_[prev];
    const double h = widths_[j];
    lower[j] = h_prev;
    diag[j] = 2.0 * (h_prev + h);
    upper[j] = h;
    rhs[j] = 6.0 * ((values[next] - values[j]) / h - (values[j] - values[prev]) / h_prev);
  }
  const std::vector<double> m2 = solve_cyclic_tridiagonal(lower, diag, upper, rhs);

  pieces_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    const double h = widths_[j];
    CubicPiece& p = pieces_[j];
    p.a = values[j];
    p.b = (values[next] - values[j]) / h - h * (2.0 * m2[j] + m2[next]) / 6.0;
    p.c = 0.5 * m2[j];
    p.d = (m2[next] - m2[j]) / (6.0 * h);
  }
}

std::size_t PeriodicCubicSpline::locate(double x_deg, double& t) const {
  const double x0 = knots_.front();
  const double u = x0 + wrap_deg(x_deg - x0);  // in [x0, x0 + 360)
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  const std::size_t j = static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  t = u - knots_[j];
  return j;
}

double PeriodicCubicSpline::value(double x_deg) const {
  double t = 0.0;
  const std::size_t j = locate(x_deg, t);
  return pieces_[j].value(t);
}

double PeriodicCubicSpline::derivative(double x_deg) const {
  double t = 0.0;
  const std::size_t j = locate(x_deg, t);
  return pieces_[j].derivative(t);
}

double PeriodicCubicSpline::argmin_on(double lo_deg, double hi_deg, double& min_value) const {
  double best_x = lo_deg;
  double best_v = std::numeric_limits<double>::infinity();
  auto consider = [&](double x, double v) {
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  };

  double t_lo = 0.0;
  std::size_t j = locate(lo_deg, t_lo);
  double left = lo_deg - t_lo;  // unwrapped left knot of piece j
  const std::size_t n = pieces_.size();
  while (left < hi_deg) {
    const double a = std::max(lo_deg, left);
    const double b = std::min(hi_deg, left + widths_[j]);
    if (b >= a) {
      const CubicPiece& p = pieces_[j];
      const double t0 = a - left;
      const double t1 = b - left;
      consider(a, p.value(t0));
      // Stationary points of the piece: b + 2c t + 3d t^2 = 0.
      const double qa = 3.0 * p.d;
      const double qb = 2.0 * p.c;
      const double qc = p.b;
      double roots[2];
      int nroots = 0;
      if (qa == 0.0) {
        if (qb != 0.0) roots[nroots++] = -qc / qb;
      } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
          if (q != 0.0) {
            roots[nroots++] = q / qa;
            roots[nroots++] = qc / q;
          } else {
            roots[nroots++] = 0.0;
          }
        }
      }
      std::sort(roots, roots + nroots);
      for (int r = 0; r < nroots; ++r) {
        if (roots[r] > t0 && roots[r] < t1) consider(left + roots[r], p.value(roots[r]));
      }
      consider(b, p.value(t1));
    }
    left += widths_[j];
    j = (j + 1) % n;
  }

  min_value = best_v;
  return wrap_deg(best_x);
}

}  // namespace rssidoa
