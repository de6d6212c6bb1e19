#pragma once
// Reference computations used only by the tests. Deliberately naive.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline double gaussian_term(double p, double g, double ps, double s2, double k) {
  const double mu = s2 + g * ps;
  const double var = (2.0 / k) * (s2 * s2 + 2.0 * s2 * g * ps);
  return -std::log(std::exp(-(p - mu) * (p - mu) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var));
}

inline double nll(std::span<const double> p_r, std::span<const double> gains, double ps, double s2,
                  double k) {
  double s = 0.0;
  for (std::size_t m = 0; m < p_r.size(); ++m) s += gaussian_term(p_r[m], gains[m], ps, s2, k);
  return s;
}

struct GridMin {
  double value = std::numeric_limits<double>::infinity();
  double ps = 0.0;
  double s2 = 0.0;
};

// Exhaustive n x n log grid over [lo, hi] for both parameters, followed by
// further n x n grids, each spanning +-window steps of the previous level
// around its winner. The window is wide because the optimum often lies in a
// long shallow valley that the first grid only brackets loosely.
inline GridMin nested_grid(std::span<const double> p_r, std::span<const double> gains, double k,
                           double lo, double hi, int n = 200, int levels = 6, double window = 40.0) {
  auto scan = [&](double la0, double la1, double lb0, double lb1) {
    GridMin best;
    for (int i = 0; i < n; ++i) {
      const double ps = std::exp(la0 + (la1 - la0) * i / (n - 1));
      for (int j = 0; j < n; ++j) {
        const double s2 = std::exp(lb0 + (lb1 - lb0) * j / (n - 1));
        const double v = nll(p_r, gains, ps, s2, k);
        if (v < best.value) best = {v, ps, s2};
      }
    }
    return best;
  };
  double step = (std::log(hi) - std::log(lo)) / (n - 1);
  GridMin best = scan(std::log(lo), std::log(hi), std::log(lo), std::log(hi));
  for (int level = 1; level < levels; ++level) {
    const double a = std::log(best.ps), b = std::log(best.s2), w = window * step;
    const GridMin next = scan(a - w, a + w, b - w, b + w);
    if (next.value < best.value) best = next;
    step = 2.0 * w / (n - 1);
  }
  return best;
}

}  // namespace oracle
