#pragma once

#include <cmath>

namespace rssidoa::detail {

struct LineMin {
  double x;
  double f;
};

/// Golden-section search for a minimum of f on [lo, hi], stopping once the
/// bracket is narrower than tol. Returns the best point actually evaluated.
template <class F>
LineMin golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  LineMin best = fc <= fd ? LineMin{c, fc} : LineMin{d, fd};
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
      if (fc < best.f || (fc == best.f && c < best.x)) best = {c, fc};
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
      if (fd < best.f || (fd == best.f && d < best.x)) best = {d, fd};
    }
  }
  return best;
}

}  // namespace rssidoa::detail
