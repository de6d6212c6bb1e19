#include <cmath>

#include "nll_term.hpp"
#include "rssidoa/kernels/kernels.hpp"

namespace rssidoa::kernels::scalar {

double mean_square(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return x.empty() ? 0.0 : sum / static_cast<double>(x.size());
}

void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out) {
  const std::size_t m_count = in.gains.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double total = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      total += detail::nll_term(in.p_r[m], in.gains[m], ps[i], sigma2[i], in.k);
    }
    out[i] = total;
  }
}

void log_batch(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i]);
}

}  // namespace rssidoa::kernels::scalar
