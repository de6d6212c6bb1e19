#pragma once

// Data-parallel inner loops of the estimator.
//
// Each kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64 builds, an AVX2+FMA variant in `kernels::avx2`. The unqualified
// entry points dispatch once, at first use, to the best variant the CPU
// supports. Setting RSSIDOA_KERNELS=scalar in the environment pins the
// scalar path.

#include <cstddef>
#include <span>
#include <string_view>

namespace rssidoa::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Whether this build contains the variant and the running CPU can execute it.
bool isa_available(Isa isa) noexcept;

/// The variant the dispatching entry points use.
Isa active_isa() noexcept;

/// Fixed per-angle inputs of the Gaussian negative log-likelihood.
struct NllInputs {
  std::span<const double> gains;  ///< g_m(theta), one per sensor
  std::span<const double> p_r;    ///< measured average powers, one per sensor
  double k = 1.0;                 ///< samples per block
};

/// (1/n) * sum x_i^2
double mean_square(std::span<const double> x);

/// out[i] = sum_m [ 0.5 ln(2 pi v_m) + (p_m - mu_m)^2 / (2 v_m) ] with
/// mu_m = s2 + g_m ps, v_m = (2/K)(s2^2 + 2 s2 g_m ps), for (ps, s2) = (ps[i], sigma2[i]).
void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out);

/// Natural log of each element; inputs must be positive.
void log_batch(std::span<const double> x, std::span<double> out);

namespace scalar {
double mean_square(std::span<const double> x);
void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out);
void log_batch(std::span<const double> x, std::span<double> out);
}  // namespace scalar

#if defined(RSSIDOA_HAVE_AVX2)
namespace avx2 {
double mean_square(std::span<const double> x);
void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out);
void log_batch(std::span<const double> x, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace rssidoa::kernels
