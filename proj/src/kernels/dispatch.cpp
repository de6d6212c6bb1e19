#include <cstdlib>
#include <string_view>

#include "rssidoa/kernels/kernels.hpp"

namespace rssidoa::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(RSSIDOA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa select_isa() noexcept {
  if (const char* env = std::getenv("RSSIDOA_KERNELS")) {
    if (std::string_view(env) == "scalar") return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

struct Table {
  double (*mean_square)(std::span<const double>);
  void (*nll_batch)(const NllInputs&, std::span<const double>, std::span<const double>,
                    std::span<double>);
  void (*log_batch)(std::span<const double>, std::span<double>);
};

const Table& table() noexcept {
  static const Table t = [] {
#if defined(RSSIDOA_HAVE_AVX2)
    if (select_isa() == Isa::Avx2) {
      return Table{&avx2::mean_square, &avx2::nll_batch, &avx2::log_batch};
    }
#endif
    return Table{&scalar::mean_square, &scalar::nll_batch, &scalar::log_batch};
  }();
  return t;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa isa = select_isa();
  return isa;
}

double mean_square(std::span<const double> x) { return table().mean_square(x); }

void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out) {
  table().nll_batch(in, ps, sigma2, out);
}

void log_batch(std::span<const double> x, std::span<double> out) { table().log_batch(x, out); }

}  // namespace rssidoa::kernels
