// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cfloat>
#include <cmath>

#include "nll_term.hpp"
#include "rssidoa/kernels/kernels.hpp"

namespace rssidoa::kernels::avx2 {

namespace {

// Cephes-style natural log for positive normal doubles. Lanes outside
// [DBL_MIN, DBL_MAX] (zero, subnormal, inf, NaN) are redone with std::log.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_exp = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_exp));

  // Biased exponent to double via the 2^52 magic constant.
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)),
                            _mm256_set1_pd(4503599627370496.0));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));  // x = m * 2^e, m in [0.5, 1)

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  // f = 2m - 1 when m < sqrt(1/2), else m - 1; f in [-0.293, 0.414)
  const __m256d f = _mm256_add_pd(_mm256_sub_pd(m, one), _mm256_and_pd(below, m));

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, f, _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(f, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, f, _mm256_set1_pd(2.31251620126765340583E1));

  const __m256d z = _mm256_mul_pd(f, f);
  __m256d y = _mm256_mul_pd(f, _mm256_mul_pd(z, _mm256_div_pd(p, q)));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(f, y);
  r = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);

  const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_GE_OQ),
                                   _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MAX), _CMP_LE_OQ));
  if (_mm256_movemask_pd(ok) != 0xF) {
    alignas(32) double xs[4];
    alignas(32) double rs[4];
    _mm256_store_pd(xs, x);
    _mm256_store_pd(rs, r);
    const int okmask = _mm256_movemask_pd(ok);
    for (int lane = 0; lane < 4; ++lane) {
      if (!(okmask & (1 << lane))) rs[lane] = std::log(xs[lane]);
    }
    r = _mm256_load_pd(rs);
  }
  return r;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double mean_square(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const double* p = x.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_loadu_pd(p + i);
    const __m256d b = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  if (i + 4 <= n) {
    const __m256d a = _mm256_loadu_pd(p + i);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += p[i] * p[i];
  return sum / static_cast<double>(n);
}

void nll_batch(const NllInputs& in, std::span<const double> ps, std::span<const double> sigma2,
               std::span<double> out) {
  const std::size_t n = out.size();
  const std::size_t m_count = in.gains.size();
  const __m256d two_over_k = _mm256_set1_pd(2.0 / in.k);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d half_log_2pi = _mm256_set1_pd(detail::kHalfLogTwoPi);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vps = _mm256_loadu_pd(ps.data() + i);
    const __m256d vs2 = _mm256_loadu_pd(sigma2.data() + i);
    const __m256d s2s2 = _mm256_mul_pd(vs2, vs2);
    __m256d total = _mm256_setzero_pd();
    for (std::size_t m = 0; m < m_count; ++m) {
      const __m256d g = _mm256_set1_pd(in.gains[m]);
      const __m256d p = _mm256_set1_pd(in.p_r[m]);
      const __m256d gps = _mm256_mul_pd(g, vps);
      const __m256d mu = _mm256_add_pd(vs2, gps);
      const __m256d var =
          _mm256_mul_pd(two_over_k, _mm256_add_pd(s2s2, _mm256_mul_pd(_mm256_mul_pd(two, vs2), gps)));
      const __m256d r = _mm256_sub_pd(p, mu);
      const __m256d log_term = _mm256_fmadd_pd(half, log_pd(var), half_log_2pi);
      const __m256d quad = _mm256_div_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(two, var));
      total = _mm256_add_pd(total, _mm256_add_pd(log_term, quad));
    }
    _mm256_storeu_pd(out.data() + i, total);
  }
  for (; i < n; ++i) {
    double total = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      total += detail::nll_term(in.p_r[m], in.gains[m], ps[i], sigma2[i], in.k);
    }
    out[i] = total;
  }
}

void log_batch(std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, log_pd(_mm256_loadu_pd(x.data() + i)));
  }
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

}  // namespace rssidoa::kernels::avx2
