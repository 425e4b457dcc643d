#include "catm/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define CATM_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#endif

#include <algorithm>
#include <cmath>

namespace catm::kernels {

#ifdef CATM_HAVE_AVX2_BUILD
namespace {

#define CATM_AVX2 __attribute__((target("avx2,fma")))

constexpr double kDbToLn = 0.23025850929940456840;

// exp(x) for |x| <= 708: range reduction by ln2 and a rational approximation
// on [-ln2/2, ln2/2]. Relative error is a few ulp.
CATM_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878E-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300E-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910E-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042E-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192E-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766E-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009E0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  x = _mm256_max_pd(_mm256_min_pd(x, _mm256_set1_pd(708.0)), _mm256_set1_pd(-708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, c1, x);
  r = _mm256_fnmadd_pd(n, c2, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(p0, rr, p1);
  px = _mm256_fmadd_pd(px, rr, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
  qx = _mm256_fmadd_pd(qx, rr, q2);
  qx = _mm256_fmadd_pd(qx, rr, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(two, e, one);

  // 2^n through the exponent field. n + 2^52 + 2^51 puts n in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ni = _mm256_castpd_si256(_mm256_add_pd(n, magic));
  ni = _mm256_sub_epi64(ni, _mm256_castpd_si256(magic));
  ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(ni));
}

CATM_AVX2 void db_to_linear_avx2(std::span<const double> db, std::span<double> out) {
  const __m256d k = _mm256_set1_pd(kDbToLn);
  std::size_t i = 0;
  for (; i + 4 <= db.size(); i += 4)
    _mm256_storeu_pd(out.data() + i, exp_pd(_mm256_mul_pd(_mm256_loadu_pd(db.data() + i), k)));
  for (; i < db.size(); ++i) out[i] = std::exp(db[i] * kDbToLn);
}

CATM_AVX2 double sum_dbm_as_mw_avx2(std::span<const double> dbm) {
  const __m256d k = _mm256_set1_pd(kDbToLn);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= dbm.size(); i += 4)
    acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(_mm256_loadu_pd(dbm.data() + i), k)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < dbm.size(); ++i) total += std::exp(dbm[i] * kDbToLn);
  return total;
}

CATM_AVX2 void logistic_waterfall_avx2(std::span<const double> x, std::span<const double> threshold,
                                       std::span<const double> slope, std::span<double> out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d lo = _mm256_set1_pd(detail::kProbFloor);
  const __m256d hi = _mm256_set1_pd(detail::kProbCeil);
  const __m256d zmax = _mm256_set1_pd(700.0);
  const __m256d zmin = _mm256_set1_pd(-700.0);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    __m256d z = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(threshold.data() + i)),
                              _mm256_loadu_pd(slope.data() + i));
    z = _mm256_max_pd(_mm256_min_pd(z, zmax), zmin);
    __m256d p = _mm256_div_pd(one, _mm256_add_pd(one, exp_pd(z)));
    p = _mm256_max_pd(_mm256_min_pd(p, hi), lo);
    _mm256_storeu_pd(out.data() + i, p);
  }
  for (; i < x.size(); ++i) {
    const double z = std::clamp((x[i] - threshold[i]) / slope[i], -700.0, 700.0);
    out[i] = std::clamp(1.0 / (1.0 + std::exp(z)), detail::kProbFloor, detail::kProbCeil);
  }
}

}  // namespace

const KernelTable* avx2() {
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{Isa::Avx2, &db_to_linear_avx2, &sum_dbm_as_mw_avx2,
                                 &logistic_waterfall_avx2};
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2() { return nullptr; }

#endif

}  // namespace catm::kernels
