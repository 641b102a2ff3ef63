// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma; it only uses
// intrinsics and plain loops so no AVX2 code leaks into shared inline symbols.

#include "kernels_internal.hpp"

#include <immintrin.h>

namespace camfis::kernels {
namespace {

constexpr double kNegInf = -__builtin_inf();

// exp for 4 doubles: Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation < 1e-17 relative) and scaling by
// 2^n split into two factors so subnormal results come out right.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d hi_limit = _mm256_set1_pd(709.782712893384);
  const __m256d lo_limit = _mm256_set1_pd(-745.1332191019412);

  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-746.0)), _mm256_set1_pd(710.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256i e1 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n1)), bias), 52);
  const __m256i e2 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n2)), bias), 52);
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, _mm256_castsi256_pd(e1)), _mm256_castsi256_pd(e2));

  result = _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_inf()), _mm256_cmp_pd(x, hi_limit, _CMP_GT_OQ));
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ));
  result = _mm256_blendv_pd(result, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return result;
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// Copies the tail (< 4 entries) into a padded block.
inline __m256d load_tail(const double* x, std::size_t count, double fill) {
  alignas(32) double block[4] = {fill, fill, fill, fill};
  for (std::size_t i = 0; i < count; ++i) block[i] = x[i];
  return _mm256_load_pd(block);
}

double max_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_set1_pd(kNegInf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(_mm256_loadu_pd(x + i), acc);
  if (i < n) acc = _mm256_max_pd(load_tail(x + i, n - i, kNegInf), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k) {
    if (lanes[k] > m) m = lanes[k];
  }
  return m;
}

void exp_sums_avx2(const double* log_w, std::size_t n, double shift, double* sum_w, double* sum_w2) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = exp4(_mm256_sub_pd(_mm256_loadu_pd(log_w + i), s));
    acc = _mm256_add_pd(acc, w);
    acc2 = _mm256_fmadd_pd(w, w, acc2);
  }
  if (i < n) {
    const __m256d w = exp4(_mm256_sub_pd(load_tail(log_w + i, n - i, kNegInf), s));
    acc = _mm256_add_pd(acc, w);
    acc2 = _mm256_fmadd_pd(w, w, acc2);
  }
  *sum_w = hsum(acc);
  *sum_w2 = hsum(acc2);
}

void weighted_sums_avx2(const double* log_w, const double* f, std::size_t n, double shift, double* sum_w,
                        double* sum_fw) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  __m256d accf = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = exp4(_mm256_sub_pd(_mm256_loadu_pd(log_w + i), s));
    acc = _mm256_add_pd(acc, w);
    accf = _mm256_fmadd_pd(_mm256_loadu_pd(f + i), w, accf);
  }
  if (i < n) {
    const __m256d w = exp4(_mm256_sub_pd(load_tail(log_w + i, n - i, kNegInf), s));
    acc = _mm256_add_pd(acc, w);
    accf = _mm256_fmadd_pd(load_tail(f + i, n - i, 0.0), w, accf);
  }
  *sum_w = hsum(acc);
  *sum_fw = hsum(accf);
}

void exp_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double block[4];
    _mm256_store_pd(block, exp4(load_tail(x + i, n - i, 0.0)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = block[k];
  }
}

inline __m256d field4(const double* values, std::size_t segments, __m256d inv_width, __m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d clamp = _mm256_set1_pd(kLogisticClamp);
  __m256d k = _mm256_set1_pd(values[0]);
  for (std::size_t j = 1; j < segments; ++j) {
    const __m256d alpha = _mm256_set1_pd(static_cast<double>(j) / static_cast<double>(segments));
    // -(x - alpha) / width
    const __m256d neg_t = _mm256_min_pd(_mm256_mul_pd(_mm256_sub_pd(alpha, x), inv_width), clamp);
    const __m256d ind = _mm256_div_pd(one, _mm256_add_pd(one, exp4(neg_t)));
    k = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(one, ind), k), _mm256_mul_pd(ind, _mm256_set1_pd(values[j])));
  }
  return k;
}

void smoothed_field_avx2(const double* values, std::size_t segments, double width, const double* xs,
                         double* out, std::size_t n) {
  const __m256d inv_width = _mm256_set1_pd(1.0 / width);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, field4(values, segments, inv_width, _mm256_loadu_pd(xs + i)));
  if (i < n) {
    alignas(32) double block[4];
    _mm256_store_pd(block, field4(values, segments, inv_width, load_tail(xs + i, n - i, 0.0)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = block[k];
  }
}

}  // namespace

namespace detail {

const KernelTable& avx2_table_unchecked() noexcept {
  static const KernelTable table{
      "avx2", max_avx2, exp_sums_avx2, weighted_sums_avx2, exp_avx2, smoothed_field_avx2,
  };
  return table;
}

}  // namespace detail
}  // namespace camfis::kernels
