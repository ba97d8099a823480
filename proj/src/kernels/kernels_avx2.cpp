// Compiled with -mavx2; only reached after a runtime CPU check.

#include "avglab/kernels.hpp"

#if defined(AVGLAB_HAVE_AVX2)

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "kernels_internal.hpp"

namespace avglab::kernels {
namespace {

GapExtrema gap_extrema_avx2(const double* sorted, std::size_t n) {
  const double nn = static_cast<double>(n);
  const __m256d vn = _mm256_set1_pd(nn);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d idx = _mm256_setr_pd(1.0, 2.0, 3.0, 4.0);
  __m256d vmax = _mm256_set1_pd(-2.0);
  __m256d vmin = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_loadu_pd(sorted + i);
    const __m256d upper = _mm256_div_pd(idx, vn);
    const __m256d lower = _mm256_div_pd(_mm256_sub_pd(idx, one), vn);
    vmax = _mm256_max_pd(vmax, _mm256_sub_pd(upper, u));
    vmin = _mm256_min_pd(vmin, _mm256_sub_pd(lower, u));
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double mx[4];
  alignas(32) double mn[4];
  _mm256_store_pd(mx, vmax);
  _mm256_store_pd(mn, vmin);
  double max_plus = std::fmax(std::fmax(mx[0], mx[1]), std::fmax(mx[2], mx[3]));
  double min_minus = std::fmin(std::fmin(mn[0], mn[1]), std::fmin(mn[2], mn[3]));
  for (; i < n; ++i) {
    max_plus = std::fmax(max_plus, static_cast<double>(i + 1) / nn - sorted[i]);
    min_minus = std::fmin(min_minus, static_cast<double>(i) / nn - sorted[i]);
  }
  return {max_plus, min_minus};
}

inline __m256d poly5_avx2(const double* c, __m256d z) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int j = 1; j < 6; ++j) p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c[j]));
  return p;
}

inline __m256d abs_avx2(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();
  void add(__m256d x) {
    const __m256d t = _mm256_add_pd(sum, x);
    const __m256d big_sum = _mm256_cmp_pd(abs_avx2(sum), abs_avx2(x), _CMP_GE_OQ);
    const __m256d a = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
    const __m256d b = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(b, a, big_sum));
    sum = t;
  }
  void drain(NeumaierSum& out) const {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    for (double v : s) out.add(v);
    for (double v : c) out.add(v);
  }
};

ComplexSum weyl_sum_avx2(const double* u, std::size_t n, long k) {
  const __m256d kk = _mm256_set1_pd(static_cast<double>(k));
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d two_pi = _mm256_set1_pd(6.28318530717958647692);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m128i three = _mm_set1_epi32(3);
  const __m128i bit1 = _mm_set1_epi32(1);
  const __m128i bit2 = _mm_set1_epi32(2);
  constexpr int kNearest = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;
  LaneSum re;
  LaneSum im;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(kk, _mm256_loadu_pd(u + i));
    const __m256d r = _mm256_sub_pd(t, _mm256_round_pd(t, kNearest));
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(four, r), kNearest);
    const __m256d x = _mm256_mul_pd(_mm256_sub_pd(r, _mm256_mul_pd(quarter, q)), two_pi);
    const __m256d z = _mm256_mul_pd(x, x);
    const __m256d s = _mm256_add_pd(x, _mm256_mul_pd(_mm256_mul_pd(x, z), poly5_avx2(kSinCoef, z)));
    const __m256d c = _mm256_add_pd(_mm256_sub_pd(one, _mm256_mul_pd(half, z)),
                                    _mm256_mul_pd(_mm256_mul_pd(z, z), poly5_avx2(kCosCoef, z)));
    const __m128i quad = _mm_and_si128(_mm256_cvtpd_epi32(q), three);
    const __m256d swap =
        _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_and_si128(quad, bit1), bit1)));
    const __m256d neg_cos = _mm256_castsi256_pd(
        _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_and_si128(_mm_add_epi32(quad, bit1), bit2), bit2)));
    const __m256d neg_sin =
        _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_and_si128(quad, bit2), bit2)));
    __m256d cs = _mm256_blendv_pd(c, s, swap);
    __m256d sn = _mm256_blendv_pd(s, c, swap);
    cs = _mm256_xor_pd(cs, _mm256_and_pd(neg_cos, sign));
    sn = _mm256_xor_pd(sn, _mm256_and_pd(neg_sin, sign));
    re.add(cs);
    im.add(sn);
  }
  NeumaierSum re_total;
  NeumaierSum im_total;
  re.drain(re_total);
  im.drain(im_total);
  const double kd = static_cast<double>(k);
  for (; i < n; ++i) {
    const double t = kd * u[i];
    double c = 0.0;
    double s = 0.0;
    sincos_turns(t - std::nearbyint(t), c, s);
    re_total.add(c);
    im_total.add(s);
  }
  return {re_total.value(), im_total.value()};
}

std::size_t count_below_avx2(const double* u, std::size_t n, double threshold) {
  const __m256d thr = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lt = _mm256_cmp_pd(_mm256_loadu_pd(u + i), thr, _CMP_LT_OQ);
    count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(lt))));
  }
  for (; i < n; ++i) count += u[i] < threshold ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, &gap_extrema_avx2, &weyl_sum_avx2, &count_below_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace avglab::kernels

#else

namespace avglab::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace avglab::kernels

#endif
