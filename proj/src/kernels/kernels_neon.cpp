#include "avglab/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace avglab::kernels {
namespace {

GapExtrema gap_extrema_neon(const double* sorted, std::size_t n) {
  const double nn = static_cast<double>(n);
  const float64x2_t vn = vdupq_n_f64(nn);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t two = vdupq_n_f64(2.0);
  const double start[2] = {1.0, 2.0};
  float64x2_t idx = vld1q_f64(start);
  float64x2_t vmax = vdupq_n_f64(-2.0);
  float64x2_t vmin = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t u = vld1q_f64(sorted + i);
    vmax = vmaxq_f64(vmax, vsubq_f64(vdivq_f64(idx, vn), u));
    vmin = vminq_f64(vmin, vsubq_f64(vdivq_f64(vsubq_f64(idx, one), vn), u));
    idx = vaddq_f64(idx, two);
  }
  double max_plus = vmaxvq_f64(vmax);
  double min_minus = vminvq_f64(vmin);
  for (; i < n; ++i) {
    max_plus = std::fmax(max_plus, static_cast<double>(i + 1) / nn - sorted[i]);
    min_minus = std::fmin(min_minus, static_cast<double>(i) / nn - sorted[i]);
  }
  return {max_plus, min_minus};
}

inline float64x2_t poly5_neon(const double* c, float64x2_t z) {
  float64x2_t p = vdupq_n_f64(c[0]);
  for (int j = 1; j < 6; ++j) p = vaddq_f64(vmulq_f64(p, z), vdupq_n_f64(c[j]));
  return p;
}

struct LaneSum {
  float64x2_t sum = vdupq_n_f64(0.0);
  float64x2_t comp = vdupq_n_f64(0.0);
  void add(float64x2_t x) {
    const float64x2_t t = vaddq_f64(sum, x);
    const uint64x2_t big_sum = vcgeq_f64(vabsq_f64(sum), vabsq_f64(x));
    const float64x2_t a = vaddq_f64(vsubq_f64(sum, t), x);
    const float64x2_t b = vaddq_f64(vsubq_f64(x, t), sum);
    comp = vaddq_f64(comp, vbslq_f64(big_sum, a, b));
    sum = t;
  }
  void drain(NeumaierSum& out) const {
    out.add(vgetq_lane_f64(sum, 0));
    out.add(vgetq_lane_f64(sum, 1));
    out.add(vgetq_lane_f64(comp, 0));
    out.add(vgetq_lane_f64(comp, 1));
  }
};

ComplexSum weyl_sum_neon(const double* u, std::size_t n, long k) {
  const float64x2_t kk = vdupq_n_f64(static_cast<double>(k));
  const float64x2_t quarter = vdupq_n_f64(0.25);
  const float64x2_t four = vdupq_n_f64(4.0);
  const float64x2_t two_pi = vdupq_n_f64(6.28318530717958647692);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const int64x2_t three = vdupq_n_s64(3);
  const int64x2_t bit1 = vdupq_n_s64(1);
  const int64x2_t bit2 = vdupq_n_s64(2);
  LaneSum re;
  LaneSum im;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vmulq_f64(kk, vld1q_f64(u + i));
    const float64x2_t r = vsubq_f64(t, vrndnq_f64(t));
    const float64x2_t q = vrndnq_f64(vmulq_f64(four, r));
    const float64x2_t x = vmulq_f64(vsubq_f64(r, vmulq_f64(quarter, q)), two_pi);
    const float64x2_t z = vmulq_f64(x, x);
    const float64x2_t s = vaddq_f64(x, vmulq_f64(vmulq_f64(x, z), poly5_neon(kSinCoef, z)));
    const float64x2_t c =
        vaddq_f64(vsubq_f64(one, vmulq_f64(half, z)), vmulq_f64(vmulq_f64(z, z), poly5_neon(kCosCoef, z)));
    const int64x2_t quad = vandq_s64(vcvtq_s64_f64(q), three);
    const uint64x2_t swap = vceqq_s64(vandq_s64(quad, bit1), bit1);
    const uint64x2_t neg_cos = vceqq_s64(vandq_s64(vaddq_s64(quad, bit1), bit2), bit2);
    const uint64x2_t neg_sin = vceqq_s64(vandq_s64(quad, bit2), bit2);
    float64x2_t cs = vbslq_f64(swap, s, c);
    float64x2_t sn = vbslq_f64(swap, c, s);
    cs = vbslq_f64(neg_cos, vnegq_f64(cs), cs);
    sn = vbslq_f64(neg_sin, vnegq_f64(sn), sn);
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

std::size_t count_below_neon(const double* u, std::size_t n, double threshold) {
  const float64x2_t thr = vdupq_n_f64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vsubq_u64(acc, vcltq_f64(vld1q_f64(u + i), thr));
  }
  std::size_t count = static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1));
  for (; i < n; ++i) count += u[i] < threshold ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{Isa::neon, &gap_extrema_neon, &weyl_sum_neon, &count_below_neon};
  return &table;
}

}  // namespace avglab::kernels

#else

namespace avglab::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace avglab::kernels

#endif
