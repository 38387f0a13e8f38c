// NEON (aarch64, float64x2_t) variants.

#include "igh/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace igh::simd {
namespace {

inline float64x2_t exp2v(float64x2_t x) {
  const float64x2_t lo = vdupq_n_f64(-708.0);
  const float64x2_t hi = vdupq_n_f64(709.0);
  const uint64x2_t under = vcltq_f64(x, lo);
  const uint64x2_t over = vcgtq_f64(x, hi);
  x = vminq_f64(vmaxq_f64(x, lo), hi);

  const float64x2_t n = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634)));
  float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(6.93147180369123816490e-01));
  r = vfmsq_f64(r, n, vdupq_n_f64(1.90821492927058770002e-10));

  static constexpr double coeff[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                     1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                     1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                     1.0 / 24.0,         1.0 / 6.0,         0.5,
                                     1.0,                1.0};
  float64x2_t p = vdupq_n_f64(coeff[0]);
  for (int i = 1; i < 14; ++i) p = vfmaq_f64(vdupq_n_f64(coeff[i]), p, r);

  int64x2_t k = vcvtq_s64_f64(n);
  k = vshlq_n_s64(vaddq_s64(k, vdupq_n_s64(1023)), 52);
  float64x2_t result = vmulq_f64(p, vreinterpretq_f64_s64(k));
  result = vbslq_f64(under, vdupq_n_f64(0.0), result);
  result = vbslq_f64(over, vdupq_n_f64(HUGE_VAL), result);
  return result;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i];
  return s;
}

double max_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(-HUGE_VAL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(x + i));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_neon(const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vld1q_f64(c + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double dot4_neon(const double* a, const double* b, const double* c, const double* d,
                 std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t abc =
        vmulq_f64(vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vld1q_f64(c + i));
    acc = vfmaq_f64(acc, abc, vld1q_f64(d + i));
  }
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i] * c[i] * d[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void exp_affine_neon(const double* x, double a, double b, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, exp2v(vfmaq_f64(va, vb, vld1q_f64(x + i))));
  for (; i < n; ++i) out[i] = std::exp(a + b * x[i]);
}

double exp_sum_neon(const double* x, double shift, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(shift);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, exp2v(vsubq_f64(vld1q_f64(x + i), vs)));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += std::exp(x[i] - shift);
  return s;
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{sum_neon,  max_neon,        dot_neon,
                                 dot3_neon, dot4_neon,       axpy_neon,
                                 exp_affine_neon, exp_sum_neon};
  return table;
}

}  // namespace igh::simd

#endif
