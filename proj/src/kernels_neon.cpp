#include "recnet/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace recnet::kernels {
namespace {

// Two float64x2 registers stand in for the four reduction stripes.

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void relu_neon(double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(y + i);
    const uint64x2_t m = vcgtq_f64(v, zero);
    vst1q_f64(y + i, vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(v), m)));
  }
  for (; i < n; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

void mask_positive_neon(double* delta, const double* act, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t m = vcgtq_f64(vld1q_f64(act + i), zero);
    const uint64x2_t d = vreinterpretq_u64_f64(vld1q_f64(delta + i));
    vst1q_f64(delta + i, vreinterpretq_f64_u64(vandq_u64(d, m)));
  }
  for (; i < n; ++i) delta[i] = act[i] > 0.0 ? delta[i] : 0.0;
}

double finish(float64x2_t lo, float64x2_t hi, std::size_t i, std::size_t n, const double* x,
              const double* y) {
  double s[4];
  vst1q_f64(s, lo);
  vst1q_f64(s + 2, hi);
  for (; i < n; ++i) s[i % 4] = s[i % 4] + (y != nullptr ? x[i] * y[i] : x[i]);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  return finish(lo, hi, i, n, x, y);
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  return finish(lo, hi, i, n, x, nullptr);
}

constexpr KernelTable kNeon{"neon", axpy_neon, relu_neon, mask_positive_neon, dot_neon,
                            sum_neon};

}  // namespace

const KernelTable* neon() { return &kNeon; }

}  // namespace recnet::kernels

#else

namespace recnet::kernels {
const KernelTable* neon() { return nullptr; }
}  // namespace recnet::kernels

#endif
