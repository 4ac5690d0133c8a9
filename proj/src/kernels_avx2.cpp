// Compiled with -mavx2 (and without -mfma); only called after a CPUID check.
#include "recnet/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace recnet::kernels {
namespace {

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void relu_avx2(double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ)));
  }
  for (; i < n; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

void mask_positive_avx2(double* delta, const double* act, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_cmp_pd(_mm256_loadu_pd(act + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(delta + i, _mm256_and_pd(_mm256_loadu_pd(delta + i), m));
  }
  for (; i < n; ++i) delta[i] = act[i] > 0.0 ? delta[i] : 0.0;
}

double reduce_lanes(__m256d acc, std::size_t tail_start, std::size_t n, const double* x,
                    const double* y) {
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t i = tail_start; i < n; ++i)
    s[i % 4] = s[i % 4] + (y != nullptr ? x[i] * y[i] : x[i]);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  return reduce_lanes(acc, i, n, x, y);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  return reduce_lanes(acc, i, n, x, nullptr);
}

constexpr KernelTable kAvx2{"avx2", axpy_avx2, relu_avx2, mask_positive_avx2, dot_avx2,
                            sum_avx2};

}  // namespace

const KernelTable* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace recnet::kernels

#else

namespace recnet::kernels {
const KernelTable* avx2() { return nullptr; }
}  // namespace recnet::kernels

#endif
