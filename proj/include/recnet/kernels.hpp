#pragma once

// Batched inner loops used by the training and evaluation paths.
//
// Every kernel exists as a scalar reference and as SIMD variants (AVX2 on
// x86-64, NEON on AArch64). Variants must produce bit-identical results to the
// scalar reference: element-wise kernels do one multiply and one add per
// element (no FMA), and reductions use a fixed four-stripe order
//
//   s[i % 4] += x[i] * y[i];   result = (s[0] + s[1]) + (s[2] + s[3])
//
// which maps directly onto four double lanes.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace recnet::kernels {

struct KernelTable {
  const char* name;
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] = y[i] > 0 ? y[i] : +0.0
  void (*relu)(double* y, std::size_t n);
  // delta[i] = act[i] > 0 ? delta[i] : +0.0
  void (*mask_positive)(double* delta, const double* act, std::size_t n);
  // four-stripe sum of x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // four-stripe sum of x[i]
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar();

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2();
const KernelTable* neon();

// All variants usable on this machine, scalar first.
std::vector<const KernelTable*> available();

// Best available variant, unless RECNET_KERNELS names another one
// ("scalar", "avx2", "neon"). Resolved once per process.
const KernelTable& active();

const KernelTable* find(std::string_view name);

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void relu(std::span<double> y) { active().relu(y.data(), y.size()); }
inline void mask_positive(std::span<double> delta, std::span<const double> act) {
  active().mask_positive(delta.data(), act.data(), delta.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

}  // namespace recnet::kernels
