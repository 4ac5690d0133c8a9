#include "recnet/kernels.hpp"

namespace recnet::kernels {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void relu_scalar(double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

void mask_positive_scalar(double* delta, const double* act, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) delta[i] = act[i] > 0.0 ? delta[i] : 0.0;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) s[i % 4] = s[i % 4] + x[i] * y[i];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double sum_scalar(const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) s[i % 4] = s[i % 4] + x[i];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

constexpr KernelTable kScalar{"scalar", axpy_scalar, relu_scalar, mask_positive_scalar,
                              dot_scalar, sum_scalar};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace recnet::kernels
