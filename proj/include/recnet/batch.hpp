#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recnet/network.hpp"

namespace recnet {

/// Batched evaluation and reverse accumulation for many windows at once.
///
/// Values are stored structure-of-arrays (one contiguous row of `batch()`
/// doubles per neuron) so the inner loops run over windows through the
/// kernels in kernels.hpp. Per window, every sum is accumulated in the same
/// order as forward(), so outputs agree with it bit for bit whichever kernel
/// set is active.
class BatchTape {
 public:
  explicit BatchTape(const NetConfig& config);

  // Rows of `windows` are oldest-first windows of length (k+1)*d.
  void load_windows(std::span<const double> windows);
  // Windows cut from a series of vectors (row-major, d per row); window b ends
  // at row newest[b] (0-based) and starts k rows earlier.
  void load_series(std::span<const double> series, std::span<const std::size_t> newest);

  void forward(const RecurrentNetwork& net);

  // d(sum_b d_output[b] * out_b)/d(theta), added into grad (parameters() order).
  // Requires a preceding forward() with the same network.
  void accumulate_gradient(const RecurrentNetwork& net, std::span<const double> d_output,
                           std::span<double> grad);

  std::size_t batch() const noexcept { return batch_; }
  std::span<const double> outputs() const noexcept { return out_; }
  // Row of input component i of x_t over the batch (t is 1-based).
  std::span<const double> input(std::size_t t, std::size_t i) const;
  // Row of neuron j of layer l at step t; block G rows exist only at t = k+1.
  std::span<const double> activation(std::size_t t, std::size_t l, std::size_t j) const;

 private:
  std::span<double> row(std::vector<double>& v, std::size_t j) {
    return {v.data() + j * batch_, batch_};
  }
  std::span<const double> row(const std::vector<double>& v, std::size_t j) const {
    return {v.data() + j * batch_, batch_};
  }
  void resize(std::size_t batch);

  NetConfig config_;
  std::size_t batch_ = 0;
  std::vector<std::vector<double>> x_;                  // [t-1], d rows
  std::vector<std::vector<std::vector<double>>> act_;  // [t-1][l-1], width rows
  std::vector<double> out_;
  // Backward scratch: post-activation gradients.
  std::vector<std::vector<double>> dh_;  // [t-1], block H layer currently processed
  std::vector<std::vector<double>> dh_top_;  // [t-1], gradient w.r.t. f^{(L1)}(t)
  std::vector<double> dg_, dg_next_;
};

/// Outputs of forward() for each row of `windows`.
std::vector<double> forward_batch(const RecurrentNetwork& net, std::span<const double> windows);

}  // namespace recnet
