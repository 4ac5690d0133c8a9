#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recnet/matrix.hpp"

namespace recnet {

/// Plain ReLU multilayer network with a linear scalar read-out:
///
///   a_0 = x,  a_l = relu(W_l a_{l-1} + b_l),  out = sum_j v_j a_L[j]
///
/// Each pre-activation is accumulated as b_j, then W(j, s) * a[s] for s in
/// ascending order; the read-out starts from 0.0. There is no output bias.
class FeedforwardNet {
 public:
  struct Layer {
    Matrix w;               // out x in
    std::vector<double> b;  // out
    bool operator==(const Layer&) const = default;
  };

  FeedforwardNet() = default;
  // Throws ConfigError unless the dimensions chain: layer 0 takes input_dim
  // columns, each later layer takes the previous layer's row count, and
  // output_w matches the last layer.
  FeedforwardNet(std::size_t input_dim, std::vector<Layer> layers, std::vector<double> output_w);

  // All-zero network with the given hidden widths.
  static FeedforwardNet zeros(std::size_t input_dim, std::span<const std::size_t> widths);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t max_width() const noexcept;
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const std::vector<double>& output_w() const noexcept { return output_w_; }

  double evaluate(std::span<const double> x) const;

  // Flattened parameters: per layer w (row-major) then b, then output_w.
  std::size_t parameter_count() const noexcept;
  std::vector<double> parameters() const;
  FeedforwardNet with_parameters(std::span<const double> theta) const;

  // d(out)/d(theta) at x, in parameters() order.
  std::vector<double> parameter_gradient(std::span<const double> x) const;

  bool operator==(const FeedforwardNet&) const = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
  std::vector<double> output_w_;
};

}  // namespace recnet
