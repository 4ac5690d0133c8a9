#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recnet/feedforward.hpp"
#include "recnet/matrix.hpp"

namespace recnet {

/// Architecture of the recurrent class F(k, K1, K2, L1, L2).
///
/// Layers 1..l1 form block H (width k1), layers l1+1..l1+l2 form block G
/// (width k2). Layer 1 and layer l1+1 additionally receive the layer-l1
/// activations of the previous time step.
struct NetConfig {
  std::size_t k = 1;   // past time steps; the network reads k + 1 inputs
  std::size_t d = 1;   // input dimension per step
  std::size_t k1 = 1;  // width of block H
  std::size_t k2 = 1;  // width of block G
  std::size_t l1 = 1;  // depth of block H
  std::size_t l2 = 1;  // depth of block G
  // Adds a bias column to every layer above the first (a constant-one channel).
  bool hidden_bias = false;

  std::size_t layers() const noexcept { return l1 + l2; }
  std::size_t window_size() const noexcept { return (k + 1) * d; }
  // Rows of the weight matrix feeding layer `layer` (1-based).
  std::size_t width(std::size_t layer) const noexcept { return layer <= l1 ? k1 : k2; }
  // Throws ConfigError when any integer field is zero.
  void validate() const;

  bool operator==(const NetConfig&) const = default;
};

/// Post-activation values f_j^{(l)}(t) for t = 1..k+1 and l = 1..L.
struct ActivationTrace {
  std::vector<std::vector<std::vector<double>>> values;  // [t-1][l-1][j]

  const std::vector<double>& at(std::size_t t, std::size_t layer) const {
    return values.at(t - 1).at(layer - 1);
  }
};

struct ForwardResult {
  double output = 0.0;
  ActivationTrace trace;
};

/// One member of F(k, K1, K2, L1, L2): shared weights for every time step.
///
/// layer1_w is k1 x (d + 1) with column 0 the bias. hidden_w[i] feeds layer
/// i + 2 and is rows x (in + b) where b = 1 if hidden_bias (bias in column 0).
/// rec_w_layer1 (k1 x k1) and rec_w_bridge (k2 x k1) read the previous step's
/// layer-l1 activations into layers 1 and l1 + 1.
class RecurrentNetwork {
 public:
  RecurrentNetwork(NetConfig config, Matrix layer1_w, std::vector<Matrix> hidden_w,
                   Matrix rec_w_layer1, Matrix rec_w_bridge, std::vector<double> output_w);

  static RecurrentNetwork zeros(const NetConfig& config);
  static RecurrentNetwork from_parameters(const NetConfig& config, std::span<const double> theta);

  const NetConfig& config() const noexcept { return config_; }
  const Matrix& layer1_w() const noexcept { return layer1_w_; }
  const std::vector<Matrix>& hidden_w() const noexcept { return hidden_w_; }
  // Matrix feeding layer `layer` >= 2.
  const Matrix& hidden(std::size_t layer) const { return hidden_w_.at(layer - 2); }
  const Matrix& rec_w_layer1() const noexcept { return rec_w_layer1_; }
  const Matrix& rec_w_bridge() const noexcept { return rec_w_bridge_; }
  const std::vector<double>& output_w() const noexcept { return output_w_; }

  /// Flattened parameters in the order layer1_w, hidden_w[0..], rec_w_layer1,
  /// rec_w_bridge, output_w; matrices row-major.
  std::vector<double> parameters() const;

  bool operator==(const RecurrentNetwork&) const = default;

 private:
  NetConfig config_;
  Matrix layer1_w_;
  std::vector<Matrix> hidden_w_;
  Matrix rec_w_layer1_;
  Matrix rec_w_bridge_;
  std::vector<double> output_w_;
};

// Shape (rows, cols) of the weight matrix feeding `layer` >= 2.
struct MatrixShape {
  std::size_t rows;
  std::size_t cols;
};
MatrixShape hidden_shape(const NetConfig& config, std::size_t layer);

inline double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

// T_beta z = min(max(z, -beta), beta).
inline double truncate(double z, double beta) noexcept {
  return z < -beta ? -beta : (z > beta ? beta : z);
}

/// Evaluates the network on one window of k + 1 inputs, oldest first
/// (window[(t-1)*d + i] is component i of x_t). Recurrent terms are skipped at
/// t = 1. Throws ConfigError on a length mismatch.
ForwardResult forward(const RecurrentNetwork& net, std::span<const double> window);

/// Rewrites the network as a (k+1)(L1+L2)-layer feedforward net on the
/// concatenated window. The output matches forward() bit for bit.
///
/// Unfolded layer (t, l) holds, in this neuron order:
///   - the live block activations f^{(l)}(t) (block G only at t = k+1),
///   - sigma(x), sigma(-x) pairs for every input x_u with u > t not yet read,
///   - a copy of f^{(L1)}(t) through block G of steps t <= k, and a copy of
///     f^{(L1)}(k) through block H of step k+1.
/// Pass-through neurons use unit weights on nonnegative values, so they are
/// exact. Block G outputs of steps t <= k never reach the read-out and are not
/// materialised. Width is max(K1 + 2dk, 2 K1, K2).
FeedforwardNet unfold(const RecurrentNetwork& net);

std::size_t unfolded_width(const NetConfig& config) noexcept;

/// Number of free (time-shared) parameters; equals parameters().size().
std::size_t count_distinct_weights(const NetConfig& config);

}  // namespace recnet
