#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "recnet/feedforward.hpp"
#include "recnet/network.hpp"

namespace recnet {

using ScalarField = std::function<double(std::span<const double>)>;

/// (lip^k - 1) / (lip - 1), evaluated as 1 + lip + ... + lip^{k-1} so that
/// lip = 1 gives k.
double geometric_factor(double lip_h, std::size_t k);

/// Inputs of the error-propagation bound for the state recursion
/// z_t = h(x_t, z_{t-1}) against z^_t = h^(x_t, z^_{t-1}).
struct Lemma4Instance {
  std::size_t k = 1;
  double bound_a = 1.0;    // h maps into [-A, A], A >= 1
  double lip_g = 2.0;      // Lipschitz constant of g in z, > 1
  double lip_h = 2.0;      // Lipschitz constant of h in z, > 1
  double sup_g_err = 0.0;  // sup |g - g^| on [-2A, 2A]^{d+1}
  double sup_h_err = 0.0;  // sup |h - h^| on [-2A, 2A]^{d+1}

  bool hypothesis_holds() const { return geometric_factor(lip_h, k) * sup_h_err <= 1.0; }
};

/// sup_g_err + lip_g * geometric_factor(lip_h, k) * sup_h_err.
/// Throws PreconditionError when the fields are out of range or
/// geometric_factor * sup_h_err > 1.
double lemma4_bound(const Lemma4Instance& inst);

/// Builds a recurrent network computing g_net(x_{k+1}, z^_k) where
/// z^_t = h_net(x_t, z^_{t-1}) and z^_0 = 0.
///
/// Both nets take (x, z) with z as the last of d + 1 inputs and must have
/// uniform hidden widths K1 (h_net) and K2 (g_net). The result lies in
/// F(k, K1 + 2d, K2, depth(h_net), depth(g_net)) with hidden_bias set:
///   - block H neurons 0..K1-1 reproduce h_net's hidden layers; the z input is
///     wired through the recurrent weights, rec(j, s) = W1(j, z) * v_s with v
///     the output weights of h_net;
///   - neurons K1 + 2i, K1 + 2i + 1 carry sigma(x_i), sigma(-x_i) through
///     block H, so layer L1 + 1 recovers x_i = sigma(x_i) - sigma(-x_i);
///   - block G reproduces g_net, reading z^_k through the bridge weights.
/// Throws ConfigError on a dimension mismatch.
RecurrentNetwork embed(const FeedforwardNet& h_net, const FeedforwardNet& g_net, std::size_t k,
                       std::size_t d);

/// Point i of a Cranley-Patterson shifted Halton sequence on [-a, a]^dim.
/// The shift is derived from `seed`; prefixes are nested in the sample count.
std::vector<double> halton_point(std::size_t index, std::size_t dim, double half_width,
                                 std::uint64_t seed);

/// max |f_true - f_net| over the box corners (dim <= 16) and the first
/// `samples` Halton points of [-a, a]^dim, dim = f_net.input_dim(). This is a
/// lower bound on the sup norm. Throws PreconditionError when samples == 0.
double measure_sup_error(const ScalarField& f_true, const FeedforwardNet& f_net,
                         double box_half_width, std::size_t samples, std::uint64_t seed);

struct ApproximantConfig {
  std::vector<std::size_t> widths{8, 8};
  double box_half_width = 2.0;
  std::size_t samples = 2048;
  std::size_t steps = 3000;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

/// Least-squares ReLU approximant of f on Halton samples of the box (Adam,
/// full batch). Stands in for any externally supplied approximant.
FeedforwardNet fit_approximant(const ScalarField& f, std::size_t input_dim,
                               const ApproximantConfig& cfg);

}  // namespace recnet
