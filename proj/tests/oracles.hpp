#pragma once

// Straight-line reference implementations used as test oracles. They share no
// code with the library beyond the data types.

#include <cmath>
#include <span>
#include <vector>

#include "recnet/datagen.hpp"
#include "recnet/feedforward.hpp"
#include "recnet/network.hpp"
#include "recnet/rng.hpp"

namespace oracle {

using Real = long double;

// Recurrent forward pass in long double, written from the definition:
//   f^(1)(t)    = relu(W1 [1, x_t] + R1 f^(L1)(t-1))
//   f^(l)(t)    = relu(W_l [1?, f^(l-1)(t)] (+ Rb f^(L1)(t-1) for l = L1+1))
//   out         = v . f^(L)(k+1)
// with the recurrent terms absent at t = 1.
inline Real recurrent(const recnet::RecurrentNetwork& net, std::span<const double> window) {
  const auto& c = net.config();
  std::vector<Real> top_prev;
  std::vector<Real> layer;
  for (std::size_t t = 1; t <= c.k + 1; ++t) {
    std::vector<Real> top;
    layer.assign(c.k1, 0);
    for (std::size_t j = 0; j < c.k1; ++j) {
      Real a = net.layer1_w()(j, 0);
      for (std::size_t i = 0; i < c.d; ++i) a += net.layer1_w()(j, 1 + i) * Real(window[(t - 1) * c.d + i]);
      for (std::size_t s = 0; s < top_prev.size(); ++s) a += net.rec_w_layer1()(j, s) * top_prev[s];
      layer[j] = a > 0 ? a : 0;
    }
    if (c.l1 == 1) top = layer;
    for (std::size_t l = 2; l <= c.layers(); ++l) {
      const auto& w = net.hidden(l);
      std::vector<Real> next(w.rows(), 0);
      for (std::size_t j = 0; j < w.rows(); ++j) {
        Real a = c.hidden_bias ? Real(w(j, 0)) : 0;
        for (std::size_t s = 0; s < layer.size(); ++s) a += w(j, s + (c.hidden_bias ? 1 : 0)) * layer[s];
        if (l == c.l1 + 1)
          for (std::size_t s = 0; s < top_prev.size(); ++s) a += net.rec_w_bridge()(j, s) * top_prev[s];
        next[j] = a > 0 ? a : 0;
      }
      layer = next;
      if (l == c.l1) top = layer;
    }
    top_prev = top;
  }
  Real out = 0;
  for (std::size_t j = 0; j < c.k2; ++j) out += net.output_w()[j] * layer[j];
  return out;
}

inline Real empirical_risk(const recnet::RecurrentNetwork& net, const recnet::Dataset& data) {
  const std::size_t k = data.spec.k(), d = data.spec.d();
  Real total = 0;
  for (std::size_t t = k + 1; t <= data.n; ++t) {
    std::vector<double> window;
    for (std::size_t u = t - k; u <= t; ++u)
      for (std::size_t i = 0; i < d; ++i) window.push_back(data.xs[(u - 1) * d + i]);
    const Real e = Real(data.ys[t - 1]) - recurrent(net, window);
    total += e * e;
  }
  return total / Real(data.n - k);
}

inline Real feedforward(const recnet::FeedforwardNet& net, std::span<const double> x) {
  std::vector<Real> a(x.begin(), x.end());
  for (const auto& layer : net.layers()) {
    std::vector<Real> next(layer.w.rows());
    for (std::size_t j = 0; j < next.size(); ++j) {
      Real s = layer.b[j];
      for (std::size_t i = 0; i < a.size(); ++i) s += layer.w(j, i) * a[i];
      next[j] = s > 0 ? s : 0;
    }
    a = next;
  }
  Real out = 0;
  for (std::size_t j = 0; j < a.size(); ++j) out += net.output_w()[j] * a[j];
  return out;
}

// H_k(x_k, ..., x_1) = H(x_k, H_{k-1}(x_{k-1}, ..., x_1)), H_0 = 0.
inline double hk_recursive(const recnet::ModelSpec& spec, std::span<const double> xs, std::size_t k) {
  if (k == 0) return 0.0;
  const std::size_t d = spec.d();
  return spec.h(xs.subspan((k - 1) * d, d), hk_recursive(spec, xs, k - 1));
}

inline recnet::RecurrentNetwork random_net(const recnet::NetConfig& c, recnet::CounterRng& rng,
                                           double scale = 1.0) {
  std::vector<double> theta(recnet::count_distinct_weights(c));
  for (double& v : theta) v = rng.uniform(-scale, scale);
  return recnet::RecurrentNetwork::from_parameters(c, theta);
}

inline recnet::NetConfig random_config(recnet::CounterRng& rng, std::size_t max_k = 4,
                                       std::size_t max_d = 3, std::size_t max_l = 4,
                                       std::size_t max_w = 6) {
  recnet::NetConfig c;
  c.k = 1 + rng.below(max_k);
  c.d = 1 + rng.below(max_d);
  c.l1 = 1 + rng.below(max_l);
  c.l2 = 1 + rng.below(max_l);
  c.k1 = 1 + rng.below(max_w);
  c.k2 = 1 + rng.below(max_w);
  c.hidden_bias = rng.below(2) == 1;
  return c;
}

inline recnet::FeedforwardNet random_feedforward(std::size_t input_dim, std::size_t depth,
                                                 std::size_t width, recnet::CounterRng& rng) {
  std::vector<recnet::FeedforwardNet::Layer> layers;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < depth; ++l) {
    recnet::FeedforwardNet::Layer layer{recnet::Matrix(width, in), std::vector<double>(width)};
    for (double& w : layer.w.flat()) w = rng.uniform(-1.0, 1.0);
    for (double& b : layer.b) b = rng.uniform(-0.5, 0.5);
    layers.push_back(std::move(layer));
    in = width;
  }
  std::vector<double> v(width);
  for (double& w : v) w = rng.uniform(-1.0, 1.0);
  return recnet::FeedforwardNet(input_dim, std::move(layers), std::move(v));
}

}  // namespace oracle
