#include "recnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recnet/errors.hpp"

namespace recnet {

void NetConfig::validate() const {
  if (k == 0 || d == 0 || k1 == 0 || k2 == 0 || l1 == 0 || l2 == 0)
    throw ConfigError("NetConfig: k, d, k1, k2, l1 and l2 must all be >= 1");
}

MatrixShape hidden_shape(const NetConfig& c, std::size_t layer) {
  if (layer < 2 || layer > c.layers()) throw ConfigError("hidden_shape: layer out of range");
  const std::size_t in = layer <= c.l1 + 1 ? c.k1 : c.k2;
  return {c.width(layer), in + (c.hidden_bias ? 1 : 0)};
}

namespace {

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ConfigError(std::string("RecurrentNetwork: ") + what + " should be " +
                      std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void expect_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw ConfigError(std::string("RecurrentNetwork: non-finite weight in ") + what);
}

}  // namespace

RecurrentNetwork::RecurrentNetwork(NetConfig config, Matrix layer1_w, std::vector<Matrix> hidden_w,
                                   Matrix rec_w_layer1, Matrix rec_w_bridge,
                                   std::vector<double> output_w)
    : config_(config),
      layer1_w_(std::move(layer1_w)),
      hidden_w_(std::move(hidden_w)),
      rec_w_layer1_(std::move(rec_w_layer1)),
      rec_w_bridge_(std::move(rec_w_bridge)),
      output_w_(std::move(output_w)) {
  config_.validate();
  expect_shape(layer1_w_, config_.k1, config_.d + 1, "layer1_w");
  if (hidden_w_.size() != config_.layers() - 1)
    throw ConfigError("RecurrentNetwork: expected " + std::to_string(config_.layers() - 1) +
                      " hidden matrices");
  for (std::size_t l = 2; l <= config_.layers(); ++l) {
    const auto shape = hidden_shape(config_, l);
    expect_shape(hidden_w_[l - 2], shape.rows, shape.cols, "hidden_w");
  }
  expect_shape(rec_w_layer1_, config_.k1, config_.k1, "rec_w_layer1");
  expect_shape(rec_w_bridge_, config_.k2, config_.k1, "rec_w_bridge");
  if (output_w_.size() != config_.k2) throw ConfigError("RecurrentNetwork: output_w length");

  expect_finite(layer1_w_.flat(), "layer1_w");
  for (const auto& m : hidden_w_) expect_finite(m.flat(), "hidden_w");
  expect_finite(rec_w_layer1_.flat(), "rec_w_layer1");
  expect_finite(rec_w_bridge_.flat(), "rec_w_bridge");
  expect_finite(output_w_, "output_w");
}

RecurrentNetwork RecurrentNetwork::zeros(const NetConfig& c) {
  c.validate();
  std::vector<Matrix> hidden;
  for (std::size_t l = 2; l <= c.layers(); ++l) {
    const auto shape = hidden_shape(c, l);
    hidden.emplace_back(shape.rows, shape.cols);
  }
  return RecurrentNetwork(c, Matrix(c.k1, c.d + 1), std::move(hidden), Matrix(c.k1, c.k1),
                          Matrix(c.k2, c.k1), std::vector<double>(c.k2, 0.0));
}

RecurrentNetwork RecurrentNetwork::from_parameters(const NetConfig& c,
                                                   std::span<const double> theta) {
  if (theta.size() != count_distinct_weights(c))
    throw ConfigError("RecurrentNetwork: parameter vector has length " +
                      std::to_string(theta.size()) + ", expected " +
                      std::to_string(count_distinct_weights(c)));
  RecurrentNetwork net = zeros(c);
  auto it = theta.begin();
  auto take = [&it](std::span<double> dst) {
    std::copy_n(it, dst.size(), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(net.layer1_w_.flat());
  for (auto& m : net.hidden_w_) take(m.flat());
  take(net.rec_w_layer1_.flat());
  take(net.rec_w_bridge_.flat());
  take(net.output_w_);
  expect_finite(theta, "parameter vector");
  return net;
}

std::vector<double> RecurrentNetwork::parameters() const {
  std::vector<double> theta;
  theta.reserve(count_distinct_weights(config_));
  auto put = [&theta](std::span<const double> src) {
    theta.insert(theta.end(), src.begin(), src.end());
  };
  put(layer1_w_.flat());
  for (const auto& m : hidden_w_) put(m.flat());
  put(rec_w_layer1_.flat());
  put(rec_w_bridge_.flat());
  put(output_w_);
  return theta;
}

std::size_t count_distinct_weights(const NetConfig& c) {
  c.validate();
  const std::size_t b = c.hidden_bias ? 1 : 0;
  std::size_t n = c.k1 * (c.d + 1);
  n += (c.l1 - 1) * c.k1 * (c.k1 + b);  // block H, layers 2..L1
  n += c.k2 * (c.k1 + b);               // layer L1 + 1
  n += (c.l2 - 1) * c.k2 * (c.k2 + b);  // block G, layers L1+2..L
  n += c.k1 * c.k1 + c.k2 * c.k1;       // recurrent
  n += c.k2;                            // read-out
  return n;
}

ForwardResult forward(const RecurrentNetwork& net, std::span<const double> window) {
  const NetConfig& c = net.config();
  if (window.size() != c.window_size())
    throw ConfigError("forward: window has length " + std::to_string(window.size()) +
                      ", expected (k+1)*d = " + std::to_string(c.window_size()));
  const std::size_t steps = c.k + 1;
  const std::size_t L = c.layers();
  const std::size_t off = c.hidden_bias ? 1 : 0;

  ForwardResult result;
  auto& f = result.trace.values;
  f.assign(steps, std::vector<std::vector<double>>(L));

  for (std::size_t t = 1; t <= steps; ++t) {
    const double* x = window.data() + (t - 1) * c.d;
    const std::vector<double>* prev_h = t > 1 ? &f[t - 2][c.l1 - 1] : nullptr;

    auto& a1 = f[t - 1][0];
    a1.resize(c.k1);
    const Matrix& w1 = net.layer1_w();
    for (std::size_t j = 0; j < c.k1; ++j) {
      double acc = w1(j, 0);
      for (std::size_t i = 0; i < c.d; ++i) acc = acc + w1(j, i + 1) * x[i];
      if (prev_h != nullptr)
        for (std::size_t s = 0; s < c.k1; ++s)
          acc = acc + net.rec_w_layer1()(j, s) * (*prev_h)[s];
      a1[j] = relu(acc);
    }

    for (std::size_t l = 2; l <= L; ++l) {
      const Matrix& w = net.hidden(l);
      const auto& in = f[t - 1][l - 2];
      auto& out = f[t - 1][l - 1];
      out.resize(w.rows());
      const bool bridge = l == c.l1 + 1 && prev_h != nullptr;
      for (std::size_t j = 0; j < w.rows(); ++j) {
        double acc = off != 0 ? w(j, 0) : 0.0;
        for (std::size_t s = 0; s < in.size(); ++s) acc = acc + w(j, s + off) * in[s];
        if (bridge)
          for (std::size_t s = 0; s < c.k1; ++s)
            acc = acc + net.rec_w_bridge()(j, s) * (*prev_h)[s];
        out[j] = relu(acc);
      }
    }
  }

  const auto& top = f[steps - 1][L - 1];
  double out = 0.0;
  for (std::size_t j = 0; j < c.k2; ++j) out = out + net.output_w()[j] * top[j];
  result.output = out;
  return result;
}

}  // namespace recnet
