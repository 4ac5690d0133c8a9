#include "recnet/feedforward.hpp"

#include <algorithm>
#include <string>

#include "recnet/errors.hpp"

namespace recnet {

FeedforwardNet::FeedforwardNet(std::size_t input_dim, std::vector<Layer> layers,
                               std::vector<double> output_w)
    : input_dim_(input_dim), layers_(std::move(layers)), output_w_(std::move(output_w)) {
  if (input_dim_ == 0) throw ConfigError("feedforward net: input_dim must be positive");
  if (layers_.empty()) throw ConfigError("feedforward net: at least one hidden layer required");
  std::size_t in = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.w.rows() == 0 || layer.w.cols() != in || layer.b.size() != layer.w.rows())
      throw ConfigError("feedforward net: layer " + std::to_string(l) +
                        " does not chain with its input");
    in = layer.w.rows();
  }
  if (output_w_.size() != in) throw ConfigError("feedforward net: output_w length mismatch");
}

FeedforwardNet FeedforwardNet::zeros(std::size_t input_dim, std::span<const std::size_t> widths) {
  std::vector<Layer> layers;
  std::size_t in = input_dim;
  for (std::size_t w : widths) {
    layers.push_back({Matrix(w, in), std::vector<double>(w, 0.0)});
    in = w;
  }
  return FeedforwardNet(input_dim, std::move(layers), std::vector<double>(in, 0.0));
}

std::size_t FeedforwardNet::max_width() const noexcept {
  std::size_t w = 0;
  for (const auto& l : layers_) w = std::max(w, l.w.rows());
  return w;
}

double FeedforwardNet::evaluate(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw ConfigError("feedforward net: expected input of length " + std::to_string(input_dim_) +
                      ", got " + std::to_string(x.size()));
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& layer : layers_) {
    next.assign(layer.w.rows(), 0.0);
    for (std::size_t j = 0; j < layer.w.rows(); ++j) {
      double acc = layer.b[j];
      const auto row = layer.w.row(j);
      for (std::size_t s = 0; s < row.size(); ++s) acc = acc + row[s] * a[s];
      next[j] = acc > 0.0 ? acc : 0.0;
    }
    a.swap(next);
  }
  double out = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) out = out + output_w_[j] * a[j];
  return out;
}

std::size_t FeedforwardNet::parameter_count() const noexcept {
  std::size_t n = output_w_.size();
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> FeedforwardNet::parameters() const {
  std::vector<double> theta;
  theta.reserve(parameter_count());
  for (const auto& l : layers_) {
    theta.insert(theta.end(), l.w.flat().begin(), l.w.flat().end());
    theta.insert(theta.end(), l.b.begin(), l.b.end());
  }
  theta.insert(theta.end(), output_w_.begin(), output_w_.end());
  return theta;
}

FeedforwardNet FeedforwardNet::with_parameters(std::span<const double> theta) const {
  if (theta.size() != parameter_count())
    throw ConfigError("feedforward net: parameter vector has wrong length");
  FeedforwardNet out = *this;
  std::size_t pos = 0;
  for (auto& l : out.layers_) {
    std::copy_n(theta.begin() + pos, l.w.size(), l.w.flat().begin());
    pos += l.w.size();
    std::copy_n(theta.begin() + pos, l.b.size(), l.b.begin());
    pos += l.b.size();
  }
  std::copy_n(theta.begin() + pos, out.output_w_.size(), out.output_w_.begin());
  return out;
}

std::vector<double> FeedforwardNet::parameter_gradient(std::span<const double> x) const {
  if (x.size() != input_dim_) throw ConfigError("feedforward net: input length mismatch");
  std::vector<std::vector<double>> acts{std::vector<double>(x.begin(), x.end())};
  for (const auto& layer : layers_) {
    const auto& a = acts.back();
    std::vector<double> next(layer.w.rows());
    for (std::size_t j = 0; j < layer.w.rows(); ++j) {
      double acc = layer.b[j];
      for (std::size_t s = 0; s < a.size(); ++s) acc = acc + layer.w(j, s) * a[s];
      next[j] = acc > 0.0 ? acc : 0.0;
    }
    acts.push_back(std::move(next));
  }

  std::vector<double> grad(parameter_count(), 0.0);
  // Offsets of each layer's block in the flat vector.
  std::vector<std::size_t> offset(layers_.size());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offset[l] = pos;
    pos += layers_[l].w.size() + layers_[l].b.size();
  }
  const auto& top = acts.back();
  std::vector<double> delta(top.size());
  for (std::size_t j = 0; j < top.size(); ++j) {
    grad[pos + j] = top[j];
    delta[j] = top[j] > 0.0 ? output_w_[j] : 0.0;
  }
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    const auto& in = acts[l];
    std::vector<double> prev(in.size(), 0.0);
    for (std::size_t j = 0; j < layer.w.rows(); ++j) {
      for (std::size_t s = 0; s < in.size(); ++s) {
        grad[offset[l] + j * layer.w.cols() + s] = delta[j] * in[s];
        prev[s] += layer.w(j, s) * delta[j];
      }
      grad[offset[l] + layer.w.size() + j] = delta[j];
    }
    if (l > 0)
      for (std::size_t s = 0; s < prev.size(); ++s) prev[s] = in[s] > 0.0 ? prev[s] : 0.0;
    delta.swap(prev);
  }
  return grad;
}

}  // namespace recnet
