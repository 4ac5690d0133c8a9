#include <algorithm>

#include "recnet/network.hpp"

namespace recnet {

namespace {

// Neuron layout of one unfolded layer (see unfold() in network.hpp).
struct Layout {
  std::size_t core = 0;          // live block activations
  std::size_t first_future = 0;  // first time index whose pair block is carried
  std::size_t futures = 0;       // number of carried input times
  std::size_t saved = 0;         // carried copy of a layer-L1 activation vector

  std::size_t saved_at(std::size_t d) const { return core + 2 * d * futures; }
  std::size_t size(std::size_t d) const { return core + 2 * d * futures + saved; }
  // Offset of the sigma(x_u^(i)) neuron; sigma(-x_u^(i)) follows it.
  std::size_t pair(std::size_t d, std::size_t u, std::size_t i) const {
    return core + 2 * d * (u - first_future) + 2 * i;
  }
};

Layout layout_of(const NetConfig& c, std::size_t t, std::size_t l) {
  const std::size_t last = c.k + 1;
  Layout lay;
  if (l <= c.l1)
    lay.core = c.k1;
  else if (t == last)
    lay.core = c.k2;
  lay.first_future = t + 1;
  lay.futures = last - t;
  if (t < last && l > c.l1) lay.saved = c.k1;
  if (t == last && l <= c.l1) lay.saved = c.k1;
  return lay;
}

}  // namespace

std::size_t unfolded_width(const NetConfig& c) noexcept {
  return std::max({c.k1 + 2 * c.d * c.k, 2 * c.k1, c.k2});
}

FeedforwardNet unfold(const RecurrentNetwork& net) {
  const NetConfig& c = net.config();
  const std::size_t d = c.d;
  const std::size_t last = c.k + 1;
  const std::size_t L = c.layers();
  const std::size_t off = c.hidden_bias ? 1 : 0;

  std::vector<FeedforwardNet::Layer> layers;
  layers.reserve(last * L);

  // Input side of the layer being built: either the raw window or the
  // previous unfolded layer.
  bool raw_input = true;
  Layout in_lay;

  // Column of input component i of x_u in the current input.
  auto input_col = [&](std::size_t u, std::size_t i, bool negative_half) {
    if (raw_input) return (u - 1) * d + i;
    return in_lay.pair(d, u, i) + (negative_half ? 1 : 0);
  };

  for (std::size_t t = 1; t <= last; ++t) {
    for (std::size_t l = 1; l <= L; ++l) {
      const Layout out = layout_of(c, t, l);
      const std::size_t in_size = raw_input ? c.window_size() : in_lay.size(d);
      FeedforwardNet::Layer layer{Matrix(out.size(d), in_size), std::vector<double>(out.size(d))};

      // Live block neurons.
      if (out.core > 0) {
        if (l == 1) {
          const Matrix& w1 = net.layer1_w();
          for (std::size_t j = 0; j < c.k1; ++j) {
            layer.b[j] = w1(j, 0);
            for (std::size_t i = 0; i < d; ++i) {
              layer.w(j, input_col(t, i, false)) = w1(j, i + 1);
              if (!raw_input) layer.w(j, input_col(t, i, true)) = -w1(j, i + 1);
            }
            if (t > 1)
              for (std::size_t s = 0; s < c.k1; ++s)
                layer.w(j, in_lay.saved_at(d) + s) = net.rec_w_layer1()(j, s);
          }
        } else {
          const Matrix& w = net.hidden(l);
          for (std::size_t j = 0; j < out.core; ++j) {
            layer.b[j] = off != 0 ? w(j, 0) : 0.0;
            for (std::size_t s = 0; s < in_lay.core; ++s) layer.w(j, s) = w(j, s + off);
            if (l == c.l1 + 1)  // t == last here; the previous step's copy rides along
              for (std::size_t s = 0; s < c.k1; ++s)
                layer.w(j, in_lay.saved_at(d) + s) = net.rec_w_bridge()(j, s);
          }
        }
      }

      // Pass the remaining inputs forward as sigma(x), sigma(-x) pairs.
      for (std::size_t u = out.first_future; u < out.first_future + out.futures; ++u) {
        for (std::size_t i = 0; i < d; ++i) {
          const std::size_t pos = out.pair(d, u, i);
          if (raw_input) {
            layer.w(pos, input_col(u, i, false)) = 1.0;
            layer.w(pos + 1, input_col(u, i, false)) = -1.0;
          } else {
            layer.w(pos, input_col(u, i, false)) = 1.0;
            layer.w(pos + 1, input_col(u, i, true)) = 1.0;
          }
        }
      }

      // Saved layer-L1 activations: copied from the live block when block H
      // finishes, otherwise from the previous saved copy.
      if (out.saved > 0) {
        const bool from_core = l == c.l1 + 1 && t < last;
        for (std::size_t s = 0; s < c.k1; ++s) {
          const std::size_t src = from_core ? s : in_lay.saved_at(d) + s;
          layer.w(out.saved_at(d) + s, src) = 1.0;
        }
      }

      layers.push_back(std::move(layer));
      raw_input = false;
      in_lay = out;
    }
  }

  return FeedforwardNet(c.window_size(), std::move(layers), net.output_w());
}

}  // namespace recnet
