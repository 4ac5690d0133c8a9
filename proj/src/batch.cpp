#include "recnet/batch.hpp"

#include <algorithm>
#include <string>

#include "recnet/errors.hpp"
#include "recnet/kernels.hpp"

namespace recnet {

namespace {

// Offsets of each parameter block in RecurrentNetwork::parameters().
struct ParamOffsets {
  std::size_t layer1 = 0;
  std::vector<std::size_t> hidden;  // [l-2]
  std::size_t rec1 = 0;
  std::size_t bridge = 0;
  std::size_t output = 0;

  explicit ParamOffsets(const RecurrentNetwork& net) {
    std::size_t pos = net.layer1_w().size();
    for (const auto& m : net.hidden_w()) {
      hidden.push_back(pos);
      pos += m.size();
    }
    rec1 = pos;
    pos += net.rec_w_layer1().size();
    bridge = pos;
    pos += net.rec_w_bridge().size();
    output = pos;
  }
};

}  // namespace

BatchTape::BatchTape(const NetConfig& config) : config_(config) { config_.validate(); }

void BatchTape::resize(std::size_t batch) {
  batch_ = batch;
  const std::size_t steps = config_.k + 1;
  const std::size_t L = config_.layers();
  x_.assign(steps, std::vector<double>(config_.d * batch));
  act_.assign(steps, std::vector<std::vector<double>>(L));
  for (std::size_t t = 1; t <= steps; ++t)
    for (std::size_t l = 1; l <= L; ++l)
      if (l <= config_.l1 || t == steps) act_[t - 1][l - 1].resize(config_.width(l) * batch);
  out_.assign(batch, 0.0);
}

void BatchTape::load_windows(std::span<const double> windows) {
  const std::size_t w = config_.window_size();
  if (windows.size() % w != 0)
    throw ConfigError("BatchTape: window buffer length is not a multiple of (k+1)*d");
  const std::size_t batch = windows.size() / w;
  if (batch != batch_) resize(batch);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t <= config_.k; ++t)
      for (std::size_t i = 0; i < config_.d; ++i)
        x_[t][i * batch + b] = windows[b * w + t * config_.d + i];
}

void BatchTape::load_series(std::span<const double> series, std::span<const std::size_t> newest) {
  const std::size_t d = config_.d;
  const std::size_t rows = series.size() / d;
  if (newest.size() != batch_) resize(newest.size());
  for (std::size_t b = 0; b < batch_; ++b) {
    if (newest[b] < config_.k || newest[b] >= rows)
      throw ConfigError("BatchTape: window end " + std::to_string(newest[b]) +
                        " lacks k predecessors or exceeds the series");
    const std::size_t first = newest[b] - config_.k;
    for (std::size_t t = 0; t <= config_.k; ++t)
      for (std::size_t i = 0; i < d; ++i) x_[t][i * batch_ + b] = series[(first + t) * d + i];
  }
}

std::span<const double> BatchTape::input(std::size_t t, std::size_t i) const {
  return row(x_.at(t - 1), i);
}

std::span<const double> BatchTape::activation(std::size_t t, std::size_t l, std::size_t j) const {
  const auto& v = act_.at(t - 1).at(l - 1);
  if (v.empty()) throw ConfigError("BatchTape: block G is only evaluated at the last step");
  return row(v, j);
}

void BatchTape::forward(const RecurrentNetwork& net) {
  if (!(net.config() == config_)) throw ConfigError("BatchTape: network config mismatch");
  const auto& K = kernels::active();
  const NetConfig& c = config_;
  const std::size_t steps = c.k + 1;
  const std::size_t L = c.layers();
  const std::size_t off = c.hidden_bias ? 1 : 0;
  const std::size_t B = batch_;

  for (std::size_t t = 1; t <= steps; ++t) {
    auto& a1 = act_[t - 1][0];
    const Matrix& w1 = net.layer1_w();
    for (std::size_t j = 0; j < c.k1; ++j) {
      double* dst = a1.data() + j * B;
      std::fill_n(dst, B, w1(j, 0));
      for (std::size_t i = 0; i < c.d; ++i) K.axpy(w1(j, i + 1), x_[t - 1].data() + i * B, dst, B);
      if (t > 1) {
        const auto& prev = act_[t - 2][c.l1 - 1];
        for (std::size_t s = 0; s < c.k1; ++s)
          K.axpy(net.rec_w_layer1()(j, s), prev.data() + s * B, dst, B);
      }
      K.relu(dst, B);
    }

    const std::size_t top = t == steps ? L : c.l1;
    for (std::size_t l = 2; l <= top; ++l) {
      const Matrix& w = net.hidden(l);
      const auto& in = act_[t - 1][l - 2];
      auto& out = act_[t - 1][l - 1];
      const std::size_t in_rows = in.size() / B;
      for (std::size_t j = 0; j < w.rows(); ++j) {
        double* dst = out.data() + j * B;
        std::fill_n(dst, B, off != 0 ? w(j, 0) : 0.0);
        for (std::size_t s = 0; s < in_rows; ++s) K.axpy(w(j, s + off), in.data() + s * B, dst, B);
        if (l == c.l1 + 1) {  // t == steps >= 2
          const auto& prev = act_[t - 2][c.l1 - 1];
          for (std::size_t s = 0; s < c.k1; ++s)
            K.axpy(net.rec_w_bridge()(j, s), prev.data() + s * B, dst, B);
        }
        K.relu(dst, B);
      }
    }
  }

  std::fill(out_.begin(), out_.end(), 0.0);
  const auto& last = act_[steps - 1][L - 1];
  for (std::size_t j = 0; j < c.k2; ++j) K.axpy(net.output_w()[j], last.data() + j * B, out_.data(), B);
}

void BatchTape::accumulate_gradient(const RecurrentNetwork& net, std::span<const double> d_output,
                                    std::span<double> grad) {
  const NetConfig& c = config_;
  if (!(net.config() == c)) throw ConfigError("BatchTape: network config mismatch");
  if (d_output.size() != batch_) throw ConfigError("BatchTape: d_output length mismatch");
  if (grad.size() != count_distinct_weights(c)) throw ConfigError("BatchTape: gradient length");

  const auto& K = kernels::active();
  const ParamOffsets po(net);
  const std::size_t steps = c.k + 1;
  const std::size_t L = c.layers();
  const std::size_t off = c.hidden_bias ? 1 : 0;
  const std::size_t B = batch_;
  const double* dout = d_output.data();

  dh_top_.assign(steps, std::vector<double>(c.k1 * B, 0.0));

  // Read-out.
  const auto& a_top = act_[steps - 1][L - 1];
  dg_.assign(c.k2 * B, 0.0);
  for (std::size_t j = 0; j < c.k2; ++j) {
    grad[po.output + j] += K.dot(dout, a_top.data() + j * B, B);
    K.axpy(net.output_w()[j], dout, dg_.data() + j * B, B);
  }

  // Block G at the last step, layers L..L1+1. dg_ holds d/d f^{(l)}.
  for (std::size_t l = L; l > c.l1; --l) {
    const Matrix& w = net.hidden(l);
    const auto& a = act_[steps - 1][l - 1];
    const auto& in = act_[steps - 1][l - 2];
    const std::size_t in_rows = in.size() / B;
    const std::size_t base = po.hidden[l - 2];
    for (std::size_t j = 0; j < w.rows(); ++j) K.mask_positive(dg_.data() + j * B, a.data() + j * B, B);

    dg_next_.assign(in_rows * B, 0.0);
    for (std::size_t j = 0; j < w.rows(); ++j) {
      const double* dj = dg_.data() + j * B;
      if (off != 0) grad[base + j * w.cols()] += K.sum(dj, B);
      for (std::size_t s = 0; s < in_rows; ++s) {
        grad[base + j * w.cols() + s + off] += K.dot(dj, in.data() + s * B, B);
        K.axpy(w(j, s + off), dj, dg_next_.data() + s * B, B);
      }
    }
    if (l == c.l1 + 1) {
      const auto& prev = act_[steps - 2][c.l1 - 1];
      for (std::size_t j = 0; j < w.rows(); ++j) {
        const double* dj = dg_.data() + j * B;
        for (std::size_t s = 0; s < c.k1; ++s) {
          grad[po.bridge + j * c.k1 + s] += K.dot(dj, prev.data() + s * B, B);
          K.axpy(net.rec_w_bridge()(j, s), dj, dh_top_[steps - 2].data() + s * B, B);
        }
      }
      // dg_next_ is the gradient w.r.t. f^{(L1)}(k+1).
      for (std::size_t s = 0; s < c.k1 * B; ++s) dh_top_[steps - 1][s] += dg_next_[s];
    }
    dg_.swap(dg_next_);
  }

  // Block H, newest step first; dh_top_[t-1] is complete once step t+1 is done.
  std::vector<double>& dcur = dg_;
  for (std::size_t t = steps; t >= 1; --t) {
    dcur = dh_top_[t - 1];
    for (std::size_t l = c.l1; l >= 1; --l) {
      const auto& a = act_[t - 1][l - 1];
      for (std::size_t j = 0; j < c.k1; ++j) K.mask_positive(dcur.data() + j * B, a.data() + j * B, B);

      if (l >= 2) {
        const Matrix& w = net.hidden(l);
        const auto& in = act_[t - 1][l - 2];
        const std::size_t base = po.hidden[l - 2];
        dg_next_.assign(c.k1 * B, 0.0);
        for (std::size_t j = 0; j < c.k1; ++j) {
          const double* dj = dcur.data() + j * B;
          if (off != 0) grad[base + j * w.cols()] += K.sum(dj, B);
          for (std::size_t s = 0; s < c.k1; ++s) {
            grad[base + j * w.cols() + s + off] += K.dot(dj, in.data() + s * B, B);
            K.axpy(w(j, s + off), dj, dg_next_.data() + s * B, B);
          }
        }
        dcur.swap(dg_next_);
        continue;
      }

      const Matrix& w1 = net.layer1_w();
      for (std::size_t j = 0; j < c.k1; ++j) {
        const double* dj = dcur.data() + j * B;
        grad[po.layer1 + j * w1.cols()] += K.sum(dj, B);
        for (std::size_t i = 0; i < c.d; ++i)
          grad[po.layer1 + j * w1.cols() + i + 1] += K.dot(dj, x_[t - 1].data() + i * B, B);
        if (t > 1) {
          const auto& prev = act_[t - 2][c.l1 - 1];
          for (std::size_t s = 0; s < c.k1; ++s) {
            grad[po.rec1 + j * c.k1 + s] += K.dot(dj, prev.data() + s * B, B);
            K.axpy(net.rec_w_layer1()(j, s), dj, dh_top_[t - 2].data() + s * B, B);
          }
        }
      }
    }
  }
}

std::vector<double> forward_batch(const RecurrentNetwork& net, std::span<const double> windows) {
  BatchTape tape(net.config());
  tape.load_windows(windows);
  tape.forward(net);
  return {tape.outputs().begin(), tape.outputs().end()};
}

}  // namespace recnet
