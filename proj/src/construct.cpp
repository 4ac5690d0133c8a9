#include "recnet/construct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recnet/errors.hpp"
#include "recnet/rng.hpp"

namespace recnet {

double geometric_factor(double lip_h, std::size_t k) {
  if (!(lip_h > 0.0) || k == 0)
    throw PreconditionError("geometric_factor: need lip_h > 0 and k >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum = sum * lip_h + 1.0;
  return sum;
}

double lemma4_bound(const Lemma4Instance& inst) {
  if (inst.k == 0 || !(inst.bound_a >= 1.0) || !(inst.lip_g > 1.0) || !(inst.lip_h > 1.0) ||
      !(inst.sup_g_err >= 0.0) || !(inst.sup_h_err >= 0.0))
    throw PreconditionError(
        "lemma4_bound: need k >= 1, A >= 1, Lipschitz constants > 1, errors >= 0");
  const double gf = geometric_factor(inst.lip_h, inst.k);
  if (gf * inst.sup_h_err > 1.0)
    throw PreconditionError("lemma4_bound: geometric_factor * sup_h_err = " +
                            std::to_string(gf * inst.sup_h_err) + " exceeds 1");
  return inst.sup_g_err + inst.lip_g * gf * inst.sup_h_err;
}

namespace {

std::size_t uniform_width(const FeedforwardNet& net, const char* what) {
  const std::size_t w = net.layers().front().w.rows();
  for (const auto& l : net.layers())
    if (l.w.rows() != w)
      throw ConfigError(std::string("embed: ") + what + " must have equal hidden widths");
  return w;
}

}  // namespace

RecurrentNetwork embed(const FeedforwardNet& h_net, const FeedforwardNet& g_net, std::size_t k,
                       std::size_t d) {
  if (h_net.input_dim() != d + 1 || g_net.input_dim() != d + 1)
    throw ConfigError("embed: h_net and g_net must take d + 1 inputs");
  if (k == 0) throw ConfigError("embed: k must be >= 1");
  const std::size_t kh = uniform_width(h_net, "h_net");
  const std::size_t kg = uniform_width(g_net, "g_net");

  NetConfig c;
  c.k = k;
  c.d = d;
  c.k1 = kh + 2 * d;
  c.k2 = kg;
  c.l1 = h_net.depth();
  c.l2 = g_net.depth();
  c.hidden_bias = true;
  RecurrentNetwork zero = RecurrentNetwork::zeros(c);

  const auto& hv = h_net.output_w();
  const auto& h1 = h_net.layers().front();
  const auto& g1 = g_net.layers().front();

  Matrix layer1(c.k1, d + 1);
  Matrix rec1(c.k1, c.k1);
  for (std::size_t j = 0; j < kh; ++j) {
    layer1(j, 0) = h1.b[j];
    for (std::size_t i = 0; i < d; ++i) layer1(j, i + 1) = h1.w(j, i);
    for (std::size_t s = 0; s < kh; ++s) rec1(j, s) = h1.w(j, d) * hv[s];
  }
  for (std::size_t i = 0; i < d; ++i) {
    layer1(kh + 2 * i, i + 1) = 1.0;
    layer1(kh + 2 * i + 1, i + 1) = -1.0;
  }

  std::vector<Matrix> hidden;
  for (std::size_t l = 2; l <= c.l1; ++l) {
    const auto& src = h_net.layers()[l - 1];
    Matrix w(c.k1, c.k1 + 1);
    for (std::size_t j = 0; j < kh; ++j) {
      w(j, 0) = src.b[j];
      for (std::size_t s = 0; s < kh; ++s) w(j, s + 1) = src.w(j, s);
    }
    for (std::size_t p = kh; p < c.k1; ++p) w(p, p + 1) = 1.0;
    hidden.push_back(std::move(w));
  }

  Matrix bridge(c.k2, c.k1);
  {
    Matrix w(kg, c.k1 + 1);
    for (std::size_t j = 0; j < kg; ++j) {
      w(j, 0) = g1.b[j];
      for (std::size_t i = 0; i < d; ++i) {
        w(j, 1 + kh + 2 * i) = g1.w(j, i);
        w(j, 1 + kh + 2 * i + 1) = -g1.w(j, i);
      }
      for (std::size_t s = 0; s < kh; ++s) bridge(j, s) = g1.w(j, d) * hv[s];
    }
    hidden.push_back(std::move(w));
  }
  for (std::size_t l = 2; l <= c.l2; ++l) {
    const auto& src = g_net.layers()[l - 1];
    Matrix w(kg, kg + 1);
    for (std::size_t j = 0; j < kg; ++j) {
      w(j, 0) = src.b[j];
      for (std::size_t s = 0; s < kg; ++s) w(j, s + 1) = src.w(j, s);
    }
    hidden.push_back(std::move(w));
  }

  return RecurrentNetwork(c, std::move(layer1), std::move(hidden), std::move(rec1),
                          std::move(bridge), g_net.output_w());
}

namespace {

std::vector<std::size_t> first_primes(std::size_t count) {
  std::vector<std::size_t> primes;
  for (std::size_t n = 2; primes.size() < count; ++n)
    if (std::none_of(primes.begin(), primes.end(), [n](std::size_t p) { return n % p == 0; }))
      primes.push_back(n);
  return primes;
}

double radical_inverse(std::size_t index, std::size_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double scale = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return result;
}

}  // namespace

std::vector<double> halton_point(std::size_t index, std::size_t dim, double half_width,
                                 std::uint64_t seed) {
  static thread_local std::vector<std::size_t> primes;
  if (primes.size() < dim) primes = first_primes(dim);
  CounterRng shift(seed, stream::kTest);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double u = radical_inverse(index + 1, primes[i]) + CounterRng::to_unit(shift.at(i));
    u -= std::floor(u);
    p[i] = -half_width + 2.0 * half_width * u;
  }
  return p;
}

double measure_sup_error(const ScalarField& f_true, const FeedforwardNet& f_net,
                         double box_half_width, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("measure_sup_error: samples must be >= 1");
  const std::size_t dim = f_net.input_dim();
  double worst = 0.0;
  auto visit = [&](std::span<const double> p) {
    worst = std::max(worst, std::abs(f_true(p) - f_net.evaluate(p)));
  };
  if (dim <= 16) {
    std::vector<double> corner(dim);
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
      for (std::size_t i = 0; i < dim; ++i)
        corner[i] = (mask >> i & 1) != 0 ? box_half_width : -box_half_width;
      visit(corner);
    }
  }
  for (std::size_t i = 0; i < samples; ++i) visit(halton_point(i, dim, box_half_width, seed));
  return worst;
}

FeedforwardNet fit_approximant(const ScalarField& f, std::size_t input_dim,
                               const ApproximantConfig& cfg) {
  if (cfg.widths.empty() || cfg.samples == 0 || cfg.steps == 0)
    throw ConfigError("fit_approximant: need hidden widths, samples and steps");

  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    xs.push_back(halton_point(i, input_dim, cfg.box_half_width, cfg.seed));
    ys.push_back(f(xs.back()));
  }

  FeedforwardNet net = FeedforwardNet::zeros(input_dim, cfg.widths);
  CounterRng rng(cfg.seed, stream::kInit);
  std::vector<double> theta;
  {
    std::size_t fan_in = input_dim;
    for (std::size_t w : cfg.widths) {
      const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < w * fan_in; ++i) theta.push_back(rng.uniform(-a, a));
      for (std::size_t i = 0; i < w; ++i) theta.push_back(rng.uniform(0.0, a));
      fan_in = w;
    }
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < fan_in; ++i) theta.push_back(rng.uniform(-a, a));
  }
  net = net.with_parameters(theta);

  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad(theta.size());
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double b1p = 1.0, b2p = 1.0;
  FeedforwardNet best = net;
  double best_loss = INFINITY;
  for (std::size_t step = 0; step <= cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = net.evaluate(xs[i]) - ys[i];
      loss += r * r;
      const auto gi = net.parameter_gradient(xs[i]);
      for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += 2.0 * r * gi[p];
    }
    loss /= static_cast<double>(xs.size());
    if (loss < best_loss) {
      best_loss = loss;
      best = net;
    }
    if (step == cfg.steps) break;
    b1p *= b1;
    b2p *= b2;
    for (std::size_t p = 0; p < theta.size(); ++p) {
      const double g = grad[p] / static_cast<double>(xs.size());
      m[p] = b1 * m[p] + (1.0 - b1) * g;
      v[p] = b2 * v[p] + (1.0 - b2) * g * g;
      theta[p] -= cfg.learning_rate * (m[p] / (1.0 - b1p)) / (std::sqrt(v[p] / (1.0 - b2p)) + eps);
    }
    net = net.with_parameters(theta);
  }
  return best;
}

}  // namespace recnet
