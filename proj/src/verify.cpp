#include <algorithm>
#include <cmath>
#include <numbers>

#include "recnet/construct.hpp"
#include "recnet/errors.hpp"
#include "recnet/harness.hpp"
#include "recnet/rng.hpp"

namespace recnet {

namespace {

using Real = long double;

// Network risk over one dataset in long double from a flat parameter vector,
// also recording the sign of every pre-activation.
class ReferenceRisk {
 public:
  ReferenceRisk(const NetConfig& c, const Dataset& data) : c_(c), data_(data) {}

  Real operator()(const std::vector<Real>& theta, std::vector<bool>* pattern) const {
    const std::size_t L = c_.layers();
    const std::size_t off = c_.hidden_bias ? 1 : 0;
    std::vector<const Real*> hidden(L + 1);
    const Real* w1 = theta.data();
    const Real* p = w1 + c_.k1 * (c_.d + 1);
    std::vector<std::size_t> cols(L + 1);
    for (std::size_t l = 2; l <= L; ++l) {
      const auto shape = hidden_shape(c_, l);
      hidden[l] = p;
      cols[l] = shape.cols;
      p += shape.rows * shape.cols;
    }
    const Real* rec1 = p;
    const Real* bridge = rec1 + c_.k1 * c_.k1;
    const Real* v = bridge + c_.k2 * c_.k1;

    Real total = 0;
    std::size_t count = 0;
    for (std::size_t t_end = data_.spec.k() + 1; t_end <= data_.n; ++t_end) {
      const auto window = data_.window(t_end);
      std::vector<Real> prev_h, cur;
      std::vector<Real> in;
      for (std::size_t t = 1; t <= c_.k + 1; ++t) {
        const double* x = window.data() + (t - 1) * c_.d;
        cur.assign(c_.k1, 0);
        for (std::size_t j = 0; j < c_.k1; ++j) {
          Real acc = w1[j * (c_.d + 1)];
          for (std::size_t i = 0; i < c_.d; ++i) acc += w1[j * (c_.d + 1) + 1 + i] * x[i];
          if (t > 1)
            for (std::size_t s = 0; s < c_.k1; ++s) acc += rec1[j * c_.k1 + s] * prev_h[s];
          if (pattern) pattern->push_back(acc > 0);
          cur[j] = acc > 0 ? acc : 0;
        }
        std::vector<Real> top_h = c_.l1 == 1 ? cur : std::vector<Real>{};
        for (std::size_t l = 2; l <= L; ++l) {
          in = cur;
          cur.assign(c_.width(l), 0);
          const bool is_bridge = l == c_.l1 + 1 && t > 1;
          for (std::size_t j = 0; j < cur.size(); ++j) {
            const Real* row = hidden[l] + j * cols[l];
            Real acc = off ? row[0] : 0;
            for (std::size_t s = 0; s < in.size(); ++s) acc += row[s + off] * in[s];
            if (is_bridge)
              for (std::size_t s = 0; s < c_.k1; ++s) acc += bridge[j * c_.k1 + s] * prev_h[s];
            if (pattern) pattern->push_back(acc > 0);
            cur[j] = acc > 0 ? acc : 0;
          }
          if (l == c_.l1) top_h = cur;
        }
        prev_h = top_h;
      }
      Real out = 0;
      for (std::size_t j = 0; j < c_.k2; ++j) out += v[j] * cur[j];
      const Real e = static_cast<Real>(data_.y(t_end)) - out;
      total += e * e;
      ++count;
    }
    return total / static_cast<Real>(count);
  }

 private:
  NetConfig c_;
  const Dataset& data_;
};

NetConfig random_config(CounterRng& rng, std::size_t max_k, std::size_t max_d, std::size_t max_l,
                        std::size_t max_w) {
  NetConfig c;
  c.k = 1 + rng.below(max_k);
  c.d = 1 + rng.below(max_d);
  c.l1 = 1 + rng.below(max_l);
  c.l2 = 1 + rng.below(max_l);
  c.k1 = 1 + rng.below(max_w);
  c.k2 = 1 + rng.below(max_w);
  c.hidden_bias = rng.below(2) == 1;
  return c;
}

RecurrentNetwork random_net(const NetConfig& c, CounterRng& rng, double scale) {
  std::vector<double> theta(count_distinct_weights(c));
  for (double& v : theta) v = rng.uniform(-scale, scale);
  return RecurrentNetwork::from_parameters(c, theta);
}

FeedforwardNet random_feedforward(std::size_t input_dim, std::size_t depth, std::size_t width,
                                  CounterRng& rng) {
  std::vector<FeedforwardNet::Layer> layers;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < depth; ++l) {
    FeedforwardNet::Layer layer{Matrix(width, in), std::vector<double>(width)};
    for (double& w : layer.w.flat()) w = rng.uniform(-1.0, 1.0);
    for (double& b : layer.b) b = rng.uniform(-0.5, 0.5);
    layers.push_back(std::move(layer));
    in = width;
  }
  std::vector<double> v(width);
  for (double& w : v) w = rng.uniform(-1.0, 1.0);
  return FeedforwardNet(input_dim, std::move(layers), std::move(v));
}

ModelSpec random_model(CounterRng& rng, std::size_t d, std::size_t k) {
  switch (rng.below(4)) {
    case 0:
      return ModelSpec::create("tanh_sin", d, k,
                               {{"alpha", rng.uniform(1.0, 2.0)},
                                {"beta", rng.uniform(0.2, 2.0)},
                                {"gamma", rng.uniform(-2.0, 2.0)}},
                               0.0);
    case 1:
      return ModelSpec::create("linear", d, k,
                               {{"g0", rng.uniform(-1.0, 1.0)},
                                {"a", rng.uniform(-2.0, 2.0)},
                                {"b", rng.uniform(-2.0, 2.0)},
                                {"c", rng.uniform(-2.0, 2.0)},
                                {"rho", rng.uniform(-0.95, 0.95)}},
                               0.0);
    case 2:
      return ModelSpec::create("poly", d, k,
                               {{"a", rng.uniform(-2.0, 2.0)},
                                {"gamma", rng.uniform(-2.0, 2.0)},
                                {"c", rng.uniform(-4.0, 4.0)},
                                {"rho", rng.uniform(-0.95, 0.95)}},
                               0.0);
    default:
      return ModelSpec::create("holder", d, k,
                               {{"s", rng.uniform(0.1, 1.0)},
                                {"gamma", rng.uniform(-2.0, 2.0)},
                                {"c", rng.uniform(-2.0, 2.0)},
                                {"rho", rng.uniform(-0.95, 0.95)}},
                               0.0);
  }
}

double hk_recursive(const ModelSpec& spec, std::span<const double> xs, std::size_t k) {
  if (k == 0) return 0.0;
  const std::size_t d = spec.d();
  return spec.h(xs.subspan((k - 1) * d, d), hk_recursive(spec, xs, k - 1));
}

void record(VerifySummary& s, bool ok, double measure) {
  ok ? ++s.passed : ++s.failed;
  if (std::isnan(measure) || measure > s.worst_case) s.worst_case = measure;
}

VerifySummary verify_unfold(std::uint64_t seed, std::size_t trials) {
  VerifySummary s;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    CounterRng rng(hash_combine(seed, trial), stream::kTest);
    const NetConfig c = random_config(rng, 4, 3, 4, 6);
    const RecurrentNetwork net = random_net(c, rng, 1.0);
    std::vector<double> window(c.window_size());
    for (double& v : window) v = rng.uniform(-1.0, 1.0);
    const double a = forward(net, window).output;
    const double b = unfold(net).evaluate(window);
    const double diff = std::abs(a - b);
    record(s, diff <= 1e-12 * std::max(1.0, std::abs(a)), diff);
  }
  return s;
}

VerifySummary verify_gradient(std::uint64_t seed, std::size_t trials) {
  constexpr Real kStep = 1e-6L;
  constexpr double kTol = 1e-4;
  constexpr double kSmall = 1e-8;  // below this, compare absolutely
  VerifySummary s;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    CounterRng rng(hash_combine(seed, trial), stream::kTest);
    NetConfig c;
    do c = random_config(rng, 3, 2, 3, 4);
    while (count_distinct_weights(c) > 200);
    const ModelSpec spec = ModelSpec::create("tanh_sin", c.d, c.k, {}, 0.25);
    const std::size_t n = 2 * c.k + 2 + rng.below(31 - (2 * c.k + 2));
    const Dataset data = simulate(spec, n, rng());
    const RecurrentNetwork net = random_net(c, rng, 1.0);

    const std::vector<double> g = gradient(net, data);
    const auto theta = net.parameters();
    const ReferenceRisk ref(c, data);
    std::vector<Real> th(theta.begin(), theta.end());
    std::vector<bool> base_pattern, plus_pattern, minus_pattern;
    ref(th, &base_pattern);

    double worst = 0.0;
    bool abs_fail = false;
    for (std::size_t j = 0; j < th.size(); ++j) {
      plus_pattern.clear();
      minus_pattern.clear();
      th[j] = static_cast<Real>(theta[j]) + kStep;
      const Real up = ref(th, &plus_pattern);
      th[j] = static_cast<Real>(theta[j]) - kStep;
      const Real down = ref(th, &minus_pattern);
      th[j] = theta[j];
      if (plus_pattern != base_pattern || minus_pattern != base_pattern) continue;  // kink
      const double fd = static_cast<double>((up - down) / (2 * kStep));
      const double err = std::abs(fd - g[j]);
      if (std::abs(fd) < kSmall) {
        if (err > kSmall) abs_fail = true;
      } else {
        worst = std::max(worst, err / std::abs(fd));
      }
    }
    record(s, worst <= kTol && !abs_fail, worst);
  }
  return s;
}

VerifySummary verify_lemma4(std::uint64_t seed, std::size_t trials) {
  constexpr std::size_t kWindows = 20;
  constexpr double kSlack = 1e-9;
  VerifySummary s;
  s.worst_case = -std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    CounterRng rng(hash_combine(seed, trial), stream::kTest);
    const std::size_t k = 1 + rng.below(6);
    const std::size_t d = 1 + rng.below(3);
    const ModelSpec spec = random_model(rng, d, k);

    Lemma4Instance inst;
    inst.k = k;
    inst.bound_a = spec.range_bound();
    // Any larger constant is still a Lipschitz constant; the bound needs > 1.
    inst.lip_g = std::max(spec.lip_g(), 1.0 + rng.uniform(0.01, 0.5));
    inst.lip_h = std::max(spec.lip_h(), 1.0 + rng.uniform(0.01, 0.5));
    inst.sup_g_err = rng.uniform(0.0, 0.5);
    inst.sup_h_err = rng.uniform(0.0, 1.0) / geometric_factor(inst.lip_h, k);
    const double bound = lemma4_bound(inst);

    // h^ = h + eh cos(wh z + ph sum(x)), g^ likewise. With w >= pi / (2A) the
    // cosine runs through a full period for z in [-2A, 2A], so the sup errors
    // on the box are exactly |eh| and |eg|.
    const double w_min = std::numbers::pi / (2.0 * inst.bound_a);
    const double wh = w_min + rng.uniform(0.0, 4.0), ph = rng.uniform(0.0, 3.0);
    const double wg = w_min + rng.uniform(0.0, 4.0), pg = rng.uniform(0.0, 3.0);
    const double eh = (rng.below(2) ? 1.0 : -1.0) * inst.sup_h_err;
    const double eg = (rng.below(2) ? 1.0 : -1.0) * inst.sup_g_err;
    auto sum = [](std::span<const double> x) {
      double a = 0.0;
      for (double v : x) a += v;
      return a;
    };

    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> window((k + 1) * d);
    for (std::size_t w = 0; w < kWindows; ++w) {
      for (double& v : window) v = rng.uniform();
      double z = 0.0, zh = 0.0;
      for (std::size_t t = 1; t <= k; ++t) {
        const auto x = std::span<const double>(window).subspan((t - 1) * d, d);
        z = spec.h(x, z);
        zh = spec.h(x, zh) + eh * std::cos(wh * zh + ph * sum(x));
        if (!(std::abs(zh) <= 2.0 * inst.bound_a)) ok = false;
      }
      const auto x = std::span<const double>(window).subspan(k * d, d);
      const double gh = spec.g(x, zh) + eg * std::cos(wg * zh + pg * sum(x));
      const double gap = std::abs(spec.g(x, z) - gh) - bound;
      worst = std::max(worst, gap);
      if (!(gap <= kSlack)) ok = false;
    }
    record(s, ok, worst);
  }
  return s;
}

VerifySummary verify_embed(std::uint64_t seed, std::size_t trials) {
  constexpr std::size_t kWindows = 50;
  VerifySummary s;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    CounterRng rng(hash_combine(seed, trial), stream::kTest);
    const std::size_t k = 1 + rng.below(4);
    const std::size_t d = 1 + rng.below(3);
    const FeedforwardNet h_net = random_feedforward(d + 1, 1 + rng.below(3), 1 + rng.below(5), rng);
    const FeedforwardNet g_net = random_feedforward(d + 1, 1 + rng.below(3), 1 + rng.below(5), rng);
    const RecurrentNetwork net = embed(h_net, g_net, k, d);

    double worst = 0.0;
    std::vector<double> window((k + 1) * d), in(d + 1);
    for (std::size_t w = 0; w < kWindows; ++w) {
      for (double& v : window) v = rng.uniform();
      double z = 0.0;
      for (std::size_t t = 1; t <= k + 1; ++t) {
        std::copy_n(window.begin() + (t - 1) * d, d, in.begin());
        in[d] = z;
        if (t <= k) z = h_net.evaluate(in);
      }
      const double direct = g_net.evaluate(in);
      const double got = forward(net, window).output;
      worst = std::max(worst, std::abs(got - direct) / std::max(1.0, std::abs(direct)));
    }
    record(s, worst <= 1e-12, worst);
  }
  return s;
}

VerifySummary verify_datagen(std::uint64_t seed, std::size_t trials) {
  VerifySummary s;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    CounterRng rng(hash_combine(seed, trial), stream::kTest);
    const std::size_t k = 1 + rng.below(8);
    const std::size_t d = 1 + rng.below(3);
    const ModelSpec spec = random_model(rng, d, k);
    std::vector<double> xs(k * d);
    for (double& v : xs) v = rng.uniform();
    const double a = hk(spec, xs);
    const double b = hk_recursive(spec, xs, k);
    const double diff = std::abs(a - b);
    record(s, diff == 0.0 && std::abs(a) <= spec.range_bound(), diff);
  }
  return s;
}

}  // namespace

VerifySummary verify(std::string_view suite, std::uint64_t seed, std::size_t trials) {
  if (trials == 0) throw PreconditionError("verify: trials must be >= 1");
  if (suite == "unfold") return verify_unfold(seed, trials);
  if (suite == "gradient") return verify_gradient(seed, trials);
  if (suite == "lemma4") return verify_lemma4(seed, trials);
  if (suite == "embed") return verify_embed(seed, trials);
  if (suite == "datagen") return verify_datagen(seed, trials);
  throw ConfigError("verify: unknown suite '" + std::string(suite) + "'");
}

}  // namespace recnet
