#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "recnet/construct.hpp"
#include "recnet/errors.hpp"
#include "recnet/harness.hpp"

using namespace recnet;

namespace {

double direct_recursion(const FeedforwardNet& h_net, const FeedforwardNet& g_net, std::span<const double> window,
                        std::size_t k, std::size_t d) {
  std::vector<double> in(d + 1);
  double z = 0.0;
  for (std::size_t t = 1; t <= k; ++t) {
    std::copy_n(window.begin() + (t - 1) * d, d, in.begin());
    in[d] = z;
    z = h_net.evaluate(in);
  }
  std::copy_n(window.begin() + k * d, d, in.begin());
  in[d] = z;
  return g_net.evaluate(in);
}

}  // namespace

TEST_CASE("geometric factor") {
  CHECK(geometric_factor(2.0, 3) == 7.0);
  CHECK(geometric_factor(1.0, 5) == 5.0);
  CHECK(geometric_factor(0.3, 1) == 1.0);
  CHECK(geometric_factor(17.0, 1) == 1.0);
  CHECK(geometric_factor(1.5, 4) == doctest::Approx((std::pow(1.5, 4) - 1) / 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(geometric_factor(0.0, 2), PreconditionError);
  CHECK_THROWS_AS(geometric_factor(2.0, 0), PreconditionError);
}

TEST_CASE("lemma4 bound") {
  Lemma4Instance inst;
  inst.k = 3;
  CHECK(lemma4_bound(inst) == 0.0);
  inst.sup_g_err = 0.1;
  inst.sup_h_err = 0.05;
  CHECK(lemma4_bound(inst) == doctest::Approx(0.8).epsilon(1e-15));

  const double base = lemma4_bound(inst);
  auto bumped = inst;
  bumped.sup_g_err += 0.01;
  CHECK(lemma4_bound(bumped) > base);
  bumped = inst;
  bumped.sup_h_err += 0.01;
  CHECK(lemma4_bound(bumped) > base);
  bumped = inst;
  bumped.lip_g += 0.5;
  CHECK(lemma4_bound(bumped) > base);
  bumped = inst;
  bumped.k = 4;
  bumped.sup_h_err = 0.05;
  CHECK(lemma4_bound(bumped) > base);

  inst.sup_h_err = 1.0 / 7.0 + 1e-9;
  CHECK(!inst.hypothesis_holds());
  CHECK_THROWS_AS(lemma4_bound(inst), PreconditionError);
  inst.sup_h_err = 0.05;
  inst.lip_h = 1.0;
  CHECK_THROWS_AS(lemma4_bound(inst), PreconditionError);
}

TEST_CASE("identity channel") {
  CounterRng rng(41, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1e3, 1e3);
    CHECK(relu(x) - relu(-x) == x);
  }
  CHECK(relu(0.0) - relu(-0.0) == 0.0);
}

TEST_CASE("embed shape") {
  CounterRng rng(42, 0);
  const auto h = oracle::random_feedforward(3, 2, 5, rng);
  const auto g = oracle::random_feedforward(3, 3, 4, rng);
  const auto net = embed(h, g, 3, 2);
  const NetConfig& c = net.config();
  CHECK(c.k == 3);
  CHECK(c.d == 2);
  CHECK(c.k1 == 5 + 4);
  CHECK(c.k2 == 4);
  CHECK(c.l1 == 2);
  CHECK(c.l2 == 3);
  CHECK(c.hidden_bias);

  CHECK_THROWS_AS(embed(h, g, 3, 1), ConfigError);
  CHECK_THROWS_AS(embed(h, g, 0, 2), ConfigError);
  std::vector<FeedforwardNet::Layer> ragged{{Matrix(3, 3), std::vector<double>(3)}, {Matrix(2, 3), std::vector<double>(2)}};
  CHECK_THROWS_AS(embed(FeedforwardNet(3, ragged, {1.0, 1.0}), g, 3, 2), ConfigError);
}

TEST_CASE("embed of a zero h_net reads g_net at z = 0") {
  CounterRng rng(43, 0);
  const std::size_t d = 2, k = 3;
  const std::vector<std::size_t> widths{4, 4};
  const auto h = FeedforwardNet::zeros(d + 1, widths);
  const auto g = oracle::random_feedforward(d + 1, 2, 3, rng);
  const auto net = embed(h, g, k, d);
  std::vector<double> window((k + 1) * d), in(d + 1, 0.0);
  for (int w = 0; w < 100; ++w) {
    for (double& v : window) v = rng.uniform();
    std::copy_n(window.begin() + k * d, d, in.begin());
    CHECK(forward(net, window).output == doctest::Approx(g.evaluate(in)).epsilon(1e-12));
  }
}

TEST_CASE("embed equals the explicit recursion") {
  CounterRng rng(44, 0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 1 + rng.below(4), d = 1 + rng.below(3);
    const auto h = oracle::random_feedforward(d + 1, 1 + rng.below(3), 1 + rng.below(5), rng);
    const auto g = oracle::random_feedforward(d + 1, 1 + rng.below(3), 1 + rng.below(5), rng);
    const auto net = embed(h, g, k, d);
    std::vector<double> window((k + 1) * d);
    for (int w = 0; w < 200; ++w) {
      for (double& v : window) v = rng.uniform();
      const double want = direct_recursion(h, g, window, k, d);
      const double got = forward(net, window).output;
      REQUIRE(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("halton points are nested and inside the box") {
  for (std::size_t i = 0; i < 200; ++i) {
    const auto p = halton_point(i, 3, 2.0, 9);
    REQUIRE(p.size() == 3);
    for (double v : p) CHECK((v >= -2.0 && v <= 2.0));
    CHECK(p == halton_point(i, 3, 2.0, 9));
  }
  CHECK(halton_point(5, 2, 1.0, 1) != halton_point(5, 2, 1.0, 2));
}

TEST_CASE("measure_sup_error") {
  CounterRng rng(45, 0);
  const auto net = oracle::random_feedforward(2, 2, 4, rng);
  const ScalarField same = [&](std::span<const double> x) { return net.evaluate(x); };
  CHECK(measure_sup_error(same, net, 2.0, 256, 1) == 0.0);
  CHECK_THROWS_AS(measure_sup_error(same, net, 2.0, 0, 1), PreconditionError);

  const ScalarField f = [](std::span<const double> x) { return std::sin(x[0]) * std::cos(0.5 * x[1]) + 0.3 * x[1]; };
  double prev = 0.0;
  for (std::size_t s = 16; s <= 4096; s *= 2) {
    const double e = measure_sup_error(f, net, 2.0, s, 3);
    CHECK(e >= prev);
    prev = e;
  }

  // Dense 1000 x 1000 grid, corners included.
  double dense = 0.0;
  std::vector<double> x(2);
  for (int i = 0; i < 1000; ++i)
    for (int j = 0; j < 1000; ++j) {
      x[0] = -2.0 + 4.0 * i / 999.0;
      x[1] = -2.0 + 4.0 * j / 999.0;
      dense = std::max(dense, std::abs(f(x) - net.evaluate(x)));
    }
  const double sampled = measure_sup_error(f, net, 2.0, 4096, 3);
  CHECK(sampled <= dense * (1 + 1e-12));
  CHECK(sampled >= 0.95 * dense);
}

TEST_CASE("embedding trained approximants respects the propagation bound") {
  const ModelSpec spec = ModelSpec::create("tanh_sin", 1, 2, {}, 0.0);
  const double a = spec.range_bound();
  const ScalarField h_true = [&](std::span<const double> x) { return spec.h(x.first(1), x[1]); };
  const ScalarField g_true = [&](std::span<const double> x) { return spec.g(x.first(1), x[1]); };

  ApproximantConfig cfg;
  cfg.widths = {8, 8};
  cfg.box_half_width = 2 * a;
  cfg.samples = 512;
  cfg.steps = 1500;
  cfg.seed = 1;
  const auto h_net = fit_approximant(h_true, 2, cfg);
  cfg.seed = 2;
  const auto g_net = fit_approximant(g_true, 2, cfg);

  Lemma4Instance inst;
  inst.k = spec.k();
  inst.bound_a = a;
  inst.lip_g = spec.lip_g();
  inst.lip_h = spec.lip_h();
  inst.sup_h_err = measure_sup_error(h_true, h_net, 2 * a, 20000, 7);
  inst.sup_g_err = measure_sup_error(g_true, g_net, 2 * a, 20000, 8);
  MESSAGE("sup errors h " << inst.sup_h_err << " g " << inst.sup_g_err);
  REQUIRE(inst.hypothesis_holds());
  const double bound = lemma4_bound(inst);

  const auto net = embed(h_net, g_net, spec.k(), spec.d());
  CounterRng rng(46, 0);
  std::vector<double> window(3);
  for (int w = 0; w < 500; ++w) {
    for (double& v : window) v = rng.uniform();
    CHECK(std::abs(forward(net, window).output - regression_fn(spec, window)) <= bound);
  }

  // Chained into squared error: the excess risk of the embedded net.
  const auto risk = evaluate_excess_risk(net, spec, 1000, 10.0, 4000, 3);
  CHECK(risk.excess <= bound * bound + 3 * risk.std_err);
}
