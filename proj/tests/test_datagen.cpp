#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "recnet/datagen.hpp"
#include "recnet/errors.hpp"

using namespace recnet;

namespace {

// H(x, z) = x_1 + z/2 and G(x, z) = x_1 + z, from the linear catalog entry.
ModelSpec hand_model(std::size_t k) {
  return ModelSpec::create("linear", 1, k, {{"g0", 0.0}, {"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"rho", 0.5}},
                           0.0);
}

ModelSpec random_spec(CounterRng& rng, std::size_t d, std::size_t k) {
  switch (rng.below(4)) {
    case 0:
      return ModelSpec::create("tanh_sin", d, k,
                               {{"alpha", rng.uniform(1, 2)}, {"beta", rng.uniform(0.2, 2)}, {"gamma", rng.uniform(-2, 2)}}, 0.0);
    case 1:
      return ModelSpec::create("linear", d, k,
                               {{"g0", rng.uniform(-1, 1)}, {"a", rng.uniform(-2, 2)}, {"b", rng.uniform(-2, 2)},
                                {"c", rng.uniform(-2, 2)}, {"rho", rng.uniform(-0.95, 0.95)}}, 0.0);
    case 2:
      return ModelSpec::create("poly", d, k,
                               {{"a", rng.uniform(-2, 2)}, {"gamma", rng.uniform(-2, 2)}, {"c", rng.uniform(-4, 4)},
                                {"rho", rng.uniform(-0.95, 0.95)}}, 0.0);
    default:
      return ModelSpec::create("holder", d, k,
                               {{"s", rng.uniform(0.1, 1)}, {"gamma", rng.uniform(-2, 2)}, {"c", rng.uniform(-2, 2)},
                                {"rho", rng.uniform(-0.95, 0.95)}}, 0.0);
  }
}

}  // namespace

TEST_CASE("catalog and parameter validation") {
  CHECK(ModelSpec::catalog_names() == std::vector<std::string>{"tanh_sin", "linear", "poly", "holder"});
  CHECK_THROWS_AS(ModelSpec::create("nope", 1, 1, {}, 0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("tanh_sin", 1, 1, {{"delta", 1.0}}, 0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("tanh_sin", 1, 1, {{"alpha", 0.5}}, 0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("linear", 1, 1, {{"rho", 1.5}}, 0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("holder", 1, 1, {{"s", 1.5}}, 0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("tanh_sin", 1, 1, {}, -1.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::create("tanh_sin", 0, 1, {}, 0.0), ConfigError);

  const auto t = ModelSpec::create("tanh_sin", 2, 3, {{"alpha", 2.0}, {"beta", 0.75}}, 0.1);
  CHECK(t.range_bound() == 2.0);
  CHECK(t.lip_h() == 1.5);
  CHECK(t.lip_g() == 1.5);
  CHECK(t.params().at("gamma") == 1.5);
}

TEST_CASE("hk") {
  // H(x, z) = z: the zero state is a fixed point.
  const auto fixed = ModelSpec::create("linear", 1, 3, {{"c", 0.0}, {"rho", 1.0}}, 0.0);
  const std::vector<double> xs{0.3, 0.9, 0.1};
  CHECK(hk(fixed, xs) == 0.0);

  const std::vector<double> two{0.4, 0.6};
  CHECK(hk(hand_model(2), two) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(hk(hand_model(2), xs), ConfigError);
}

TEST_CASE("regression_fn") {
  const auto zero = ModelSpec::create("linear", 1, 2, {{"a", 0.0}, {"b", 1.0}, {"c", 0.0}, {"rho", 1.0}}, 0.0);
  const std::vector<double> w{0.4, 0.6, 0.5};
  CHECK(regression_fn(zero, w) == 0.0);
  CHECK(regression_fn(hand_model(2), w) == doctest::Approx(1.3).epsilon(1e-15));
  const std::vector<double> bad{0.4, 0.6};
  CHECK_THROWS_AS(regression_fn(hand_model(2), bad), ConfigError);

  CounterRng rng(21, 0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 1 + rng.below(5), d = 1 + rng.below(3);
    const auto spec = random_spec(rng, d, k);
    std::vector<double> window((k + 1) * d);
    for (double& v : window) v = rng.uniform();
    const auto past = std::span<const double>(window).first(k * d);
    CHECK(regression_fn(spec, window) == spec.g(std::span<const double>(window).last(d), hk(spec, past)));
  }
}

TEST_CASE("hk iterative equals recursive") {
  CounterRng rng(22, 0);
  for (int i = 0; i < 500; ++i) {
    const std::size_t k = 1 + rng.below(8), d = 1 + rng.below(3);
    const auto spec = random_spec(rng, d, k);
    std::vector<double> xs(k * d);
    for (double& v : xs) v = rng.uniform();
    REQUIRE(hk(spec, xs) == oracle::hk_recursive(spec, xs, k));
  }
}

TEST_CASE("catalog Lipschitz constants and range bound hold on samples") {
  CounterRng rng(23, 0);
  for (int m = 0; m < 40; ++m) {
    const std::size_t d = 1 + rng.below(3);
    const auto spec = random_spec(rng, d, 2);
    const double a = spec.range_bound();
    CHECK(a >= 1.0);
    std::vector<double> x(d);
    for (int i = 0; i < 250; ++i) {
      for (double& v : x) v = rng.uniform();
      const double z1 = rng.uniform(-a, a), z2 = rng.uniform(-a, a);
      CHECK(std::abs(spec.h(x, z1)) <= a);
      if (z1 == z2) continue;
      const double dz = std::abs(z1 - z2);
      CHECK(std::abs(spec.h(x, z1) - spec.h(x, z2)) <= spec.lip_h() * dz * (1 + 1e-12) + 1e-15);
      CHECK(std::abs(spec.g(x, z1) - spec.g(x, z2)) <= spec.lip_g() * dz * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("simulate") {
  const auto spec = ModelSpec::create("tanh_sin", 2, 3, {}, 0.0);
  const Dataset a = simulate(spec, 50, 9);
  CHECK(a.n == 50);
  CHECK(a.xs.size() == 100);
  CHECK(a.ys.size() == 50);
  for (double v : a.xs) CHECK((v >= 0.0 && v < 1.0));
  for (std::size_t t = 1; t <= 50; ++t) CHECK(a.usable[t - 1] == (t > 3));
  for (std::size_t t = 4; t <= 50; ++t) CHECK(a.y(t) == regression_fn(spec, a.window(t)));

  const Dataset b = simulate(spec, 50, 9);
  CHECK(a.xs == b.xs);
  CHECK(a.ys == b.ys);
  CHECK(simulate(spec, 50, 10).xs != a.xs);
  CHECK_THROWS_AS(simulate(spec, 3, 1), PreconditionError);
}

TEST_CASE("placeholder rows use zero-padded history") {
  const auto spec = ModelSpec::create("tanh_sin", 1, 2, {}, 0.5);
  const Dataset data = simulate(spec, 10, 4);
  CHECK(data.y(1) == spec.g(data.x(1), 0.0));
  CHECK(data.y(2) == spec.g(data.x(2), spec.h(data.x(1), 0.0)));
}

TEST_CASE("noise variance matches the Bayes risk") {
  CHECK(bayes_risk(ModelSpec::create("tanh_sin", 1, 1, {}, 0.0)) == 0.0);
  CHECK(bayes_risk(ModelSpec::create("tanh_sin", 1, 1, {}, 0.5)) == 0.25);

  const auto spec = ModelSpec::create("tanh_sin", 1, 2, {}, 0.25);
  const std::size_t n = 100000;
  const Dataset data = simulate(spec, n, 31);
  double s = 0, s2 = 0, s4 = 0;
  for (std::size_t t = 3; t <= n; ++t) {
    const double e = data.y(t) - regression_fn(spec, data.window(t));
    s += e;
    s2 += e * e;
    s4 += e * e * e * e;
  }
  const double m = static_cast<double>(n - 2);
  const double var = (s2 - s * s / m) / (m - 1);
  // Standard error of the sample variance from the fourth moment.
  const double se = std::sqrt((s4 / m - (s2 / m) * (s2 / m)) / m);
  CHECK(std::abs(var - 0.0625) <= 3 * se);
}
