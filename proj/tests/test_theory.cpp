#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "recnet/errors.hpp"
#include "recnet/network.hpp"
#include "recnet/theory.hpp"

using namespace recnet;

TEST_CASE("schedule") {
  ScheduleConstants c;
  c.c6 = 1.0;
  CHECK(schedule(256, 2, 1, 1.0, 1.0, c).l1 == 4);
  c.c4 = 3.2;
  for (std::size_t n : {2, 10, 1000, 100000}) CHECK(schedule(n, 1, 1, 1.0, 1.0, c).k1 == 4);

  // Exact powers are not pushed to the next integer by rounding.
  c.c6 = c.c7 = 1.0;
  CHECK(schedule(16, 1, 1, 1.0, 1.0, c).l1 == 2);
  CHECK(schedule(17, 1, 1, 1.0, 1.0, c).l1 == 3);
  CHECK(schedule(4096, 1, 1, 1.0, 1.0, c).l2 == 8);
  // (d+1)/(2(2p+d+1)) with d = 2, p = 0.75: exponent 1/3, 512^{1/3} = 8.
  CHECK(schedule(512, 1, 2, 0.75, 0.75, c).l1 == 8);
  CHECK(schedule(513, 1, 2, 0.75, 0.75, c).l1 == 9);

  std::size_t prev = 0;
  for (std::size_t n = 2; n < 5000; n += 37) {
    const std::size_t l = schedule(n, 1, 1, 1.0, 1.0, c).l1;
    CHECK(l >= prev);
    prev = l;
  }

  const auto cfg = schedule(1000, 3, 2, 2.0, 0.5, ScheduleConstants{});
  CHECK(cfg.k == 3);
  CHECK(cfg.d == 2);
  CHECK(cfg.l1 > cfg.l2);  // rougher H needs the deeper block

  ScheduleConstants bad;
  bad.c5 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(schedule(1, 1, 1, 1.0, 1.0, c), PreconditionError);
}

TEST_CASE("rate exponent") {
  for (std::size_t k = 1; k <= 6; ++k) CHECK(rate(1000, 1, 1.0, 1.0).exponent == -0.5);
  CHECK(rate(1000, 1, 1.0, 1.0).rate_value == doctest::Approx(std::pow(std::log(1000.0), 6) / std::sqrt(1000.0)));
  CHECK(rate(1000, 3, 2.0, 0.7).exponent == rate(1000, 3, 0.7, 5.0).exponent);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rate(100, 2, inf, inf).exponent == -1.0);
  double prev = 0.0;
  for (double p : {0.5, 1.0, 4.0, 64.0, 1e6}) {
    const double e = rate(100, 2, p, p).exponent;
    CHECK(e < prev);
    CHECK(e > -1.0);
    prev = e;
  }
  CHECK_THROWS_AS(rate(1, 1, 1.0, 1.0), PreconditionError);
}

TEST_CASE("rate exponent matches the depth schedule") {
  // Squared approximation error L^{-4p/(d+1)} at L ~ n^{(d+1)/(2(2p+d+1))}.
  for (std::size_t d = 1; d <= 5; ++d)
    for (double p : {0.5, 1.0, 1.5, 3.0}) {
      const double dd = static_cast<double>(d) + 1.0;
      const double depth_exp = dd / (2.0 * (2.0 * p + dd));
      CHECK(-4.0 * p / dd * depth_exp == doctest::Approx(rate(100, d, p, p).exponent).epsilon(1e-15));
    }
}

TEST_CASE("unfolded stats") {
  NetConfig c;
  c.k = 1;
  c.l1 = 2;
  c.l2 = 3;
  CHECK(unfolded_stats(c).layers == 10);
  c.k1 = 4;
  c.k2 = 6;
  c.d = 2;
  CHECK(unfolded_stats(c).max_width == 12);
  c.hidden_bias = true;
  CHECK(unfolded_stats(c).max_width == 13);
  CHECK(unfolded_stats(c).distinct_weights == count_distinct_weights(c));
}

TEST_CASE("log covering bound") {
  NetConfig c;
  CHECK(log_covering_bound(c, std::numbers::e, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  c.k1 = 3;
  c.k2 = 2;
  const double base = log_covering_bound(c, 500, 2.0);
  c.k1 = 6;
  CHECK(log_covering_bound(c, 500, 2.0) == doctest::Approx(4.0 * base).epsilon(1e-15));
  CHECK(log_covering_bound(c, 600, 2.0) > log_covering_bound(c, 500, 2.0));
  CHECK(log_covering_bound(c, 500, 3.0) > log_covering_bound(c, 500, 2.0));
  NetConfig deeper = c;
  deeper.l2 = 3;
  CHECK(log_covering_bound(deeper, 500, 2.0) > log_covering_bound(c, 500, 2.0));
  deeper.k = 2;
  CHECK(log_covering_bound(deeper, 500, 2.0) > log_covering_bound(c, 500, 2.0) * 1.5);
  CHECK_THROWS_AS(log_covering_bound(c, 500, 0.0), PreconditionError);
}
