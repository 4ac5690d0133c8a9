#include "recnet/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recnet/errors.hpp"

namespace recnet {

void ScheduleConstants::validate() const {
  if (!(c4 > 0.0 && c5 > 0.0 && c6 > 0.0 && c7 > 0.0 && c2 > 0.0))
    throw ConfigError("ScheduleConstants: all constants must be > 0");
}

namespace {

std::size_t snapped_ceil(double v) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-12 * std::max(1.0, std::abs(v))) v = nearest;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

double depth_exponent(std::size_t d, double p) {
  const double dd = static_cast<double>(d) + 1.0;
  return dd / (2.0 * (2.0 * p + dd));
}

}  // namespace

NetConfig schedule(std::size_t n, std::size_t k, std::size_t d, double p_g, double p_h,
                   const ScheduleConstants& consts) {
  consts.validate();
  if (n < 2 || d == 0 || k == 0 || !(p_g > 0.0) || !(p_h > 0.0))
    throw PreconditionError("schedule: need n >= 2, k, d >= 1 and p_g, p_h > 0");
  const double nn = static_cast<double>(n);
  NetConfig c;
  c.k = k;
  c.d = d;
  c.k1 = snapped_ceil(consts.c4);
  c.k2 = snapped_ceil(consts.c5);
  c.l1 = snapped_ceil(consts.c6 * std::pow(nn, depth_exponent(d, p_h)));
  c.l2 = snapped_ceil(consts.c7 * std::pow(nn, depth_exponent(d, p_g)));
  return c;
}

RatePoint rate(std::size_t n, std::size_t d, double p_g, double p_h) {
  if (n < 2) throw PreconditionError("rate: n must be >= 2");
  if (!(p_g > 0.0) || !(p_h > 0.0)) throw PreconditionError("rate: smoothness must be > 0");
  const double p = std::min(p_g, p_h);
  RatePoint r;
  r.n = n;
  r.exponent = std::isinf(p) ? -1.0 : -2.0 * p / (2.0 * p + static_cast<double>(d) + 1.0);
  const double logn = std::log(static_cast<double>(n));
  r.rate_value = std::pow(logn, 6) * std::pow(static_cast<double>(n), r.exponent);
  return r;
}

UnfoldedStats unfolded_stats(const NetConfig& c) {
  c.validate();
  UnfoldedStats s;
  s.layers = (c.k + 1) * c.layers();
  s.max_width = std::max(c.k1, c.k2) + 2 * c.d + 2 + (c.hidden_bias ? 1 : 0);
  s.distinct_weights = count_distinct_weights(c);
  return s;
}

double log_covering_bound(const NetConfig& c, double n, double c20) {
  c.validate();
  if (!(c20 > 0.0)) throw PreconditionError("log_covering_bound: c20 must be > 0");
  if (!(n > 1.0)) throw PreconditionError("log_covering_bound: n must be > 1");
  const double L = static_cast<double>(std::max(c.l1, c.l2));
  const double K = static_cast<double>(std::max(c.k1, c.k2));
  const double logn = std::log(n);
  return c20 * static_cast<double>(c.k) * L * L * K * K * logn * logn;
}

}  // namespace recnet
