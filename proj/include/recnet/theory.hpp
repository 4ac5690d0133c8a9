#pragma once

#include <cstddef>

#include "recnet/network.hpp"

namespace recnet {

// The constants are experiment knobs: no numeric values exist for them, so
// everything computed from them describes the shape of a bound only.
struct ScheduleConstants {
  double c4 = 8.0;  // K1 = ceil(c4)
  double c5 = 8.0;  // K2 = ceil(c5)
  double c6 = 0.5;  // L1 = ceil(c6 n^{(d+1) / (2 (2 p_H + d + 1))})
  double c7 = 0.5;  // L2 = ceil(c7 n^{(d+1) / (2 (2 p_G + d + 1))})
  double c2 = 1.0;  // truncation beta_n = c2 ln n

  void validate() const;
  bool operator==(const ScheduleConstants&) const = default;
};

/// Network size for sample size n. Values within 1e-12 (relative) of an
/// integer are treated as that integer before taking the ceiling, so exact
/// powers such as 256^{1/4} give 4 and not 5.
NetConfig schedule(std::size_t n, std::size_t k, std::size_t d, double p_g, double p_h,
                   const ScheduleConstants& consts);

struct RatePoint {
  std::size_t n = 0;
  double rate_value = 0.0;  // (ln n)^6 n^exponent, constant factor omitted
  double exponent = 0.0;    // -2p / (2p + d + 1), p = min(p_g, p_h)
};

RatePoint rate(std::size_t n, std::size_t d, double p_g, double p_h);

struct UnfoldedStats {
  std::size_t layers = 0;           // (k + 1)(L1 + L2)
  std::size_t max_width = 0;        // max(K1, K2) + 2d + 2, +1 with hidden_bias
  std::size_t distinct_weights = 0;  // count_distinct_weights
};

UnfoldedStats unfolded_stats(const NetConfig& config);

/// c20 * k * L^2 * K^2 * (ln n)^2 with L = max(L1, L2), K = max(K1, K2).
double log_covering_bound(const NetConfig& config, double n, double c20);

}  // namespace recnet
