#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "recnet/batch.hpp"
#include "recnet/datagen.hpp"
#include "recnet/network.hpp"
#include "recnet/rng.hpp"

namespace recnet {

struct OptimizerConfig {
  double learning_rate = 0.003;
  std::size_t steps = 2000;
  std::size_t restarts = 3;
  std::size_t batch = 0;  // 0 = full batch
  double moment_decay_1 = 0.9;
  double moment_decay_2 = 0.999;

  bool operator==(const OptimizerConfig&) const = default;
};

struct EstimatorConfig {
  NetConfig net;
  double c2 = 1.0;  // truncation level beta_n = c2 * ln(n)
  OptimizerConfig optimizer;
  double init_scale = 1.0;
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range fields.
  void validate() const;
  bool operator==(const EstimatorConfig&) const = default;
};

struct FitReport {
  double final_empirical_risk = 0.0;
  std::vector<double> risk_per_restart;  // +inf for diverged restarts
  std::vector<bool> diverged;
  std::size_t chosen_restart = 0;
  std::size_t steps_run = 0;  // summed over restarts
  std::int64_t wall_time_ms = 0;
};

struct FitResult {
  RecurrentNetwork net;
  FitReport report;
};

/// (1/(n-k)) sum_{t=k+1}^{n} (Y_t - f(X_{t-k}, ..., X_t))^2.
double empirical_risk(const RecurrentNetwork& net, const Dataset& data);

/// Gradient of empirical_risk w.r.t. parameters(), by reverse accumulation
/// through time (shared weights summed over steps, relu'(0) = 0).
std::vector<double> gradient(const RecurrentNetwork& net, const Dataset& data);

/// Empirical risk and its gradient on a fixed set of windows of one dataset;
/// keeps its workspace between calls.
class RiskObjective {
 public:
  RiskObjective(const NetConfig& config, const Dataset& data);

  // Restricts the objective to windows ending at the given 1-based times.
  void select(std::span<const std::size_t> times);
  void select_all();
  std::size_t size() const noexcept { return newest_.size(); }

  double risk(const RecurrentNetwork& net);
  // Fills grad (resized) and returns the risk at net.
  double risk_and_gradient(const RecurrentNetwork& net, std::vector<double>& grad);

 private:
  const Dataset& data_;
  BatchTape tape_;
  std::vector<std::size_t> newest_;  // 0-based row index of each window's last input
  std::vector<double> targets_;
  std::vector<double> residual_;
};

/// Weights i.i.d. uniform on +-init_scale / sqrt(fan_in), where fan_in is the
/// column count of the matrix the weight sits in (K2 for the read-out).
RecurrentNetwork initialize(const NetConfig& config, double init_scale, CounterRng& rng);

/// Multi-restart Adam on the empirical risk. Restart r starts from
/// initialize(.., CounterRng(hash_combine(seed, r), stream::kInit)) and keeps
/// its best iterate; the best restart wins. Deterministic in (data, cfg);
/// restarts run on up to `threads` workers (0 = thread_budget()).
/// Throws PreconditionError when data.n < 2k + 2 or the configs disagree,
/// FitFailure when every restart diverges.
FitResult fit(const Dataset& data, const EstimatorConfig& cfg, std::size_t threads = 0);

/// beta_n = c2 * ln(n_train).
double truncation_level(double n_train, double c2);

/// T_beta(forward(net, window)) with beta = truncation_level(n_train, c2).
double predict(const RecurrentNetwork& net, std::span<const double> window, std::size_t n_train,
               double c2);

}  // namespace recnet
