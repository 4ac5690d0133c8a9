#include "recnet/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "recnet/errors.hpp"
#include "recnet/kernels.hpp"
#include "recnet/parallel.hpp"

namespace recnet {

void EstimatorConfig::validate() const {
  net.validate();
  if (!(c2 > 0.0)) throw ConfigError("EstimatorConfig: c2 must be > 0");
  if (!(init_scale > 0.0)) throw ConfigError("EstimatorConfig: init_scale must be > 0");
  const auto& o = optimizer;
  if (!(o.learning_rate > 0.0)) throw ConfigError("optimizer: learning_rate must be > 0");
  if (o.steps == 0) throw ConfigError("optimizer: steps must be >= 1");
  if (o.restarts == 0) throw ConfigError("optimizer: restarts must be >= 1");
  if (!(o.moment_decay_1 > 0.0 && o.moment_decay_1 < 1.0) ||
      !(o.moment_decay_2 > 0.0 && o.moment_decay_2 < 1.0))
    throw ConfigError("optimizer: moment decays must lie in (0, 1)");
}

namespace {

void check_compatible(const NetConfig& c, const Dataset& data) {
  if (c.k != data.spec.k() || c.d != data.spec.d())
    throw ConfigError("network (k=" + std::to_string(c.k) + ", d=" + std::to_string(c.d) +
                      ") does not match dataset (k=" + std::to_string(data.spec.k()) +
                      ", d=" + std::to_string(data.spec.d()) + ")");
  if (data.n < c.k + 1) throw PreconditionError("dataset has no complete window");
}

}  // namespace

RiskObjective::RiskObjective(const NetConfig& config, const Dataset& data)
    : data_(data), tape_(config) {
  check_compatible(config, data);
  select_all();
}

void RiskObjective::select(std::span<const std::size_t> times) {
  newest_.clear();
  targets_.clear();
  for (std::size_t t : times) {
    if (t <= data_.spec.k() || t > data_.n)
      throw ConfigError("RiskObjective: window end " + std::to_string(t) + " out of range");
    newest_.push_back(t - 1);
    targets_.push_back(data_.y(t));
  }
  tape_.load_series(data_.xs, newest_);
}

void RiskObjective::select_all() {
  std::vector<std::size_t> times;
  for (std::size_t t = data_.spec.k() + 1; t <= data_.n; ++t) times.push_back(t);
  select(times);
}

double RiskObjective::risk(const RecurrentNetwork& net) {
  tape_.forward(net);
  const auto out = tape_.outputs();
  residual_.resize(out.size());
  for (std::size_t b = 0; b < out.size(); ++b) residual_[b] = out[b] - targets_[b];
  return kernels::dot(residual_, residual_) / static_cast<double>(residual_.size());
}

double RiskObjective::risk_and_gradient(const RecurrentNetwork& net, std::vector<double>& grad) {
  const double r = risk(net);
  const double scale = 2.0 / static_cast<double>(residual_.size());
  for (double& v : residual_) v *= scale;
  grad.assign(count_distinct_weights(net.config()), 0.0);
  tape_.accumulate_gradient(net, residual_, grad);
  return r;
}

double empirical_risk(const RecurrentNetwork& net, const Dataset& data) {
  RiskObjective objective(net.config(), data);
  return objective.risk(net);
}

std::vector<double> gradient(const RecurrentNetwork& net, const Dataset& data) {
  RiskObjective objective(net.config(), data);
  std::vector<double> grad;
  objective.risk_and_gradient(net, grad);
  return grad;
}

RecurrentNetwork initialize(const NetConfig& c, double init_scale, CounterRng& rng) {
  RecurrentNetwork zero = RecurrentNetwork::zeros(c);
  std::vector<double> theta;
  theta.reserve(count_distinct_weights(c));
  auto fill = [&](std::size_t count, std::size_t fan_in) {
    const double a = init_scale / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) theta.push_back(rng.uniform(-a, a));
  };
  fill(zero.layer1_w().size(), zero.layer1_w().cols());
  for (const auto& m : zero.hidden_w()) fill(m.size(), m.cols());
  fill(zero.rec_w_layer1().size(), zero.rec_w_layer1().cols());
  fill(zero.rec_w_bridge().size(), zero.rec_w_bridge().cols());
  fill(zero.output_w().size(), zero.output_w().size());
  return RecurrentNetwork::from_parameters(c, theta);
}

namespace {

struct RestartOutcome {
  std::optional<RecurrentNetwork> best;
  double risk = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
};

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

RestartOutcome run_restart(const Dataset& data, const EstimatorConfig& cfg, std::size_t restart) {
  const auto& o = cfg.optimizer;
  CounterRng init_rng(hash_combine(cfg.seed, restart), stream::kInit);
  CounterRng batch_rng(hash_combine(cfg.seed, restart), stream::kBatch);

  RecurrentNetwork net = initialize(cfg.net, cfg.init_scale, init_rng);
  std::vector<double> theta = net.parameters();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad;

  RiskObjective full(cfg.net, data);
  const bool minibatch = o.batch != 0 && o.batch < full.size();
  std::optional<RiskObjective> sampled;
  std::vector<std::size_t> times(minibatch ? o.batch : 0);
  if (minibatch) sampled.emplace(cfg.net, data);

  RestartOutcome outcome;
  auto consider = [&](double risk) {
    if (risk < outcome.risk) {
      outcome.risk = risk;
      outcome.best = net;
    }
  };

  const double eps = 1e-8;
  double b1_pow = 1.0, b2_pow = 1.0;
  for (std::size_t step = 0; step < o.steps; ++step) {
    double risk;
    if (minibatch) {
      risk = full.risk(net);
      const std::size_t usable = data.n - data.spec.k();
      for (auto& t : times) t = data.spec.k() + 1 + batch_rng.below(usable);
      sampled->select(times);
      sampled->risk_and_gradient(net, grad);
    } else {
      risk = full.risk_and_gradient(net, grad);
    }
    ++outcome.steps;
    if (!std::isfinite(risk) || !all_finite(grad)) return RestartOutcome{{}, risk, outcome.steps};
    consider(risk);

    b1_pow *= o.moment_decay_1;
    b2_pow *= o.moment_decay_2;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = o.moment_decay_1 * m[i] + (1.0 - o.moment_decay_1) * grad[i];
      v[i] = o.moment_decay_2 * v[i] + (1.0 - o.moment_decay_2) * grad[i] * grad[i];
      const double mhat = m[i] / (1.0 - b1_pow);
      const double vhat = v[i] / (1.0 - b2_pow);
      theta[i] -= o.learning_rate * mhat / (std::sqrt(vhat) + eps);
    }
    if (!all_finite(theta)) return RestartOutcome{{}, std::numeric_limits<double>::quiet_NaN(), outcome.steps};
    net = RecurrentNetwork::from_parameters(cfg.net, theta);
  }
  const double last = full.risk(net);
  if (!std::isfinite(last)) return RestartOutcome{{}, last, outcome.steps};
  consider(last);
  return outcome;
}

}  // namespace

FitResult fit(const Dataset& data, const EstimatorConfig& cfg, std::size_t threads) {
  cfg.validate();
  check_compatible(cfg.net, data);
  if (data.n < 2 * cfg.net.k + 2)
    throw PreconditionError("fit: need n >= 2k + 2 observations, got n = " +
                            std::to_string(data.n));

  const auto start = std::chrono::steady_clock::now();
  const std::size_t restarts = cfg.optimizer.restarts;
  std::vector<RestartOutcome> outcomes(restarts);
  parallel_for(restarts, threads == 0 ? thread_budget() : threads,
               [&](std::size_t r) { outcomes[r] = run_restart(data, cfg, r); });

  FitReport report;
  std::optional<std::size_t> chosen;
  for (std::size_t r = 0; r < restarts; ++r) {
    const bool ok = outcomes[r].best.has_value();
    report.diverged.push_back(!ok);
    report.risk_per_restart.push_back(ok ? outcomes[r].risk
                                         : std::numeric_limits<double>::infinity());
    report.steps_run += outcomes[r].steps;
    if (ok && (!chosen || outcomes[r].risk < outcomes[*chosen].risk)) chosen = r;
  }
  if (!chosen) throw FitFailure("fit: all " + std::to_string(restarts) + " restarts diverged");
  report.chosen_restart = *chosen;
  report.final_empirical_risk = outcomes[*chosen].risk;
  report.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return {std::move(*outcomes[*chosen].best), std::move(report)};
}

double truncation_level(double n_train, double c2) {
  if (!(n_train >= 2.0)) throw PreconditionError("truncation level needs n_train >= 2");
  return c2 * std::log(n_train);
}

double predict(const RecurrentNetwork& net, std::span<const double> window, std::size_t n_train,
               double c2) {
  return truncate(forward(net, window).output,
                  truncation_level(static_cast<double>(n_train), c2));
}

}  // namespace recnet
