#include "recnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "recnet/batch.hpp"
#include "recnet/errors.hpp"
#include "recnet/io.hpp"
#include "recnet/parallel.hpp"
#include "recnet/rng.hpp"

namespace recnet {

namespace {

constexpr std::size_t kEvalChunk = 4096;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct LineFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const std::size_t m = x.size();
  if (m < 2) return out;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.slope = sxy / sxx;
  if (m >= 3) {
    const double icept = my - out.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = y[i] - icept - out.slope * x[i];
      ssr += r * r;
    }
    out.stderr_ = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  }
  return out;
}

}  // namespace

ExcessRisk evaluate_excess_risk(const RecurrentNetwork& net, const ModelSpec& spec,
                                std::size_t n_train, double c2, std::size_t test_points,
                                std::uint64_t seed) {
  if (test_points < 100) throw PreconditionError("evaluate_excess_risk: test_points must be >= 100");
  const NetConfig& c = net.config();
  if (c.k != spec.k() || c.d != spec.d())
    throw ConfigError("evaluate_excess_risk: network and model disagree on k or d");

  const double beta = truncation_level(static_cast<double>(n_train), c2);
  const std::size_t w = c.window_size();
  CounterRng rng(seed, stream::kTest);
  BatchTape tape(c);
  std::vector<double> windows;
  std::vector<double> targets;
  double sum = 0.0, sum_sq = 0.0;

  for (std::size_t done = 0; done < test_points;) {
    const std::size_t b = std::min(kEvalChunk, test_points - done);
    windows.resize(b * w);
    targets.resize(b);
    for (double& v : windows) v = rng.uniform();
    for (std::size_t i = 0; i < b; ++i)
      targets[i] = regression_fn(spec, std::span<const double>(windows).subspan(i * w, w));
    tape.load_windows(windows);
    tape.forward(net);
    const auto out = tape.outputs();
    for (std::size_t i = 0; i < b; ++i) {
      const double e = truncate(out[i], beta) - targets[i];
      sum += e * e;
      sum_sq += e * e * e * e;
    }
    done += b;
  }

  const double m = static_cast<double>(test_points);
  ExcessRisk r;
  r.excess = sum / m;
  const double var = std::max(0.0, (sum_sq - m * r.excess * r.excess) / (m - 1.0));
  r.std_err = std::sqrt(var / m);
  r.total = r.excess + bayes_risk(spec);
  return r;
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("experiment: n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 * model.k() + 2)
      throw ConfigError("experiment: every n must be >= 2k + 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw ConfigError("experiment: n_grid must be strictly increasing");
  }
  if (replications == 0) throw ConfigError("experiment: replications must be >= 1");
  if (test_points < 100) throw ConfigError("experiment: test_points must be >= 100");
  schedule_constants.validate();
}

std::uint64_t row_seed(std::uint64_t base_seed, std::size_t n, std::size_t replication) {
  return base_seed ^ hash_combine(hash_combine(0, n), replication);
}

SweepRow sweep_row(const ExperimentConfig& cfg, std::size_t n, std::size_t replication,
                   std::size_t threads) {
  const ModelSpec& spec = cfg.model;
  SweepRow row;
  row.n = n;
  row.replication = replication;
  row.seed = row_seed(cfg.base_seed, n, replication);
  row.bayes_risk = bayes_risk(spec);

  EstimatorConfig est = cfg.estimator;
  const bool bias = est.net.hidden_bias;
  est.net = schedule(n, spec.k(), spec.d(), spec.smoothness().p_g, spec.smoothness().p_h,
                     cfg.schedule_constants);
  est.net.hidden_bias = bias;
  est.c2 = cfg.schedule_constants.c2;
  est.seed = hash_combine(row.seed, stream::kFit);
  row.l1 = est.net.l1;
  row.l2 = est.net.l2;
  row.k1 = est.net.k1;
  row.k2 = est.net.k2;

  const auto start = std::chrono::steady_clock::now();
  const Dataset data = simulate(spec, n, hash_combine(row.seed, stream::kData));
  try {
    const FitResult fitted = fit(data, est, threads);
    const ExcessRisk risk = evaluate_excess_risk(fitted.net, spec, n, est.c2, cfg.test_points,
                                                 hash_combine(row.seed, stream::kEval));
    row.empirical_risk = fitted.report.final_empirical_risk;
    row.excess_risk_mc = risk.excess;
    row.total_risk_mc = risk.total;
  } catch (const FitFailure&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.failed = true;
    row.empirical_risk = row.excess_risk_mc = row.total_risk_mc = nan;
  }
  row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return row;
}

std::string format_row(const SweepRow& r) {
  using io::format_double;
  std::string s;
  s += std::to_string(r.n) + ',' + std::to_string(r.replication) + ',' + std::to_string(r.seed);
  s += ',' + std::to_string(r.l1) + ',' + std::to_string(r.l2);
  s += ',' + std::to_string(r.k1) + ',' + std::to_string(r.k2);
  s += ',' + format_double(r.empirical_risk) + ',' + format_double(r.excess_risk_mc);
  s += ',' + format_double(r.bayes_risk) + ',' + format_double(r.total_risk_mc);
  s += ',' + std::to_string(r.wall_time_ms);
  return s;
}

std::vector<SweepRow> rate_sweep(const ExperimentConfig& cfg, std::size_t threads) {
  cfg.validate();
  if (threads == 0) threads = thread_budget();

  std::ofstream csv;
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / "sweep.csv";
    csv.open(path, std::ios::trunc);
    if (!csv) throw ConfigError("cannot write " + path.string());
    csv << kSweepHeader << '\n' << std::flush;
  }

  std::vector<SweepRow> rows;
  for (std::size_t n : cfg.n_grid) {
    std::vector<SweepRow> block(cfg.replications);
    const std::size_t outer = std::min(threads, cfg.replications);
    const std::size_t inner = std::max<std::size_t>(1, threads / outer);
    parallel_for(cfg.replications, outer,
                 [&](std::size_t r) { block[r] = sweep_row(cfg, n, r, inner); });
    for (const auto& row : block) {
      if (csv.is_open()) csv << format_row(row) << '\n';
      rows.push_back(row);
    }
    if (csv.is_open()) csv.flush();
  }

  if (!cfg.output_dir.empty())
    io::write_json_file(std::filesystem::path(cfg.output_dir) / "summary.json",
                        io::to_json(cfg, summarize(cfg, rows)));
  return rows;
}

SweepSummary summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  SweepSummary s;
  const auto& sm = cfg.model.smoothness();
  s.theoretical_exponent = rate(cfg.n_grid.front(), cfg.model.d(), sm.p_g, sm.p_h).exponent;

  std::vector<double> log_n, log_med, log_mean;
  for (std::size_t n : cfg.n_grid) {
    std::vector<double> ex;
    std::size_t failures = 0;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      if (r.failed) ++failures;
      else ex.push_back(r.excess_risk_mc);
    }
    const double med = median(ex);
    const double mean =
        ex.empty() ? std::numeric_limits<double>::quiet_NaN()
                   : std::accumulate(ex.begin(), ex.end(), 0.0) / static_cast<double>(ex.size());
    s.n.push_back(n);
    s.median_excess.push_back(med);
    s.mean_excess.push_back(mean);
    s.failures.push_back(failures);
    if (med > 0.0 && mean > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n)));
      log_med.push_back(std::log(med));
      log_mean.push_back(std::log(mean));
    }
  }
  const LineFit med_fit = fit_line(log_n, log_med);
  s.slope = med_fit.slope;
  s.slope_stderr = med_fit.stderr_;
  s.mean_slope = fit_line(log_n, log_mean).slope;

  s.strictly_decreasing = true;
  for (std::size_t i = 1; i < s.median_excess.size(); ++i)
    if (!(s.median_excess[i] < s.median_excess[i - 1])) s.strictly_decreasing = false;
  return s;
}

}  // namespace recnet
