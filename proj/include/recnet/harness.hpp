#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "recnet/datagen.hpp"
#include "recnet/network.hpp"
#include "recnet/theory.hpp"
#include "recnet/training.hpp"

namespace recnet {

struct ExcessRisk {
  double excess = 0.0;   // mean of (predict - m)^2 over the test windows
  double total = 0.0;    // excess + bayes_risk
  double std_err = 0.0;  // Monte-Carlo standard error of excess
};

/// Draws test_points fresh windows (inputs uniform on [0,1]^d, stream kTest of
/// `seed`) and compares predict(net, ., n_train, c2) with regression_fn.
/// Throws PreconditionError when test_points < 100 and ConfigError when net
/// and spec disagree on k or d.
ExcessRisk evaluate_excess_risk(const RecurrentNetwork& net, const ModelSpec& spec,
                                std::size_t n_train, double c2, std::size_t test_points,
                                std::uint64_t seed);

struct ExperimentConfig {
  ModelSpec model = ModelSpec::create("tanh_sin", 1, 2, {}, 0.25);
  std::vector<std::size_t> n_grid{128, 256, 512, 1024, 2048};
  std::size_t replications = 10;
  // Template: net is replaced by schedule(n, ...) and seed by the row seed.
  EstimatorConfig estimator;
  ScheduleConstants schedule_constants;
  std::size_t test_points = 4000;
  std::uint64_t base_seed = 0;
  std::string output_dir;

  // Throws ConfigError unless n_grid is strictly increasing with every
  // n >= 2k + 2, replications >= 1 and test_points >= 100.
  void validate() const;
};

struct SweepRow {
  std::size_t n = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::size_t l1 = 0, l2 = 0, k1 = 0, k2 = 0;
  double empirical_risk = 0.0;
  double excess_risk_mc = 0.0;
  double bayes_risk = 0.0;
  double total_risk_mc = 0.0;
  std::int64_t wall_time_ms = 0;
  bool failed = false;  // fit failure; risks are NaN
};

inline constexpr const char* kSweepHeader =
    "n,replication,seed,l1,l2,k1,k2,empirical_risk,excess_risk_mc,bayes_risk,total_risk_mc,"
    "wall_time_ms";

/// base_seed ^ hash(n, replication). Per-row streams are then derived with
/// hash_combine(row_seed, stream::kData / kFit / kEval).
std::uint64_t row_seed(std::uint64_t base_seed, std::size_t n, std::size_t replication);

/// Runs one (n, replication) cell of a sweep.
SweepRow sweep_row(const ExperimentConfig& cfg, std::size_t n, std::size_t replication,
                   std::size_t threads);

std::string format_row(const SweepRow& row);

/// Every (n, replication) in grid order. Replications of one n run on up to
/// `threads` workers (0 = thread_budget()); when cfg.output_dir is non-empty,
/// sweep.csv is appended as each n completes and summary.json is written at
/// the end. Rows whose fit fails are kept with failed = true.
std::vector<SweepRow> rate_sweep(const ExperimentConfig& cfg, std::size_t threads = 0);

struct SweepSummary {
  std::vector<std::size_t> n;
  std::vector<double> median_excess;  // over successful replications
  std::vector<double> mean_excess;
  std::vector<std::size_t> failures;
  double slope = 0.0;         // least squares of log(median) on log(n)
  double slope_stderr = 0.0;  // NaN with fewer than three grid points
  double mean_slope = 0.0;
  double theoretical_exponent = 0.0;
  bool strictly_decreasing = false;
};

SweepSummary summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

struct VerifySummary {
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst_case = 0.0;
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"unfold", "gradient", "lemma4", "embed", "datagen"};
  return names;
}

/// Randomised property checks:
///   unfold    forward vs unfold().evaluate on random nets; worst = max |diff|
///   gradient  BPTT vs central differences of a long-double evaluation;
///             worst = max relative error
///   lemma4    error-propagation bound on perturbed catalog models;
///             worst = max (lhs - bound)
///   embed     embed() vs the explicit recursion; worst = max relative error
///   datagen   iterative vs recursive H_k and the range bound; worst = max |diff|
/// Throws ConfigError for an unknown suite, PreconditionError when trials == 0.
VerifySummary verify(std::string_view suite, std::uint64_t seed, std::size_t trials);

}  // namespace recnet
