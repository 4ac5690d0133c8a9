#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "recnet/errors.hpp"
#include "recnet/harness.hpp"
#include "recnet/io.hpp"

using namespace recnet;
using io::json;

namespace {

int run_simulate(const std::string& spec_path, std::size_t n, std::uint64_t seed,
                 const std::string& out) {
  const ModelSpec spec = io::model_spec_from_json(io::read_json_file(spec_path));
  const Dataset data = simulate(spec, n, seed);
  io::write_dataset(data, out);
  std::cout << "wrote " << n << " rows to " << out << '\n';
  return 0;
}

int run_fit(const std::string& data_dir, const std::string& config_path, const std::string& out) {
  const Dataset data = io::read_dataset(data_dir);
  const EstimatorConfig cfg = io::estimator_from_json(io::read_json_file(config_path));
  const FitResult result = fit(data, cfg);
  json model = io::to_json(result.net);
  model["training"] = {{"estimator", io::to_json(cfg)}, {"n_train", data.n}};
  model["report"] = io::to_json(result.report);
  io::write_json_file(out, model);
  std::cout << io::to_json(result.report).dump() << '\n';
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& spec_path,
                 std::size_t test_points, std::uint64_t seed) {
  const json model = io::read_json_file(model_path);
  const RecurrentNetwork net = io::network_from_json(model);
  if (!model.contains("training"))
    throw ConfigError(model_path + ": missing \"training\" block (n_train, c2)");
  const auto& training = model.at("training");
  const std::size_t n_train = training.at("n_train").get<std::size_t>();
  const double c2 = training.at("estimator").value("c2", 1.0);
  const ModelSpec spec = io::model_spec_from_json(io::read_json_file(spec_path));
  const ExcessRisk r = evaluate_excess_risk(net, spec, n_train, c2, test_points, seed);
  std::cout << json{{"excess", r.excess}, {"total", r.total}, {"std_err", r.std_err}}.dump()
            << '\n';
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out) {
  ExperimentConfig cfg = io::experiment_from_json(io::read_json_file(config_path));
  cfg.output_dir = out;
  const auto rows = rate_sweep(cfg);
  const SweepSummary s = summarize(cfg, rows);
  for (std::size_t i = 0; i < s.n.size(); ++i)
    std::cout << "n=" << s.n[i] << " median_excess=" << io::format_double(s.median_excess[i])
              << " failures=" << s.failures[i] << '\n';
  std::cout << "slope=" << io::format_double(s.slope)
            << " theoretical=" << io::format_double(s.theoretical_exponent) << '\n';
  return 0;
}

int run_verify(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  const VerifySummary s = verify(suite, seed, trials);
  std::cout << json{{"suite", suite},
                    {"passed", s.passed},
                    {"failed", s.failed},
                    {"worst_case", s.worst_case}}
                   .dump()
            << '\n';
  return s.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent network regression for dependent data"};
  app.require_subcommand(1);

  std::string spec, out, data, config, model, suite;
  std::size_t n = 0, test_points = 0, trials = 0;
  std::uint64_t seed = 0;

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from a catalog model");
  sim->add_option("--spec", spec, "Model spec JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--n", n, "Number of rows")->required();
  sim->add_option("--seed", seed, "Seed")->required();
  sim->add_option("--out", out, "Output directory")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Fit the estimator to a dataset");
  fit_cmd->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  fit_cmd->add_option("--config", config, "Estimator config JSON")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", out, "Model JSON to write")->required();

  auto* eval = app.add_subcommand("evaluate", "Monte-Carlo excess risk of a fitted model");
  eval->add_option("--model", model, "Model JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--spec", spec, "Model spec JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--test-points", test_points, "Number of test windows")->required();
  eval->add_option("--seed", seed, "Seed")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a convergence-rate sweep");
  sweep->add_option("--config", config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory")->required();

  auto* ver = app.add_subcommand("verify", "Run a randomised property suite");
  ver->add_option("--suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(verify_suites()));
  ver->add_option("--trials", trials, "Number of random instances")->required();
  ver->add_option("--seed", seed, "Seed")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return run_simulate(spec, n, seed, out);
    if (*fit_cmd) return run_fit(data, config, out);
    if (*eval) return run_evaluate(model, spec, test_points, seed);
    if (*sweep) return run_sweep(config, out);
    if (*ver) return run_verify(suite, trials, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
