#pragma once

#include <filesystem>

#include "json.hpp"
#include "recnet/datagen.hpp"
#include "recnet/feedforward.hpp"
#include "recnet/harness.hpp"
#include "recnet/network.hpp"
#include "recnet/theory.hpp"
#include "recnet/training.hpp"

namespace recnet::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

json to_json(const NetConfig& c);
NetConfig net_config_from_json(const json& j);

// {"config", "layer1_w", "hidden_w", "rec_w_layer1", "rec_w_bridge",
//  "output_w", "format_version"}; matrices as row-major nested arrays.
json to_json(const RecurrentNetwork& net);
RecurrentNetwork network_from_json(const json& j);

// {"input_dim", "layers": [{"w", "b"}...], "output_w", "format_version"}
json to_json(const FeedforwardNet& net);
FeedforwardNet feedforward_from_json(const json& j);

// {"name", "d", "k", "params", "noise_sigma", "smoothness"}; the derived
// "range_bound", "lip_g", "lip_h" are written for reference and, when
// present on input, must agree with the catalog.
json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const json& j);

// "batch" is "full" or a positive integer. Missing fields keep the values in
// `defaults`.
json to_json(const EstimatorConfig& cfg);
EstimatorConfig estimator_from_json(const json& j, const EstimatorConfig& defaults = {});

json to_json(const ScheduleConstants& c);
ScheduleConstants schedule_constants_from_json(const json& j,
                                               const ScheduleConstants& defaults = {});

// {"model", "n_grid", "replications", "estimator", "schedule_constants",
//  "test_points", "base_seed", "output_dir"}; only "model" and "n_grid" are
// required. The estimator's net is a template: only hidden_bias is used.
json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const json& j);

// summary.json: slope, slope_stderr, theoretical_exponent, config_echo and
// format_version, plus the per-n medians and means. NaN becomes null.
json to_json(const ExperimentConfig& cfg, const SweepSummary& summary);

// Diverged restarts appear as null risks.
json to_json(const FitReport& report);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// dir/data.csv with header t,x_1,...,x_d,y,usable and the sidecar
// dir/data.json {spec_name, params, seed, n, format_version}, where params is
// the full model description.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace recnet::io
