#include "recnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "recnet/errors.hpp"

namespace recnet::io {

namespace {

void check_version(const json& j, const char* what) {
  if (j.contains("format_version") && j.at("format_version").get<int>() != kFormatVersion)
    throw ConfigError(std::string(what) + ": unsupported format_version");
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j.at(r).is_array() || j.at(r).size() != cols)
      throw ConfigError(std::string(what) + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const NetConfig& c) {
  return {{"k", c.k},   {"d", c.d},   {"k1", c.k1},
          {"k2", c.k2}, {"l1", c.l1}, {"l2", c.l2},
          {"hidden_bias", c.hidden_bias}};
}

NetConfig net_config_from_json(const json& j) {
  NetConfig c;
  try {
    c.k = j.at("k").get<std::size_t>();
    c.d = j.at("d").get<std::size_t>();
    c.k1 = j.at("k1").get<std::size_t>();
    c.k2 = j.at("k2").get<std::size_t>();
    c.l1 = j.at("l1").get<std::size_t>();
    c.l2 = j.at("l2").get<std::size_t>();
    c.hidden_bias = field_or(j, "hidden_bias", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("net config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const RecurrentNetwork& net) {
  json hidden = json::array();
  for (const auto& m : net.hidden_w()) hidden.push_back(matrix_to_json(m));
  return {{"config", to_json(net.config())},
          {"layer1_w", matrix_to_json(net.layer1_w())},
          {"hidden_w", hidden},
          {"rec_w_layer1", matrix_to_json(net.rec_w_layer1())},
          {"rec_w_bridge", matrix_to_json(net.rec_w_bridge())},
          {"output_w", net.output_w()},
          {"format_version", kFormatVersion}};
}

RecurrentNetwork network_from_json(const json& j) {
  check_version(j, "network");
  try {
    std::vector<Matrix> hidden;
    for (const auto& m : j.at("hidden_w")) hidden.push_back(matrix_from_json(m, "hidden_w"));
    return RecurrentNetwork(net_config_from_json(j.at("config")),
                            matrix_from_json(j.at("layer1_w"), "layer1_w"), std::move(hidden),
                            matrix_from_json(j.at("rec_w_layer1"), "rec_w_layer1"),
                            matrix_from_json(j.at("rec_w_bridge"), "rec_w_bridge"),
                            j.at("output_w").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }
}

json to_json(const FeedforwardNet& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) layers.push_back({{"w", matrix_to_json(l.w)}, {"b", l.b}});
  return {{"input_dim", net.input_dim()},
          {"layers", layers},
          {"output_w", net.output_w()},
          {"format_version", kFormatVersion}};
}

FeedforwardNet feedforward_from_json(const json& j) {
  check_version(j, "feedforward net");
  try {
    std::vector<FeedforwardNet::Layer> layers;
    for (const auto& l : j.at("layers"))
      layers.push_back({matrix_from_json(l.at("w"), "layers.w"), l.at("b").get<std::vector<double>>()});
    return FeedforwardNet(j.at("input_dim").get<std::size_t>(), std::move(layers),
                          j.at("output_w").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("feedforward net: ") + e.what());
  }
}

json to_json(const ModelSpec& spec) {
  const auto& s = spec.smoothness();
  return {{"name", spec.name()},
          {"d", spec.d()},
          {"k", spec.k()},
          {"params", spec.params()},
          {"noise_sigma", spec.noise_sigma()},
          {"smoothness", {{"p_g", s.p_g}, {"p_h", s.p_h}, {"c_g", s.c_g}, {"c_h", s.c_h}}},
          {"range_bound", spec.range_bound()},
          {"lip_g", spec.lip_g()},
          {"lip_h", spec.lip_h()}};
}

ModelSpec model_spec_from_json(const json& j) {
  try {
    const auto params = field_or(j, "params", std::map<std::string, double>{});
    ModelSpec::Smoothness smooth;
    const ModelSpec::Smoothness* smooth_ptr = nullptr;
    if (j.contains("smoothness")) {
      const auto& s = j.at("smoothness");
      const ModelSpec base = ModelSpec::create(j.at("name").get<std::string>(), 1, 1, {}, 0.0);
      smooth = base.smoothness();
      smooth.p_g = field_or(s, "p_g", smooth.p_g);
      smooth.p_h = field_or(s, "p_h", smooth.p_h);
      smooth.c_g = field_or(s, "c_g", smooth.c_g);
      smooth.c_h = field_or(s, "c_h", smooth.c_h);
      smooth_ptr = &smooth;
    }
    ModelSpec spec = ModelSpec::create(j.at("name").get<std::string>(), j.at("d").get<std::size_t>(),
                                       j.at("k").get<std::size_t>(), params,
                                       field_or(j, "noise_sigma", 0.0), smooth_ptr);
    auto check = [&](const char* key, double value) {
      if (j.contains(key) && std::abs(j.at(key).get<double>() - value) > 1e-12 * std::max(1.0, value))
        throw ConfigError(std::string("model spec: ") + key + " disagrees with the catalog value " +
                          format_double(value));
    };
    check("range_bound", spec.range_bound());
    check("lip_g", spec.lip_g());
    check("lip_h", spec.lip_h());
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }
}

json to_json(const EstimatorConfig& cfg) {
  const auto& o = cfg.optimizer;
  json batch = o.batch == 0 ? json("full") : json(o.batch);
  return {{"net", to_json(cfg.net)},
          {"c2", cfg.c2},
          {"optimizer",
           {{"learning_rate", o.learning_rate},
            {"steps", o.steps},
            {"restarts", o.restarts},
            {"batch", batch},
            {"moment_decay_1", o.moment_decay_1},
            {"moment_decay_2", o.moment_decay_2}}},
          {"init_scale", cfg.init_scale},
          {"seed", cfg.seed}};
}

EstimatorConfig estimator_from_json(const json& j, const EstimatorConfig& defaults) {
  EstimatorConfig cfg = defaults;
  try {
    if (j.contains("net")) cfg.net = net_config_from_json(j.at("net"));
    cfg.c2 = field_or(j, "c2", cfg.c2);
    cfg.init_scale = field_or(j, "init_scale", cfg.init_scale);
    cfg.seed = field_or(j, "seed", cfg.seed);
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      auto& d = cfg.optimizer;
      d.learning_rate = field_or(o, "learning_rate", d.learning_rate);
      d.steps = field_or(o, "steps", d.steps);
      d.restarts = field_or(o, "restarts", d.restarts);
      d.moment_decay_1 = field_or(o, "moment_decay_1", d.moment_decay_1);
      d.moment_decay_2 = field_or(o, "moment_decay_2", d.moment_decay_2);
      if (o.contains("batch")) {
        const auto& b = o.at("batch");
        if (b.is_string()) {
          if (b.get<std::string>() != "full")
            throw ConfigError("optimizer.batch must be \"full\" or a positive integer");
          d.batch = 0;
        } else {
          const auto v = b.get<long long>();
          if (v <= 0) throw ConfigError("optimizer.batch must be \"full\" or a positive integer");
          d.batch = static_cast<std::size_t>(v);
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("estimator config: ") + e.what());
  }
  return cfg;
}

json to_json(const ScheduleConstants& c) {
  return {{"c4", c.c4}, {"c5", c.c5}, {"c6", c.c6}, {"c7", c.c7}, {"c2", c.c2}};
}

ScheduleConstants schedule_constants_from_json(const json& j, const ScheduleConstants& defaults) {
  ScheduleConstants c = defaults;
  try {
    c.c4 = field_or(j, "c4", c.c4);
    c.c5 = field_or(j, "c5", c.c5);
    c.c6 = field_or(j, "c6", c.c6);
    c.c7 = field_or(j, "c7", c.c7);
    c.c2 = field_or(j, "c2", c.c2);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schedule constants: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const FitReport& report) {
  json risks = json::array();
  for (double r : report.risk_per_restart) risks.push_back(std::isfinite(r) ? json(r) : json(nullptr));
  return {{"final_empirical_risk", report.final_empirical_risk},
          {"risk_per_restart", risks},
          {"diverged", report.diverged},
          {"chosen_restart", report.chosen_restart},
          {"steps_run", report.steps_run},
          {"wall_time_ms", report.wall_time_ms}};
}

json to_json(const ExperimentConfig& cfg) {
  return {{"model", to_json(cfg.model)},
          {"n_grid", cfg.n_grid},
          {"replications", cfg.replications},
          {"estimator", to_json(cfg.estimator)},
          {"schedule_constants", to_json(cfg.schedule_constants)},
          {"test_points", cfg.test_points},
          {"base_seed", cfg.base_seed},
          {"output_dir", cfg.output_dir},
          {"format_version", kFormatVersion}};
}

ExperimentConfig experiment_from_json(const json& j) {
  check_version(j, "experiment config");
  ExperimentConfig cfg;
  try {
    cfg.model = model_spec_from_json(j.at("model"));
    cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    cfg.replications = field_or(j, "replications", cfg.replications);
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      if (e.contains("net")) {
        cfg.estimator.net.hidden_bias = field_or(e.at("net"), "hidden_bias", false);
        json rest = e;
        rest.erase("net");
        cfg.estimator = estimator_from_json(rest, cfg.estimator);
      } else {
        cfg.estimator = estimator_from_json(e, cfg.estimator);
      }
    }
    if (j.contains("schedule_constants"))
      cfg.schedule_constants = schedule_constants_from_json(j.at("schedule_constants"));
    cfg.test_points = field_or(j, "test_points", cfg.test_points);
    cfg.base_seed = field_or(j, "base_seed", cfg.base_seed);
    cfg.output_dir = field_or(j, "output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json reals_or_null(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(real_or_null(x));
  return out;
}

}  // namespace

json to_json(const ExperimentConfig& cfg, const SweepSummary& s) {
  // Rate values and covering bounds carry no constant factor (c8 = c20 = 1).
  const auto& sm = cfg.model.smoothness();
  json per_n = json::array();
  for (std::size_t n : cfg.n_grid) {
    const NetConfig net = schedule(n, cfg.model.k(), cfg.model.d(), sm.p_g, sm.p_h,
                                   cfg.schedule_constants);
    const UnfoldedStats u = unfolded_stats(net);
    per_n.push_back({{"n", n},
                     {"rate_value", rate(n, cfg.model.d(), sm.p_g, sm.p_h).rate_value},
                     {"net", to_json(net)},
                     {"unfolded_layers", u.layers},
                     {"unfolded_width_bound", u.max_width},
                     {"unfolded_width", unfolded_width(net)},
                     {"distinct_weights", u.distinct_weights},
                     {"log_covering_bound", log_covering_bound(net, static_cast<double>(n), 1.0)}});
  }
  return {{"slope", real_or_null(s.slope)},
          {"theory", {{"shape_only", true}, {"per_n", per_n}}},
          {"slope_stderr", real_or_null(s.slope_stderr)},
          {"theoretical_exponent", s.theoretical_exponent},
          {"mean_slope", real_or_null(s.mean_slope)},
          {"n_grid", s.n},
          {"median_excess", reals_or_null(s.median_excess)},
          {"mean_excess", reals_or_null(s.mean_excess)},
          {"failures", s.failures},
          {"strictly_decreasing", s.strictly_decreasing},
          {"config_echo", to_json(cfg)},
          {"format_version", kFormatVersion}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t d = data.spec.d();
  std::ofstream csv(dir / "data.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "data.csv").string());
  csv << 't';
  for (std::size_t i = 1; i <= d; ++i) csv << ",x_" << i;
  csv << ",y,usable\n";
  for (std::size_t t = 1; t <= data.n; ++t) {
    csv << t;
    for (double v : data.x(t)) csv << ',' << format_double(v);
    csv << ',' << format_double(data.y(t)) << ',' << (data.usable[t - 1] ? 1 : 0) << '\n';
  }
  write_json_file(dir / "data.json", {{"spec_name", data.spec.name()},
                                      {"params", to_json(data.spec)},
                                      {"seed", data.seed},
                                      {"n", data.n},
                                      {"format_version", kFormatVersion}});
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const json meta = read_json_file(dir / "data.json");
  check_version(meta, "dataset");
  Dataset data{model_spec_from_json(meta.at("params")), meta.at("seed").get<std::uint64_t>(),
               meta.at("n").get<std::size_t>(), {}, {}, {}};
  const std::size_t d = data.spec.d();

  std::ifstream csv(dir / "data.csv");
  if (!csv) throw ConfigError("cannot open " + (dir / "data.csv").string());
  std::string line;
  std::getline(csv, line);
  std::string expected = "t";
  for (std::size_t i = 1; i <= d; ++i) expected += ",x_" + std::to_string(i);
  expected += ",y,usable";
  if (line != expected) throw ConfigError("data.csv: header should be '" + expected + "'");

  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != d + 3) throw ConfigError("data.csv: wrong number of columns");
    if (std::stoull(cells[0]) != data.ys.size() + 1) throw ConfigError("data.csv: rows out of order");
    for (std::size_t i = 0; i < d; ++i) {
      const double v = std::stod(cells[1 + i]);
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("data.csv: x outside [0, 1]");
      data.xs.push_back(v);
    }
    data.ys.push_back(std::stod(cells[d + 1]));
    data.usable.push_back(cells[d + 2] == "1");
  }
  if (data.ys.size() != data.n) throw ConfigError("data.csv: row count disagrees with data.json");
  return data;
}

}  // namespace recnet::io
