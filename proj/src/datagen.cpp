#include "recnet/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "recnet/errors.hpp"
#include "recnet/rng.hpp"

namespace recnet {

namespace {

struct CatalogEntry {
  const char* name;
  std::vector<std::pair<const char*, double>> defaults;
  ModelSpec::Smoothness smoothness;
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"tanh_sin", {{"alpha", 1.0}, {"beta", 1.5}, {"gamma", 1.5}}, {1.0, 1.0, 1.0, 1.0}},
      {"linear",
       {{"g0", 0.0}, {"a", 1.0}, {"b", 0.0}, {"c", 0.0}, {"rho", 0.0}},
       {1.0, 1.0, 1.0, 1.0}},
      {"poly", {{"a", 1.0}, {"gamma", 1.2}, {"c", 1.0}, {"rho", 0.5}}, {2.0, 2.0, 2.0, 2.0}},
      {"holder", {{"s", 0.5}, {"gamma", 1.2}, {"c", 1.0}, {"rho", 0.5}}, {0.5, 0.5, 1.0, 1.0}},
  };
  return entries;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double bounded_range(double c_term, double rho, const char* model) {
  if (std::abs(rho) < 1.0) return std::max(1.0, c_term / (1.0 - std::abs(rho)));
  if (std::abs(rho) == 1.0 && c_term == 0.0) return 1.0;
  throw ConfigError(std::string(model) + ": |rho| must be < 1 (or rho = +-1 with c = 0)");
}

}  // namespace

std::vector<std::string> ModelSpec::catalog_names() {
  std::vector<std::string> names;
  for (const auto& e : catalog()) names.emplace_back(e.name);
  return names;
}

ModelSpec ModelSpec::create(const std::string& name, std::size_t d, std::size_t k,
                            const std::map<std::string, double>& params, double noise_sigma,
                            const Smoothness* smoothness) {
  const auto it = std::find_if(catalog().begin(), catalog().end(),
                               [&](const CatalogEntry& e) { return name == e.name; });
  if (it == catalog().end()) throw ConfigError("unknown catalog model: " + name);
  if (d == 0 || k == 0) throw ConfigError("ModelSpec: d and k must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ConfigError("ModelSpec: noise_sigma must be finite and >= 0");

  ModelSpec spec;
  spec.name_ = name;
  spec.kind_ = static_cast<Kind>(it - catalog().begin());
  spec.d_ = d;
  spec.k_ = k;
  spec.noise_sigma_ = noise_sigma;
  spec.smooth_ = smoothness != nullptr ? *smoothness : it->smoothness;

  for (const auto& [key, value] : params) {
    const bool known = std::any_of(it->defaults.begin(), it->defaults.end(),
                                   [&](const auto& p) { return key == p.first; });
    if (!known) throw ConfigError(name + ": unknown parameter '" + key + "'");
    if (!std::isfinite(value)) throw ConfigError(name + ": parameter '" + key + "' not finite");
  }
  for (std::size_t i = 0; i < it->defaults.size(); ++i) {
    const auto& [key, def] = it->defaults[i];
    const auto found = params.find(key);
    const double v = found != params.end() ? found->second : def;
    spec.params_[key] = v;
    spec.p_[i] = v;
  }

  const double* p = spec.p_;
  switch (spec.kind_) {
    case Kind::TanhSin:
      if (p[0] < 1.0) throw ConfigError("tanh_sin: alpha is the range bound A and must be >= 1");
      spec.bound_a_ = p[0];
      spec.lip_h_ = std::abs(p[0] * p[1]);
      spec.lip_g_ = std::abs(p[2]);
      break;
    case Kind::Linear:
      spec.bound_a_ = bounded_range(std::abs(p[3]), p[4], "linear");
      spec.lip_g_ = std::abs(p[2]);
      spec.lip_h_ = std::abs(p[4]);
      break;
    case Kind::Poly:
      spec.bound_a_ = bounded_range(std::abs(p[2]) / 4.0, p[3], "poly");
      spec.lip_g_ = std::abs(p[1]);
      spec.lip_h_ = std::abs(p[3]);
      break;
    case Kind::Holder:
      if (!(p[0] > 0.0 && p[0] <= 1.0)) throw ConfigError("holder: s must lie in (0, 1]");
      spec.bound_a_ = bounded_range(std::abs(p[2]) * std::pow(2.0, -p[0]), p[3], "holder");
      spec.lip_g_ = std::abs(p[1]);
      spec.lip_h_ = std::abs(p[3]);
      break;
  }
  return spec;
}

double ModelSpec::g(std::span<const double> x, double z) const {
  const double* p = p_;
  switch (kind_) {
    case Kind::TanhSin:
      return std::sin(std::numbers::pi * x[0]) + p[2] * z;
    case Kind::Linear:
      return p[0] + p[1] * x[0] + p[2] * z;
    case Kind::Poly:
      return p[0] * x[0] * x[0] + p[1] * z;
    case Kind::Holder:
      return std::pow(std::abs(x[0] - 0.5), p[0]) + p[1] * z;
  }
  return 0.0;
}

double ModelSpec::h(std::span<const double> x, double z) const {
  const double* p = p_;
  switch (kind_) {
    case Kind::TanhSin:
      return p[0] * std::tanh(p[1] * (mean_of(x) + z));
    case Kind::Linear:
      return p[3] * mean_of(x) + p[4] * z;
    case Kind::Poly: {
      const double m = mean_of(x);
      return p[2] * m * (1.0 - m) + p[3] * z;
    }
    case Kind::Holder:
      return p[2] * std::pow(std::abs(mean_of(x) - 0.5), p[0]) + p[3] * z;
  }
  return 0.0;
}

double hk(const ModelSpec& spec, std::span<const double> xs_past) {
  const std::size_t d = spec.d();
  if (xs_past.size() != spec.k() * d)
    throw ConfigError("hk: expected k*d = " + std::to_string(spec.k() * d) + " values, got " +
                      std::to_string(xs_past.size()));
  double z = 0.0;
  for (std::size_t t = 0; t < spec.k(); ++t) z = spec.h(xs_past.subspan(t * d, d), z);
  return z;
}

double regression_fn(const ModelSpec& spec, std::span<const double> window) {
  const std::size_t d = spec.d();
  if (window.size() != (spec.k() + 1) * d)
    throw ConfigError("regression_fn: expected (k+1)*d = " +
                      std::to_string((spec.k() + 1) * d) + " values, got " +
                      std::to_string(window.size()));
  const double z = hk(spec, window.first(spec.k() * d));
  return spec.g(window.subspan(spec.k() * d, d), z);
}

Dataset simulate(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::size_t d = spec.d();
  const std::size_t k = spec.k();
  if (n < k + 1) throw PreconditionError("simulate: n must be at least k + 1");

  Dataset data{spec, seed, n, std::vector<double>(n * d), std::vector<double>(n, 0.0),
               std::vector<bool>(n, false)};
  CounterRng rx(seed, stream::kInputs);
  for (double& v : data.xs) v = rx.uniform();

  CounterRng re(seed, stream::kNoise);
  std::vector<double> padded((k + 1) * d, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    if (t > k) {
      const double m = regression_fn(spec, data.window(t));
      const double eps = spec.noise_sigma() * re.normal();
      data.ys[t - 1] = m + eps;
      data.usable[t - 1] = true;
    } else {
      // x_{t-k}, ..., x_0 are taken as zero.
      std::fill(padded.begin(), padded.end(), 0.0);
      std::copy_n(data.xs.begin(), t * d, padded.end() - static_cast<std::ptrdiff_t>(t * d));
      data.ys[t - 1] = regression_fn(spec, padded);
    }
  }
  return data;
}

double bayes_risk(const ModelSpec& spec) noexcept {
  return spec.noise_sigma() * spec.noise_sigma();
}

}  // namespace recnet
