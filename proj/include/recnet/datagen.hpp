#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace recnet {

/// Data-generating process Y_t = G(X_t, H_k(X_{t-1}, ..., X_{t-k})) + eps_t
/// with X_t i.i.d. uniform on [0,1]^d and eps_t ~ N(0, noise_sigma^2).
///
/// G and H come from a small catalog with analytically known range bound A
/// and Lipschitz constants in z:
///
///   tanh_sin  H = alpha tanh(beta (mean(x) + z))      A = alpha, lip_h = alpha beta
///             G = sin(pi x_1) + gamma z                lip_g = gamma
///   linear    H = c mean(x) + rho z                    A = max(1, |c| / (1 - |rho|))
///             G = g0 + a x_1 + b z                     lip_g = |b|, lip_h = |rho|
///   poly      H = c m (1 - m) + rho z, m = mean(x)     A = max(1, |c| / (4 (1 - |rho|)))
///             G = a x_1^2 + gamma z
///   holder    H = c |mean(x) - 1/2|^s + rho z          A = max(1, |c| 2^-s / (1 - |rho|))
///             G = |x_1 - 1/2|^s + gamma z              p_G = p_H = s
///
/// The range bound holds for x in [0,1]^d and |z| <= A.
class ModelSpec {
 public:
  struct Smoothness {
    double p_g = 1.0;
    double p_h = 1.0;
    double c_g = 1.0;
    double c_h = 1.0;

    bool operator==(const Smoothness&) const = default;
  };

  // Unknown names or parameters, or parameters leaving H unbounded, throw
  // ConfigError. Parameters not given take catalog defaults. When
  // `smoothness` is omitted the catalog default is used.
  static ModelSpec create(const std::string& name, std::size_t d, std::size_t k,
                          const std::map<std::string, double>& params, double noise_sigma,
                          const Smoothness* smoothness = nullptr);

  static std::vector<std::string> catalog_names();

  const std::string& name() const noexcept { return name_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t k() const noexcept { return k_; }
  // Complete parameter set including defaults.
  const std::map<std::string, double>& params() const noexcept { return params_; }
  double noise_sigma() const noexcept { return noise_sigma_; }
  const Smoothness& smoothness() const noexcept { return smooth_; }
  double range_bound() const noexcept { return bound_a_; }
  double lip_g() const noexcept { return lip_g_; }
  double lip_h() const noexcept { return lip_h_; }

  double g(std::span<const double> x, double z) const;
  double h(std::span<const double> x, double z) const;

  bool operator==(const ModelSpec&) const = default;

 private:
  enum class Kind { TanhSin, Linear, Poly, Holder };

  ModelSpec() = default;

  std::string name_;
  Kind kind_ = Kind::TanhSin;
  std::size_t d_ = 1;
  std::size_t k_ = 1;
  std::map<std::string, double> params_;
  double p_[5] = {};  // params in catalog order, for the hot path
  double noise_sigma_ = 0.0;
  Smoothness smooth_;
  double bound_a_ = 1.0;
  double lip_g_ = 0.0;
  double lip_h_ = 0.0;
};

/// Realised trajectory (X_1, Y_1), ..., (X_n, Y_n). Rows t <= k have no full
/// history; their responses are noiseless placeholders computed with zero
/// padding and are flagged unusable.
struct Dataset {
  ModelSpec spec;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<double> xs;  // n x d, row-major
  std::vector<double> ys;  // n
  std::vector<bool> usable;

  std::span<const double> x(std::size_t t) const {  // 1-based
    return {xs.data() + (t - 1) * spec.d(), spec.d()};
  }
  double y(std::size_t t) const { return ys.at(t - 1); }
  // The window (x_{t-k}, ..., x_t) oldest first, t >= k + 1.
  std::span<const double> window(std::size_t t) const {
    return {xs.data() + (t - 1 - spec.k()) * spec.d(), (spec.k() + 1) * spec.d()};
  }
};

/// H_k(x_k, ..., x_1) by iteration: z_0 = 0, z_t = H(x_t, z_{t-1}).
/// xs_past holds k vectors oldest first.
double hk(const ModelSpec& spec, std::span<const double> xs_past);

/// m(x_1, ..., x_{k+1}) = G(x_{k+1}, H_k(x_k, ..., x_1)); window oldest first.
double regression_fn(const ModelSpec& spec, std::span<const double> window);

/// Deterministic in (spec, n, seed). Inputs use stream::kInputs (d draws per
/// row in row order), noise uses stream::kNoise (one normal per usable row).
/// Throws PreconditionError when n < k + 1.
Dataset simulate(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

/// noise_sigma^2: the minimal mean squared prediction error.
double bayes_risk(const ModelSpec& spec) noexcept;

}  // namespace recnet
