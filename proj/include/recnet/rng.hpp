#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace recnet {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-dependent combination of a seed with a tag; used for all stream and
// row-seed derivations.
inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64_mix(seed ^ splitmix64_mix(tag + 0x9e3779b97f4a7c15ULL));
}

// Stream tags used throughout the library.
namespace stream {
inline constexpr std::uint64_t kInputs = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kBatch = 4;
inline constexpr std::uint64_t kTest = 5;
inline constexpr std::uint64_t kData = 6;
inline constexpr std::uint64_t kFit = 7;
inline constexpr std::uint64_t kEval = 8;
}  // namespace stream

/// SplitMix64 in counter mode. The i-th draw of stream `tag` under `seed` is
/// splitmix64_mix(key + (i + 1) * golden) with key = hash_combine(seed, tag), so
/// any draw can be computed directly from its index and distinct streams never
/// share a sequence. Satisfies std::uniform_random_bit_generator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t tag) noexcept
      : key_(hash_combine(seed, tag)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return at(counter_++); }

  result_type at(std::uint64_t index) const noexcept {
    return splitmix64_mix(key_ + (index + 1) * 0x9e3779b97f4a7c15ULL);
  }

  void seek(std::uint64_t index) noexcept { counter_ = index; }
  std::uint64_t position() const noexcept { return counter_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit(operator()()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cosine branch); consumes exactly two draws.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
  }

  static double to_unit(result_type bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace recnet
