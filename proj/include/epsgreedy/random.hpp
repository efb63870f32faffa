#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace epsgreedy {

/// Identifies an independent random stream inside one run. Every consumer
/// draws from its own stream so that changing how much one consumer draws
/// never perturbs another.
enum class Stream : std::uint64_t {
  kContext = 1,
  kNoise = 2,
  kPolicy = 3,
  kModelInit = 4,
  kTraining = 5,
  kLemma = 6,
  kEnvSetup = 7,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for `stream` of a run whose base seed is `run_seed`. Replicate r of
/// an experiment with seed s uses run_seed = s + r.
std::uint64_t derive_seed(std::uint64_t run_seed, Stream stream) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t run_seed, Stream stream) : engine_(derive_seed(run_seed, stream)) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }

  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal() { return gauss_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace epsgreedy
