// Seeded random stream with draw semantics that do not depend on the
// standard library's distribution implementations, so a (config, seed) pair
// reproduces bit-identical channels on any platform.
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace relayris {

// One splitmix64 step; advances state and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic child seed for the Monte Carlo worker at (value_index, trial).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller.
  double gaussian();

  // Circularly-symmetric complex Gaussian, unit total variance.
  std::complex<double> cgaussian();

 private:
  std::mt19937_64 engine_;
};

}  // namespace relayris
