#include "relayris/random.hpp"

#include <cmath>
#include <numbers>

namespace relayris {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = base;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (a * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  mixed = splitmix64(state);
  state = mixed ^ (b * 0xAF251AF3B0F025B5ULL + 0x9E3779B97F4A7C15ULL);
  return splitmix64(state);
}

double RandomStream::uniform() {
  // Top 53 bits of the engine output, mapped to [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::cgaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace relayris
