#include "slimqfl/rng.hpp"

#include <cmath>
#include <numbers>

namespace slimqfl {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t device,
                             std::uint64_t epoch, Purpose purpose) {
  std::uint64_t h = mix(master);
  h = mix(h ^ device);
  h = mix(h ^ epoch);
  h = mix(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

double Rng::exponential() { return -std::log1p(-uniform01()); }

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Reject draws above the largest multiple of n.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace slimqfl
