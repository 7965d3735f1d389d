#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace slimqfl {

/// What a random substream is used for. Part of the substream key so that
/// different consumers never share draws.
enum class Purpose : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kChannel = 3,
  kPartition = 4,
  kSynthetic = 5,
  kTest = 6,
};

/// Mixes (master, device, epoch, purpose) into a 64-bit seed with splitmix64
/// finalizers. Substreams are counter-based: the seed depends only on the key,
/// never on how many draws other substreams have consumed.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t device,
                             std::uint64_t epoch, Purpose purpose);

/// Device id used for substreams that belong to the server / global model.
inline constexpr std::uint64_t kServerStream = 0xFFFF'FFFFull;

/// Thin wrapper over mt19937_64 with platform-independent conversions.
/// The standard distributions are implementation-defined, so the uniform,
/// exponential and bounded-integer draws are done by hand here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t device, std::uint64_t epoch,
      Purpose purpose)
      : engine_(substream_seed(master, device, epoch, purpose)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Exponential(rate 1) by inverse CDF, -ln(1 - u).
  double exponential();

  /// Standard normal by Box-Muller (one of the pair is discarded).
  double normal();

  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace slimqfl
