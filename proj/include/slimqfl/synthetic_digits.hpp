#pragma once

#include <cstddef>
#include <cstdint>

#include "slimqfl/idx.hpp"

namespace slimqfl {

/// Offline stand-in for MNIST: 28x28 handwritten-style renderings of the digits
/// 0-3 (anti-aliased strokes under random slant, rotation, scale, offset,
/// stroke width and control-point jitter). Labels cycle 0,1,2,3. Image i
/// depends only on (seed, i).
RawDataset make_synthetic_digits(std::size_t count, std::uint64_t seed);

}  // namespace slimqfl
