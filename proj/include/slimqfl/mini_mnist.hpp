#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slimqfl/idx.hpp"

namespace slimqfl {

inline constexpr std::size_t kMiniSide = 4;
inline constexpr std::size_t kMiniPixels = kMiniSide * kMiniSide;
inline constexpr std::size_t kAreaFactor = kMnistSide / kMiniSide;  // 7
inline constexpr int kMiniClasses = 4;

/// 4x4 row-major image with pixels in [0, pi].
using MiniImage = std::array<double, kMiniPixels>;

struct MiniDataset {
  std::vector<MiniImage> images;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

/// Mean of each 7x7 block (area interpolation at an exact integer ratio),
/// without the [0, pi] rescale. Input is 28x28 row-major.
std::array<double, kMiniPixels> block_means(std::span<const double> image);

/// 28x28 bytes -> 4x4 block means rescaled from [0, 255] to [0, pi].
MiniImage downsample_area(std::span<const std::uint8_t> image);

/// Keeps labels below n_classes and downsamples each kept image.
MiniDataset build_mini_dataset(const RawDataset& raw,
                               int n_classes = kMiniClasses);

struct DeviceShard {
  int device_id = 0;
  std::vector<std::size_t> source_index;  // positions in the input dataset
  MiniDataset samples;
};

struct Partition {
  std::vector<DeviceShard> shards;
  MiniDataset test;
};

/// Seeded IID split: a uniform shuffle, the first n_devices * per_device
/// samples become disjoint shards, and a label-balanced test set of test_size
/// is drawn from the remainder. Samples with labels >= n_classes are skipped.
Partition filter_and_split(const MiniDataset& dataset, int n_devices,
                           int per_device, int test_size, std::uint64_t seed,
                           int n_classes = kMiniClasses);

}  // namespace slimqfl
