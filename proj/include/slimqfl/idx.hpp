#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace slimqfl {

// IDX container as used by the MNIST distribution: a big-endian magic
// (0x00000803 for images, 0x00000801 for labels), one big-endian uint32 per
// dimension, then row-major unsigned bytes.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  friend bool operator==(const IdxTensor&, const IdxTensor&) = default;
};

IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor);

IdxTensor read_idx_file(const std::filesystem::path& path);
void write_idx_file(const std::filesystem::path& path, const IdxTensor& tensor);

inline constexpr std::size_t kMnistSide = 28;
inline constexpr std::size_t kMnistPixels = kMnistSide * kMnistSide;

using RawImage = std::array<std::uint8_t, kMnistPixels>;

struct RawDataset {
  std::vector<RawImage> images;
  std::vector<std::uint8_t> labels;
};

/// Pairs an images tensor (N x 28 x 28) with a labels tensor (N).
RawDataset make_raw_dataset(const IdxTensor& images, const IdxTensor& labels);

struct MnistFiles {
  std::filesystem::path images = "train-images-idx3-ubyte";
  std::filesystem::path labels = "train-labels-idx1-ubyte";
};

RawDataset load_mnist(const std::filesystem::path& dir,
                      const MnistFiles& files = {});

}  // namespace slimqfl
