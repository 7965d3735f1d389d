#include "slimqfl/mini_mnist.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "slimqfl/rng.hpp"

namespace slimqfl {

std::array<double, kMiniPixels> block_means(std::span<const double> image) {
  if (image.size() != kMnistPixels) {
    throw std::invalid_argument("expected a 28x28 image");
  }
  std::array<double, kMiniPixels> out{};
  for (std::size_t bi = 0; bi < kMiniSide; ++bi) {
    for (std::size_t bj = 0; bj < kMiniSide; ++bj) {
      double sum = 0.0;
      for (std::size_t r = 0; r < kAreaFactor; ++r) {
        for (std::size_t c = 0; c < kAreaFactor; ++c) {
          sum += image[(bi * kAreaFactor + r) * kMnistSide +
                       bj * kAreaFactor + c];
        }
      }
      out[bi * kMiniSide + bj] = sum / (kAreaFactor * kAreaFactor);
    }
  }
  return out;
}

MiniImage downsample_area(std::span<const std::uint8_t> image) {
  if (image.size() != kMnistPixels) {
    throw std::invalid_argument("expected a 28x28 image, got " +
                                std::to_string(image.size()) + " pixels");
  }
  std::array<double, kMnistPixels> real{};
  for (std::size_t i = 0; i < kMnistPixels; ++i) real[i] = image[i];
  MiniImage out = block_means(real);
  for (double& v : out) v *= std::numbers::pi / 255.0;
  return out;
}

MiniDataset build_mini_dataset(const RawDataset& raw, int n_classes) {
  if (raw.images.size() != raw.labels.size()) {
    throw std::invalid_argument("image count does not match label count");
  }
  MiniDataset out;
  for (std::size_t i = 0; i < raw.labels.size(); ++i) {
    const int label = raw.labels[i];
    if (label >= n_classes) continue;
    out.images.push_back(downsample_area(raw.images[i]));
    out.labels.push_back(label);
  }
  return out;
}

Partition filter_and_split(const MiniDataset& dataset, int n_devices,
                           int per_device, int test_size, std::uint64_t seed,
                           int n_classes) {
  if (n_devices <= 0 || per_device <= 0 || test_size < 0) {
    throw std::invalid_argument("partition sizes must be positive");
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.labels[i] >= 0 && dataset.labels[i] < n_classes) {
      order.push_back(i);
    }
  }
  const std::size_t train_total =
      static_cast<std::size_t>(n_devices) * static_cast<std::size_t>(per_device);
  const std::size_t needed = train_total + static_cast<std::size_t>(test_size);
  if (order.size() < needed) {
    throw std::invalid_argument("insufficient data: need " +
                                std::to_string(needed) + " samples, have " +
                                std::to_string(order.size()));
  }
  Rng rng(seed, kServerStream, 0, Purpose::kPartition);
  rng.shuffle(std::span<std::size_t>(order));

  Partition part;
  part.shards.resize(static_cast<std::size_t>(n_devices));
  std::size_t next = 0;
  for (int d = 0; d < n_devices; ++d) {
    auto& shard = part.shards[static_cast<std::size_t>(d)];
    shard.device_id = d;
    for (int s = 0; s < per_device; ++s) {
      const std::size_t idx = order[next++];
      shard.source_index.push_back(idx);
      shard.samples.images.push_back(dataset.images[idx]);
      shard.samples.labels.push_back(dataset.labels[idx]);
    }
  }

  // Balanced test set: equal quota per class in shuffled order, then any
  // shortfall filled from whatever remains.
  const std::size_t quota = static_cast<std::size_t>(test_size) /
                            static_cast<std::size_t>(n_classes);
  std::vector<std::size_t> taken_per_class(static_cast<std::size_t>(n_classes),
                                           0);
  std::vector<bool> used(order.size(), false);
  std::vector<std::size_t> test_positions;
  for (std::size_t p = next; p < order.size() &&
                             test_positions.size() < static_cast<std::size_t>(test_size);
       ++p) {
    auto& taken = taken_per_class[static_cast<std::size_t>(
        dataset.labels[order[p]])];
    if (taken < quota) {
      ++taken;
      used[p] = true;
      test_positions.push_back(p);
    }
  }
  for (std::size_t p = next; p < order.size() &&
                             test_positions.size() < static_cast<std::size_t>(test_size);
       ++p) {
    if (!used[p]) {
      used[p] = true;
      test_positions.push_back(p);
    }
  }
  for (std::size_t p : test_positions) {
    part.test.images.push_back(dataset.images[order[p]]);
    part.test.labels.push_back(dataset.labels[order[p]]);
  }
  return part;
}

}  // namespace slimqfl
