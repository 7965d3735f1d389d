#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numbers>
#include <set>

#include "slimqfl/idx.hpp"
#include "slimqfl/mini_mnist.hpp"
#include "slimqfl/rng.hpp"
#include "slimqfl/synthetic_digits.hpp"

using namespace slimqfl;

namespace {

constexpr double kPi = std::numbers::pi;

MiniDataset labelled_dataset(std::size_t n) {
  MiniDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    MiniImage img{};
    img[0] = static_cast<double>(i);
    ds.images.push_back(img);
    ds.labels.push_back(static_cast<int>(i % 4));
  }
  return ds;
}

template <typename Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ParseIdx, LabelsExample) {
  const std::vector<std::uint8_t> bytes{0x00, 0x00, 0x08, 0x01, 0x00, 0x00, 0x00,
                                        0x03, 0x01, 0x00, 0x02};
  const auto t = parse_idx(bytes);
  EXPECT_EQ(t.dims, std::vector<std::uint32_t>{3});
  EXPECT_EQ(t.data, (std::vector<std::uint8_t>{1, 0, 2}));
}

TEST(ParseIdx, UnsupportedMagic) {
  const std::vector<std::uint8_t> bytes{0x00, 0x00, 0x08, 0x02, 0x00, 0x00, 0x00, 0x01, 0x05};
  const auto msg = error_of([&] { parse_idx(bytes); });
  EXPECT_NE(msg.find("unsupported magic"), std::string::npos) << msg;
}

TEST(ParseIdx, ShortPayloadIsTruncation) {
  IdxTensor images{{10000, 28, 28}, {}};
  std::vector<std::uint8_t> bytes = serialize_idx(IdxTensor{{1, 28, 28}, std::vector<std::uint8_t>(784, 7)});
  // Rewrite the count to 10000 while keeping a single image of payload.
  bytes[4] = 0x00;
  bytes[5] = 0x00;
  bytes[6] = 0x27;
  bytes[7] = 0x10;
  const auto msg = error_of([&] { parse_idx(bytes); });
  EXPECT_NE(msg.find("truncated"), std::string::npos) << msg;
  const std::vector<std::uint8_t> header_only{0x00, 0x00, 0x08, 0x03, 0x00};
  EXPECT_NE(error_of([&] { parse_idx(header_only); }).find("truncated"), std::string::npos);
}

TEST(ParseIdx, RoundTripsRandomTensors) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    IdxTensor src;
    if (rng.below(2) == 0) {
      src.dims = {static_cast<std::uint32_t>(rng.below(50))};
    } else {
      src.dims = {static_cast<std::uint32_t>(rng.below(5)), 28, 28};
    }
    std::size_t n = 1;
    for (auto d : src.dims) n *= d;
    src.data.resize(n);
    for (auto& b : src.data) b = static_cast<std::uint8_t>(rng.below(256));
    EXPECT_EQ(parse_idx(serialize_idx(src)), src);
  }
}

TEST(ParseIdx, FileRoundTripAndRawDataset) {
  const auto dir = std::filesystem::temp_directory_path() / "slimqfl_idx_test";
  std::filesystem::create_directories(dir);
  IdxTensor images{{2, 28, 28}, std::vector<std::uint8_t>(2 * 784, 0)};
  images.data[784] = 200;
  const IdxTensor labels{{2}, {3, 1}};
  write_idx_file(dir / "train-images-idx3-ubyte", images);
  write_idx_file(dir / "train-labels-idx1-ubyte", labels);
  const auto raw = load_mnist(dir);
  ASSERT_EQ(raw.images.size(), 2u);
  EXPECT_EQ(raw.labels, (std::vector<std::uint8_t>{3, 1}));
  EXPECT_EQ(raw.images[1][0], 200);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_mnist(dir), std::runtime_error);
}

TEST(Downsample, ConstantImage) {
  for (int v : {0, 1, 128, 255}) {
    const std::vector<std::uint8_t> img(784, static_cast<std::uint8_t>(v));
    for (double o : downsample_area(img)) EXPECT_NEAR(o, v * kPi / 255.0, 1e-15);
  }
}

TEST(Downsample, SinglePixelInFirstBlock) {
  std::vector<std::uint8_t> img(784, 0);
  img[3 * 28 + 5] = 49;
  const auto out = downsample_area(img);
  EXPECT_NEAR(out[0], kPi / 255.0, 1e-15);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_EQ(out[i], 0.0);
}

TEST(Downsample, BlockLayout) {
  // Pixel (row 27, col 0) belongs to output cell (3, 0).
  std::vector<std::uint8_t> img(784, 0);
  img[27 * 28 + 0] = 49;
  const auto out = downsample_area(img);
  EXPECT_NEAR(out[12], kPi / 255.0, 1e-15);
  EXPECT_THROW(downsample_area(std::vector<std::uint8_t>(783, 0)), std::invalid_argument);
}

TEST(Downsample, CommutesWithIntensityScaling) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> img(784);
    for (double& p : img) p = rng.uniform(0.0, 255.0);
    const double c = rng.uniform(0.1, 3.0);
    std::vector<double> scaled(img);
    for (double& p : scaled) p *= c;
    const auto a = block_means(img), b = block_means(scaled);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], c * a[i], 1e-10);
  }
}

TEST(BuildMiniDataset, KeepsFirstFourClasses) {
  RawDataset raw;
  for (int i = 0; i < 10; ++i) {
    raw.images.push_back(RawImage{});
    raw.labels.push_back(static_cast<std::uint8_t>(i));
  }
  const auto ds = build_mini_dataset(raw);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 2, 3}));
}

TEST(FilterAndSplit, DefaultShardsAreDisjoint) {
  const auto ds = labelled_dataset(2000);
  const auto p = filter_and_split(ds, 10, 64, 512, 5);
  ASSERT_EQ(p.shards.size(), 10u);
  std::set<std::size_t> seen;
  for (std::size_t d = 0; d < p.shards.size(); ++d) {
    const auto& s = p.shards[d];
    EXPECT_EQ(s.device_id, static_cast<int>(d));
    EXPECT_EQ(s.samples.size(), 64u);
    EXPECT_EQ(s.source_index.size(), 64u);
    for (std::size_t i = 0; i < s.source_index.size(); ++i) {
      EXPECT_TRUE(seen.insert(s.source_index[i]).second);
      EXPECT_EQ(s.samples.labels[i], ds.labels[s.source_index[i]]);
      EXPECT_GE(s.samples.labels[i], 0);
      EXPECT_LT(s.samples.labels[i], 4);
    }
  }
  EXPECT_EQ(seen.size(), 640u);
  // Test samples come from outside the shards.
  ASSERT_EQ(p.test.size(), 512u);
  for (const auto& img : p.test.images) {
    EXPECT_EQ(seen.count(static_cast<std::size_t>(img[0])), 0u);
  }
}

TEST(FilterAndSplit, TestSetIsBalanced) {
  const auto p = filter_and_split(labelled_dataset(2000), 10, 64, 512, 6);
  std::array<int, 4> counts{};
  for (int l : p.test.labels) counts[static_cast<std::size_t>(l)]++;
  for (int c : counts) EXPECT_EQ(c, 128);
}

TEST(FilterAndSplit, CardinalityAcrossShapes) {
  const auto ds = labelled_dataset(1500);
  for (int n : {1, 2, 5, 20}) {
    for (int per : {1, 16, 64}) {
      const auto p = filter_and_split(ds, n, per, 100, 3);
      std::set<std::size_t> seen;
      for (const auto& s : p.shards) {
        EXPECT_EQ(s.samples.size(), static_cast<std::size_t>(per));
        seen.insert(s.source_index.begin(), s.source_index.end());
      }
      EXPECT_EQ(seen.size(), static_cast<std::size_t>(n * per));
    }
  }
}

TEST(FilterAndSplit, DeterministicPerSeed) {
  const auto ds = labelled_dataset(1000);
  const auto a = filter_and_split(ds, 4, 32, 64, 9);
  const auto b = filter_and_split(ds, 4, 32, 64, 9);
  const auto c = filter_and_split(ds, 4, 32, 64, 10);
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_EQ(a.shards[d].source_index, b.shards[d].source_index);
  }
  EXPECT_EQ(a.test.labels, b.test.labels);
  EXPECT_NE(a.shards[0].source_index, c.shards[0].source_index);
}

TEST(FilterAndSplit, Errors) {
  const auto ds = labelled_dataset(100);
  EXPECT_THROW(filter_and_split(ds, 10, 64, 10, 1), std::invalid_argument);
  EXPECT_THROW(filter_and_split(ds, 0, 4, 10, 1), std::invalid_argument);
  EXPECT_THROW(filter_and_split(ds, 2, 0, 10, 1), std::invalid_argument);
}

TEST(SyntheticDigits, DeterministicAndLabelled) {
  const auto a = make_synthetic_digits(40, 3);
  const auto b = make_synthetic_digits(40, 3);
  ASSERT_EQ(a.images.size(), 40u);
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
  for (std::size_t i = 0; i < a.labels.size(); ++i) EXPECT_EQ(a.labels[i], i % 4);
  const auto c = make_synthetic_digits(40, 4);
  EXPECT_NE(a.images, c.images);
  for (const auto& img : a.images) {
    EXPECT_GT(*std::max_element(img.begin(), img.end()), 0);
  }
  // A prefix of a larger set is the smaller set.
  const auto d = make_synthetic_digits(60, 3);
  EXPECT_TRUE(std::equal(a.images.begin(), a.images.end(), d.images.begin()));
}
