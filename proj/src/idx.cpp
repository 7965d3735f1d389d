#include "slimqfl/idx.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace slimqfl {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes,
                        std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::size_t rank_for_magic(std::uint32_t magic) {
  switch (magic) {
    case kIdxImagesMagic: return 3;
    case kIdxLabelsMagic: return 1;
    default: {
      std::ostringstream msg;
      msg << "unsupported magic 0x" << std::hex << magic;
      throw std::runtime_error(msg.str());
    }
  }
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw std::runtime_error("truncated IDX header");
  const std::size_t rank = rank_for_magic(read_be32(bytes, 0));
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header) throw std::runtime_error("truncated IDX header");

  IdxTensor tensor;
  std::size_t count = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    const std::uint32_t dim = read_be32(bytes, 4 + 4 * d);
    if (dim != 0 && count > std::numeric_limits<std::size_t>::max() / dim) {
      throw std::runtime_error("IDX dimension overflow");
    }
    count *= dim;
    tensor.dims.push_back(dim);
  }
  if (bytes.size() - header < count) {
    throw std::runtime_error("truncated IDX payload: expected " +
                             std::to_string(count) + " bytes, got " +
                             std::to_string(bytes.size() - header));
  }
  if (bytes.size() - header > count) {
    throw std::runtime_error("trailing bytes after IDX payload");
  }
  tensor.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                     bytes.end());
  return tensor;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor) {
  std::uint32_t magic = 0;
  if (tensor.dims.size() == 3) {
    magic = kIdxImagesMagic;
  } else if (tensor.dims.size() == 1) {
    magic = kIdxLabelsMagic;
  } else {
    throw std::invalid_argument("IDX tensors here have rank 1 or 3");
  }
  std::size_t count = 1;
  for (auto d : tensor.dims) count *= d;
  if (count != tensor.data.size()) {
    throw std::invalid_argument("IDX payload size does not match dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * tensor.dims.size() + tensor.data.size());
  write_be32(out, magic);
  for (auto d : tensor.dims) write_be32(out, d);
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

IdxTensor read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_idx(bytes);
}

void write_idx_file(const std::filesystem::path& path,
                    const IdxTensor& tensor) {
  const auto bytes = serialize_idx(tensor);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

RawDataset make_raw_dataset(const IdxTensor& images, const IdxTensor& labels) {
  if (images.dims.size() != 3 || images.dims[1] != kMnistSide ||
      images.dims[2] != kMnistSide) {
    throw std::runtime_error("expected N x 28 x 28 images");
  }
  if (labels.dims.size() != 1) throw std::runtime_error("expected 1-d labels");
  if (images.dims[0] != labels.dims[0]) {
    throw std::runtime_error("image count does not match label count");
  }
  RawDataset ds;
  const std::size_t n = images.dims[0];
  ds.images.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(images.data.begin() +
                    static_cast<std::ptrdiff_t>(i * kMnistPixels),
                kMnistPixels, ds.images[i].begin());
  }
  ds.labels = labels.data;
  return ds;
}

RawDataset load_mnist(const std::filesystem::path& dir,
                      const MnistFiles& files) {
  return make_raw_dataset(read_idx_file(dir / files.images),
                          read_idx_file(dir / files.labels));
}

}  // namespace slimqfl
