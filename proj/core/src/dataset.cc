#include "wiretap/dataset.h"

#include <bit>
#include <cstdint>

#include "wiretap/checkpoint.h"

namespace wiretap {
namespace {

template <typename T>
void PutLe(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLe(const std::string& bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw std::runtime_error("truncated dataset file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return v;
}

}  // namespace

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.height = height;
  out.width = width;
  out.images = images.GatherRows(indices);
  for (std::size_t i : indices) out.t_labels.push_back(t_labels.at(i));
  return out;
}

Dataset Dataset::Head(std::size_t count) const {
  Dataset out;
  out.height = height;
  out.width = width;
  out.images = images.SliceRows(0, count);
  out.t_labels.assign(t_labels.begin(), t_labels.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

Dataset ToDataset(const std::vector<GlyphSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample list");
  Dataset d;
  d.height = samples.front().height;
  d.width = samples.front().width;
  d.images = Tensor::Matrix(samples.size(), d.pixel_count());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& g = samples[i];
    if (g.height != d.height || g.width != d.width) {
      throw std::invalid_argument("glyphs of mixed sizes");
    }
    std::copy(g.image.begin(), g.image.end(), d.images.row(i).begin());
    d.t_labels.push_back(g.t_label);
  }
  return d;
}

void SaveDataset(const std::filesystem::path& path, const Dataset& data) {
  std::string out;
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.size()));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.height));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.width));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.images.row(i)) PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    out.push_back(static_cast<char>(data.t_labels[i]));
  }
  WriteFileAtomic(path, out);
}

Dataset LoadDataset(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  std::size_t pos = 0;
  const auto count = GetLe<std::uint32_t>(bytes, pos);
  Dataset d;
  d.height = GetLe<std::uint32_t>(bytes, pos);
  d.width = GetLe<std::uint32_t>(bytes, pos);
  if (count == 0 || d.height == 0 || d.width == 0) {
    throw std::runtime_error("dataset file has an empty dimension");
  }
  const std::size_t px = d.pixel_count();
  if (bytes.size() != 12 + std::size_t{count} * (px * 8 + 1)) {
    throw std::runtime_error("dataset file size does not match its header");
  }
  d.images = Tensor::Matrix(count, px);
  for (std::size_t i = 0; i < count; ++i) {
    for (double& v : d.images.row(i)) v = std::bit_cast<double>(GetLe<std::uint64_t>(bytes, pos));
    const int label = static_cast<unsigned char>(bytes[pos++]);
    if (label >= kSensitiveClasses) throw std::runtime_error("dataset label out of range");
    d.t_labels.push_back(label);
  }
  return d;
}

}  // namespace wiretap
