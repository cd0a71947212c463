#include "wiretap/idx.h"

#include <algorithm>
#include <cstdio>

#include "wiretap/checkpoint.h"

namespace wiretap {
namespace {

std::uint32_t ReadBe32(const std::string& bytes, std::size_t pos) {
  if (pos + 4 > bytes.size()) throw IdxError("truncated IDX header");
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[pos + i]);
  }
  return v;
}

void PutBe32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

std::string HexMagic(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

}  // namespace

IdxImages ReadIdxImages(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const std::uint32_t magic = ReadBe32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw IdxError("bad IDX image magic " + HexMagic(magic) + " in " + path.string());
  }
  IdxImages img;
  img.count = ReadBe32(bytes, 4);
  img.rows = ReadBe32(bytes, 8);
  img.cols = ReadBe32(bytes, 12);
  const std::size_t need = std::size_t{img.count} * img.rows * img.cols;
  if (bytes.size() < 16 + need) {
    throw IdxError("truncated IDX image file " + path.string() + ": need " +
                   std::to_string(need) + " pixel bytes");
  }
  img.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(need));
  return img;
}

std::vector<std::uint8_t> ReadIdxLabels(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const std::uint32_t magic = ReadBe32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw IdxError("bad IDX label magic " + HexMagic(magic) + " in " + path.string());
  }
  const std::uint32_t count = ReadBe32(bytes, 4);
  if (bytes.size() < 8 + std::size_t{count}) {
    throw IdxError("truncated IDX label file " + path.string());
  }
  return {bytes.begin() + 8, bytes.begin() + 8 + count};
}

void WriteIdxImages(const std::filesystem::path& path, const IdxImages& images) {
  if (images.pixels.size() != std::size_t{images.count} * images.rows * images.cols) {
    throw IdxError("IDX image buffer does not match header dimensions");
  }
  std::string out;
  PutBe32(out, kIdxImageMagic);
  PutBe32(out, images.count);
  PutBe32(out, images.rows);
  PutBe32(out, images.cols);
  out.append(images.pixels.begin(), images.pixels.end());
  WriteFileAtomic(path, out);
}

void WriteIdxLabels(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& labels) {
  std::string out;
  PutBe32(out, kIdxLabelMagic);
  PutBe32(out, static_cast<std::uint32_t>(labels.size()));
  out.append(labels.begin(), labels.end());
  WriteFileAtomic(path, out);
}

std::vector<GlyphSample> LoadIdxAndColorize(const std::filesystem::path& images_path,
                                            const std::filesystem::path& labels_path,
                                            std::size_t size, std::uint64_t seed) {
  if (size < 8) throw std::invalid_argument("glyph size must be at least 8");
  const IdxImages img = ReadIdxImages(images_path);
  const std::vector<std::uint8_t> labels = ReadIdxLabels(labels_path);
  if (labels.size() != img.count) {
    throw IdxError("image count " + std::to_string(img.count) +
                   " != label count " + std::to_string(labels.size()));
  }
  Rng rng(seed);
  std::uniform_int_distribution<int> pick_color(0, kColorCount - 1);
  std::uniform_int_distribution<int> pick_thickness(0, kThicknessCount - 1);

  std::vector<GlyphSample> out;
  out.reserve(img.count);
  const std::size_t src_px = std::size_t{img.rows} * img.cols;
  for (std::uint32_t k = 0; k < img.count; ++k) {
    const std::uint8_t* src = img.pixels.data() + k * src_px;
    std::vector<std::uint8_t> mask(size * size, 0);
    for (std::size_t r = 0; r < img.rows; ++r) {
      for (std::size_t c = 0; c < img.cols; ++c) {
        if (src[r * img.cols + c] >= 128) {
          const std::size_t tr = r * size / img.rows;
          const std::size_t tc = c * size / img.cols;
          mask[tr * size + tc] = 1;
        }
      }
    }
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; })) {
      throw IdxError("empty glyph at index " + std::to_string(k));
    }
    GlyphSample g;
    g.height = size;
    g.width = size;
    const int color = pick_color(rng);
    g.thickness = pick_thickness(rng);
    g.color = static_cast<GlyphColor>(color);
    g.t_label = SensitiveLabel(color, g.thickness);
    g.template_index = labels[k];
    for (int t = 0; t < g.thickness; ++t) mask = DilateCross(mask, size, size);
    g.image = ColorizeMask(mask, g.color);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace wiretap
