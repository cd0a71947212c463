#ifndef WIRETAP_DATASET_H_
#define WIRETAP_DATASET_H_

#include <filesystem>
#include <vector>

#include "wiretap/glyphs.h"
#include "wiretap/tensor.h"

namespace wiretap {

// Flattened images (one H*W*3 row per sample) with sensitive labels.
struct Dataset {
  std::size_t height = 0;
  std::size_t width = 0;
  Tensor images;
  std::vector<int> t_labels;

  std::size_t size() const { return t_labels.size(); }
  std::size_t pixel_count() const { return height * width * 3; }

  Dataset Subset(std::span<const std::size_t> indices) const;
  Dataset Head(std::size_t count) const;
};

Dataset ToDataset(const std::vector<GlyphSample>& samples);

// Cache file: u32 count, u32 H, u32 W (little-endian), then per sample
// H*W*3 little-endian f64 pixels followed by one t_label byte.
void SaveDataset(const std::filesystem::path& path, const Dataset& data);
Dataset LoadDataset(const std::filesystem::path& path);

}  // namespace wiretap

#endif  // WIRETAP_DATASET_H_
