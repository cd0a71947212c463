#ifndef WIRETAP_IDX_H_
#define WIRETAP_IDX_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wiretap/glyphs.h"

namespace wiretap {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

class IdxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

IdxImages ReadIdxImages(const std::filesystem::path& path);
std::vector<std::uint8_t> ReadIdxLabels(const std::filesystem::path& path);
void WriteIdxImages(const std::filesystem::path& path, const IdxImages& images);
void WriteIdxLabels(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& labels);

// Thresholds at 0.5, max-pools to size x size, applies a random thickness
// (0-2 cross dilations) and a random pure color. The digit label becomes
// the template index. A glyph with no lit pixel is rejected ("empty glyph").
std::vector<GlyphSample> LoadIdxAndColorize(const std::filesystem::path& images_path,
                                            const std::filesystem::path& labels_path,
                                            std::size_t size, std::uint64_t seed);

}  // namespace wiretap

#endif  // WIRETAP_IDX_H_
