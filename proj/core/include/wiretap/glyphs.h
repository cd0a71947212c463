#ifndef WIRETAP_GLYPHS_H_
#define WIRETAP_GLYPHS_H_

#include <cstdint>
#include <vector>

#include "wiretap/tensor.h"

namespace wiretap {

enum class GlyphColor : std::uint8_t { kRed = 0, kGreen = 1, kBlue = 2 };

inline constexpr int kColorCount = 3;
inline constexpr int kThicknessCount = 3;
inline constexpr int kSensitiveClasses = kColorCount * kThicknessCount;
inline constexpr int kTemplateCount = 10;

inline int SensitiveLabel(int color, int thickness) {
  return kThicknessCount * color + thickness;
}
inline int ColorOf(int t_label) { return t_label / kThicknessCount; }
inline int ThicknessOf(int t_label) { return t_label % kThicknessCount; }

// A colored glyph stored height x width x 3 (channel fastest), values in
// [0, 1]. Only the channel named by `color` is ever nonzero.
struct GlyphSample {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> image;
  GlyphColor color = GlyphColor::kRed;
  int thickness = 0;
  int t_label = 0;
  int template_index = 0;
};

// Binary mask of a template rendered with 1-pixel strokes, shifted by
// (dx, dy) pixels, then dilated `thickness` times with a 3x3 cross.
std::vector<std::uint8_t> RenderGlyphMask(int template_index, std::size_t size,
                                          int thickness, int dx, int dy);

// size x size mask -> H x W x 3 image lit in one color channel.
std::vector<double> ColorizeMask(const std::vector<std::uint8_t>& mask,
                                 GlyphColor color);

std::vector<std::uint8_t> DilateCross(const std::vector<std::uint8_t>& mask,
                                      std::size_t height, std::size_t width);

// Sensitive labels are drawn in shuffled blocks of nine (so any nine
// consecutive samples starting at a multiple of nine cover every class);
// templates and jitter are drawn independently of the label.
std::vector<GlyphSample> GenerateGlyphs(std::size_t count, std::size_t size,
                                        std::uint64_t seed);

bool IsPureHue(const GlyphSample& g);
std::size_t LitPixels(const GlyphSample& g);

}  // namespace wiretap

#endif  // WIRETAP_GLYPHS_H_
