#include "wiretap/glyphs.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace wiretap {
namespace {

struct Point {
  double x;
  double y;
};
using Stroke = std::vector<Point>;

// Digit-like stroke templates on the unit square (y grows downward).
const std::array<std::vector<Stroke>, kTemplateCount>& Templates() {
  static const std::array<std::vector<Stroke>, kTemplateCount> kTemplates = {{
      {{{0.5, 0.0}, {0.82, 0.15}, {0.92, 0.5}, {0.82, 0.85}, {0.5, 1.0},
        {0.18, 0.85}, {0.08, 0.5}, {0.18, 0.15}, {0.5, 0.0}}},
      {{{0.25, 0.25}, {0.55, 0.0}, {0.55, 1.0}}},
      {{{0.12, 0.25}, {0.35, 0.03}, {0.7, 0.03}, {0.88, 0.25}, {0.8, 0.48},
        {0.12, 1.0}, {0.92, 1.0}}},
      {{{0.12, 0.03}, {0.88, 0.03}, {0.45, 0.42}, {0.85, 0.62}, {0.75, 0.92},
        {0.45, 1.0}, {0.12, 0.88}}},
      {{{0.72, 1.0}, {0.72, 0.0}, {0.08, 0.65}, {0.95, 0.65}}},
      {{{0.88, 0.03}, {0.2, 0.03}, {0.15, 0.45}, {0.65, 0.42}, {0.88, 0.68},
        {0.7, 0.97}, {0.12, 0.92}}},
      {{{0.78, 0.03}, {0.3, 0.3}, {0.12, 0.7}, {0.3, 0.97}, {0.7, 0.97},
        {0.88, 0.72}, {0.7, 0.5}, {0.18, 0.58}}},
      {{{0.08, 0.03}, {0.92, 0.03}, {0.4, 1.0}}},
      {{{0.5, 0.0}, {0.82, 0.12}, {0.82, 0.36}, {0.5, 0.48}, {0.18, 0.36},
        {0.18, 0.12}, {0.5, 0.0}},
       {{0.5, 0.48}, {0.88, 0.65}, {0.85, 0.9}, {0.5, 1.0}, {0.15, 0.9},
        {0.12, 0.65}, {0.5, 0.48}}},
      {{{0.85, 0.4}, {0.3, 0.45}, {0.12, 0.25}, {0.3, 0.03}, {0.7, 0.03},
        {0.88, 0.22}, {0.85, 0.4}, {0.6, 1.0}}},
  }};
  return kTemplates;
}

}  // namespace

std::vector<std::uint8_t> DilateCross(const std::vector<std::uint8_t>& mask,
                                      std::size_t height, std::size_t width) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  auto lit = [&](long r, long c) {
    return r >= 0 && c >= 0 && r < static_cast<long>(height) &&
           c < static_cast<long>(width) &&
           mask[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)];
  };
  for (long r = 0; r < static_cast<long>(height); ++r) {
    for (long c = 0; c < static_cast<long>(width); ++c) {
      const bool on = lit(r, c) || lit(r - 1, c) || lit(r + 1, c) ||
                      lit(r, c - 1) || lit(r, c + 1);
      out[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)] = on;
    }
  }
  return out;
}

std::vector<std::uint8_t> RenderGlyphMask(int template_index, std::size_t size,
                                          int thickness, int dx, int dy) {
  if (template_index < 0 || template_index >= kTemplateCount) {
    throw std::out_of_range("glyph template index out of range");
  }
  if (size < 8) throw std::invalid_argument("glyph size must be at least 8");
  if (thickness < 0 || thickness >= kThicknessCount) {
    throw std::out_of_range("thickness must be 0, 1 or 2");
  }
  // Margin leaves room for one pixel of jitter plus two dilations.
  const double margin = std::max(3.0, std::round(static_cast<double>(size) / 5.0));
  const double span = static_cast<double>(size) - 1.0 - 2.0 * margin;
  std::vector<std::uint8_t> mask(size * size, 0);
  auto plot = [&](double x, double y) {
    const long c = std::lround(margin + x * span) + dx;
    const long r = std::lround(margin + y * span) + dy;
    if (r >= 0 && c >= 0 && r < static_cast<long>(size) && c < static_cast<long>(size)) {
      mask[static_cast<std::size_t>(r) * size + static_cast<std::size_t>(c)] = 1;
    }
  };
  for (const Stroke& stroke : Templates()[static_cast<std::size_t>(template_index)]) {
    for (std::size_t k = 0; k + 1 < stroke.size(); ++k) {
      const Point a = stroke[k];
      const Point b = stroke[k + 1];
      const double len = std::hypot(b.x - a.x, b.y - a.y) * span;
      const int steps = std::max(1, static_cast<int>(std::ceil(len * 3.0)));
      for (int s = 0; s <= steps; ++s) {
        const double u = static_cast<double>(s) / steps;
        plot(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y));
      }
    }
  }
  for (int t = 0; t < thickness; ++t) mask = DilateCross(mask, size, size);
  return mask;
}

std::vector<double> ColorizeMask(const std::vector<std::uint8_t>& mask,
                                 GlyphColor color) {
  std::vector<double> image(mask.size() * 3, 0.0);
  const auto channel = static_cast<std::size_t>(color);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) image[i * 3 + channel] = 1.0;
  }
  return image;
}

std::vector<GlyphSample> GenerateGlyphs(std::size_t count, std::size_t size,
                                        std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("glyph count must be positive");
  if (size < 8) throw std::invalid_argument("glyph size must be at least 8");
  Rng rng(seed);
  std::uniform_int_distribution<int> pick_template(0, kTemplateCount - 1);
  std::uniform_int_distribution<int> pick_shift(-1, 1);

  std::vector<GlyphSample> out;
  out.reserve(count);
  std::array<int, kSensitiveClasses> block{};
  for (std::size_t i = 0; i < count; ++i) {
    if (i % kSensitiveClasses == 0) {
      std::iota(block.begin(), block.end(), 0);
      std::shuffle(block.begin(), block.end(), rng);
    }
    GlyphSample g;
    g.height = size;
    g.width = size;
    g.t_label = block[i % kSensitiveClasses];
    g.color = static_cast<GlyphColor>(ColorOf(g.t_label));
    g.thickness = ThicknessOf(g.t_label);
    g.template_index = pick_template(rng);
    const int dx = pick_shift(rng);
    const int dy = pick_shift(rng);
    g.image = ColorizeMask(RenderGlyphMask(g.template_index, size, g.thickness, dx, dy),
                           g.color);
    out.push_back(std::move(g));
  }
  return out;
}

bool IsPureHue(const GlyphSample& g) {
  const auto own = static_cast<std::size_t>(g.color);
  bool any = false;
  for (std::size_t i = 0; i < g.height * g.width; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = g.image[i * 3 + c];
      if (c == own) {
        any = any || v > 0.0;
      } else if (v != 0.0) {
        return false;
      }
    }
  }
  return any;
}

std::size_t LitPixels(const GlyphSample& g) {
  std::size_t lit = 0;
  for (std::size_t i = 0; i < g.height * g.width; ++i) {
    if (g.image[i * 3] > 0 || g.image[i * 3 + 1] > 0 || g.image[i * 3 + 2] > 0) ++lit;
  }
  return lit;
}

}  // namespace wiretap
