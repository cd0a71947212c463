#include "wiretap_app/outputs.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "wiretap/checkpoint.h"

namespace wiretap::app {

std::string FormatFixed(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid "-0.000000" so sign noise below the printed precision is stable.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

CsvTable::CsvTable(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(FormatFixed(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& v) {
  std::string cell = v;
  if (cell.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : cell) {
      if (c == '"') quoted += '"';
      quoted += c == '\n' ? ' ' : c;
    }
    cell = quoted + "\"";
  }
  cells_.push_back(cell);
  return *this;
}

void CsvTable::Add(const Row& row) {
  if (row.cells_.size() != columns_.size()) {
    throw std::logic_error("CSV row has " + std::to_string(row.cells_.size()) +
                           " cells, schema " + schema_ + " has " +
                           std::to_string(columns_.size()));
  }
  rows_.push_back(row.cells_);
}

std::string CsvTable::Text() const {
  std::string out = "#schema=" + schema_ + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::Write(const std::filesystem::path& path) const {
  WriteFileAtomic(path, Text());
}

namespace {

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

std::string LinePlotSvg(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<PlotSeries>& series) {
  const double w = 640, h = 420, left = 70, right = 160, top = 40, bottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << Escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << Num(px(xv)) << "\" y=\"" << Num(top + ph + 18)
       << "\" text-anchor=\"middle\">" << Tick(xv) << "</text>\n";
    os << "<text x=\"" << Num(left - 6) << "\" y=\"" << Num(py(yv) + 4)
       << "\" text-anchor=\"end\">" << Tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">"
     << Escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += Num(px(s.x[i])) + "," + Num(py(s.y[i])) + " ";
      os << "<circle cx=\"" << Num(px(s.x[i])) << "\" cy=\"" << Num(py(s.y[i]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
       << pts << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << Escape(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string ImageGridPpm(const std::vector<std::vector<std::vector<double>>>& rows,
                         std::size_t height, std::size_t width, std::size_t scale) {
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  if (rows.empty() || cols == 0) throw std::invalid_argument("empty image grid");
  const std::size_t cell_h = height * scale + 1, cell_w = width * scale + 1;
  const std::size_t img_h = rows.size() * cell_h + 1, img_w = cols * cell_w + 1;
  std::vector<std::uint8_t> px(img_h * img_w * 3, 128);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const auto& img = rows[r][c];
      if (img.size() != height * width * 3) throw std::invalid_argument("grid image size mismatch");
      for (std::size_t y = 0; y < height * scale; ++y) {
        for (std::size_t x = 0; x < width * scale; ++x) {
          const std::size_t src = ((y / scale) * width + x / scale) * 3;
          const std::size_t dst = ((r * cell_h + 1 + y) * img_w + c * cell_w + 1 + x) * 3;
          for (int ch = 0; ch < 3; ++ch) {
            const double v = std::clamp(img[src + ch], 0.0, 1.0);
            px[dst + ch] = static_cast<std::uint8_t>(std::lround(v * 255.0));
          }
        }
      }
    }
  }
  std::string out = "P6\n" + std::to_string(img_w) + " " + std::to_string(img_h) + "\n255\n";
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

}  // namespace wiretap::app
