#ifndef WIRETAP_APP_OUTPUTS_H_
#define WIRETAP_APP_OUTPUTS_H_

#include <filesystem>
#include <string>
#include <vector>

namespace wiretap::app {

// CSV text whose first line is "#schema=<name>/<version>", then a header
// row, then data rows. Doubles use fixed 6-digit formatting so reruns are
// byte-identical.
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns);

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(long long v);
    Row& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
    Row& operator<<(int v) { return *this << static_cast<long long>(v); }
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v) { return *this << std::string(v); }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  // Throws std::logic_error when the row width differs from the header.
  void Add(const Row& row);
  std::size_t rows() const { return rows_.size(); }
  const std::string& schema() const { return schema_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string Text() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string FormatFixed(double v);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line plot with markers, axis ticks and a legend.
std::string LinePlotSvg(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<PlotSeries>& series);

// Grid of H x W x 3 images in [0, 1], one row per entry of `rows`,
// as binary PPM (P6) with a one-pixel gray gutter.
std::string ImageGridPpm(const std::vector<std::vector<std::vector<double>>>& rows,
                         std::size_t height, std::size_t width, std::size_t scale = 2);

}  // namespace wiretap::app

#endif  // WIRETAP_APP_OUTPUTS_H_
