#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dslab {

// RFC-4180 CSV: header row, CRLF line ends, fields quoted when they contain
// a comma, quote or line break.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> fields);
  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Locale-independent round-trip formatting (%.12g).
std::string fmt(double v);
std::string fmt_bool(bool b);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Minimal SVG line/scatter plot; log axes optional.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool markers = true;
  bool line = true;
};
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool logx, bool logy);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace dslab
