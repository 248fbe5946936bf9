#pragma once

// Scatter plots as SVG plus the CSV the plot is drawn from. Output is a pure
// function of the input, so files can be compared byte for byte.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace cachelab {

struct FigurePoint {
  std::uint64_t x = 0;      // epoch
  std::uint32_t row = 0;    // monitoring round
  std::uint32_t series = 0; // color
};

struct FigureData {
  std::string title;
  std::string x_label = "epoch";
  std::string y_label = "monitoring round";
  std::vector<std::string> series;  // legend entries
  std::uint32_t rows = 0;
  std::uint64_t x_extent = 0;
  std::vector<FigurePoint> points;
};

void write_figure_svg(std::ostream& out, const FigureData& fig);
void write_figure_csv(std::ostream& out, const FigureData& fig);

/// Writes `figure.svg` and `figure.csv` into `dir`; returns the file names.
std::vector<std::string> emit_figures(const FigureData& fig, const std::filesystem::path& dir);

}  // namespace cachelab
