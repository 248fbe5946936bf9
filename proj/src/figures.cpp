#include "cachelab/figures.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cachelab {

namespace {

constexpr const char* kPalette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                    "#42d4f4", "#f032e6", "#9a6324", "#469990", "#800000",
                                    "#808000", "#000075", "#bfef45", "#fabed4", "#dcbeff",
                                    "#a9a9a9"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_figure_svg(std::ostream& out, const FigureData& fig) {
  const double width = 960, height = 540;
  const double left = 70, right = 180, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const double x_span = std::max<double>(1.0, static_cast<double>(fig.x_extent));
  const double y_span = std::max<double>(1.0, fig.rows);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(fig.title) << "</text>\n";
  out << "<g id=\"axes\" stroke=\"black\">\n";
  out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\""
      << fmt(left + plot_w) << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
  out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
      << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
  out << "</g>\n";
  out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(fig.x_label) << " (0-"
      << fig.x_extent << ")</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(top + plot_h / 2) << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << fmt(top + plot_h / 2) << ")\" text-anchor=\"middle\">" << escape(fig.y_label) << "</text>\n";

  out << "<g id=\"points\">\n";
  const std::uint32_t series_count = static_cast<std::uint32_t>(
      std::max<std::size_t>(fig.series.size(), 1));
  for (std::uint32_t s = 0; s < series_count; ++s) {
    out << "<g fill=\"" << kPalette[s % std::size(kPalette)] << "\">\n";
    for (const auto& p : fig.points) {
      if (p.series % series_count != s) continue;
      const double cx = left + plot_w * (static_cast<double>(p.x) + 0.5) / x_span;
      const double cy = top + plot_h * (static_cast<double>(p.row) + 0.5) / y_span;
      out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"1.5\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</g>\n<g id=\"legend\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const double y = top + 14.0 * static_cast<double>(i);
    out << "<rect x=\"" << fmt(width - right + 12) << "\" y=\"" << fmt(y) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[i % std::size(kPalette)] << "\"/>";
    out << "<text x=\"" << fmt(width - right + 28) << "\" y=\"" << fmt(y + 9) << "\">"
        << escape(fig.series[i]) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void write_figure_csv(std::ostream& out, const FigureData& fig) {
  out << "series,label,row,epoch\n";
  for (const auto& p : fig.points) {
    const std::string label = p.series < fig.series.size() ? fig.series[p.series] : "";
    out << p.series << ',' << label << ',' << p.row << ',' << p.x << '\n';
  }
}

std::vector<std::string> emit_figures(const FigureData& fig, const std::filesystem::path& dir) {
  const std::vector<std::string> names = {"figure.svg", "figure.csv"};
  std::ofstream svg(dir / names[0], std::ios::binary);
  std::ofstream csv(dir / names[1], std::ios::binary);
  if (!svg || !csv) throw std::runtime_error("cannot write figures into " + dir.string());
  write_figure_svg(svg, fig);
  write_figure_csv(csv, fig);
  if (!svg.flush() || !csv.flush()) throw std::runtime_error("figure write failed in " + dir.string());
  return names;
}

}  // namespace cachelab
