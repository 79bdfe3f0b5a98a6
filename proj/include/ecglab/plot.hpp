#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecglab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;  // right-continuous step function instead of a polyline
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// Standalone SVG 1.1 document with fixed layout and fixed number
/// formatting, so identical input gives identical bytes. Throws
/// std::invalid_argument when no series has a drawable point (with log_y,
/// only positive values are drawable).
void write_svg(std::ostream& out, const LinePlot& plot);

/// Validates before opening the file, so an empty plot leaves no file.
void write_svg_file(const std::filesystem::path& path, const LinePlot& plot);

}  // namespace ecglab
