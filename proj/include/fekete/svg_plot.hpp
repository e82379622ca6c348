#pragma once

// Minimal static SVG line plots: axes, polyline series and a legend.

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fekete {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // non-finite y values are skipped
  std::string color = "#1f77b4";
  bool markers = false;
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 720;
  int height = 440;
  /// Written into a comment element when set; left out for reproducible files.
  std::optional<std::string> timestamp;
};

std::string render_svg(const LinePlot& plot);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace fekete
