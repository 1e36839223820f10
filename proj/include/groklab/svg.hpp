#pragma once

#include <string>
#include <vector>

#include "groklab/linalg.hpp"

namespace grok {

struct Series {
  std::string label;
  Vector x;
  Vector y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

// Polyline per series; non-finite points (and non-positive ones on log axes)
// are skipped.
std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series);
// Markers per `points` series plus optional polylines for `curves`.
std::string scatter_chart(const ChartSpec& spec, const std::vector<Series>& points, const std::vector<Series>& curves);
// Heat map of z (rows follow y, columns follow x) on log axes, with polyline
// overlays in the same coordinates.
std::string heatmap_chart(const ChartSpec& spec, const Vector& x, const Vector& y, const Matrix& z,
                          const std::vector<Series>& overlays);

std::string xml_escape(const std::string& s);

}  // namespace grok
