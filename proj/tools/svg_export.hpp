#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace monokan {

struct SplinePlot {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained small-multiples SVG: one cell per edge spline.
inline std::string render_spline_grid(const std::vector<SplinePlot>& plots) {
  constexpr double cell_w = 160.0, cell_h = 120.0, pad = 18.0;
  const std::size_t cols = plots.empty()
                               ? 1
                               : std::max<std::size_t>(
                                     1, static_cast<std::size_t>(std::ceil(
                                            std::sqrt(static_cast<double>(plots.size())))));
  const std::size_t rows = plots.empty() ? 1 : (plots.size() + cols - 1) / cols;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * cell_w
      << "\" height=\"" << rows * cell_h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < plots.size(); ++p) {
    const SplinePlot& plot = plots[p];
    const double ox = static_cast<double>(p % cols) * cell_w;
    const double oy = static_cast<double>(p / cols) * cell_h;
    double ymin = *std::min_element(plot.y.begin(), plot.y.end());
    double ymax = *std::max_element(plot.y.begin(), plot.y.end());
    if (ymax - ymin < 1e-12) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double xmin = plot.x.front(), xmax = plot.x.back();
    svg << "<rect x=\"" << ox + pad << "\" y=\"" << oy + pad << "\" width=\""
        << cell_w - 2 * pad << "\" height=\"" << cell_h - 2 * pad
        << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    svg << "<text x=\"" << ox + pad << "\" y=\"" << oy + pad - 5
        << "\" font-size=\"9\" font-family=\"sans-serif\">" << plot.label << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (std::size_t s = 0; s < plot.x.size(); ++s) {
      const double px = ox + pad + (plot.x[s] - xmin) / (xmax - xmin) * (cell_w - 2 * pad);
      const double py =
          oy + cell_h - pad - (plot.y[s] - ymin) / (ymax - ymin) * (cell_h - 2 * pad);
      svg << px << ',' << py << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace monokan
