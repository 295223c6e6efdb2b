// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace occsim::cli {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  ///< draw points instead of a polyline
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// SVG 1.1 line plot with linear axes, five ticks per axis and a legend.
/// Output depends only on the spec, so repeated runs are byte-identical.
void write_svg_plot(const PlotSpec& spec, std::ostream& out);

}  // namespace occsim::cli
