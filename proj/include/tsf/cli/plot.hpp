#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsf/evalkit/metrics.hpp"

namespace tsf::cli {

/// One plotted forecast value; `index` is the absolute sample position
/// origin + step - 1 (steps are 1-based).
struct PlotPoint {
    std::size_t origin = 0;
    std::size_t step = 0;
    std::size_t index = 0;
    double actual = 0.0;
    double predicted = 0.0;
};

/// Forecast points shown over the first min(max_points, test span) test
/// samples. Horizon 1 keeps every origin; longer horizons keep whole
/// forecast fans starting every `stride` origins, clipped to the span.
std::vector<PlotPoint> select_plot_points(const ForecastSet& set, std::size_t max_points,
                                          std::size_t stride);

struct Chart {
    std::string title;
    std::string x_label = "sample index";
    std::string y_label = "value";
    /// Actual series as (index, value) pairs.
    std::vector<std::pair<double, double>> actual;
    /// Each fan becomes its own polyline.
    std::vector<std::vector<std::pair<double, double>>> predicted;
};

/// Actual line plus one predicted line (horizon 1) or one line per fan.
Chart build_chart(const std::vector<PlotPoint>& points, std::size_t horizon, std::string title);

/// Self-contained SVG: one <polyline> per series line, axes, ticks, labels
/// and a legend.
std::string render_svg(const Chart& chart);

/// Columns origin,step,index,actual,predicted.
std::string plot_points_csv(const std::vector<PlotPoint>& points);

} // namespace tsf::cli
