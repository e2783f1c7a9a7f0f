#include "tsf/cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tsf/dataprep/csv.hpp"
#include "tsf/numkit/errors.hpp"

namespace tsf::cli {

namespace {

constexpr double width = 900.0;
constexpr double height = 440.0;
constexpr double left = 80.0;
constexpr double right = 170.0;
constexpr double top = 50.0;
constexpr double bottom = 60.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad(double fraction) {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
            return;
        }
        const double d = (hi - lo) * fraction;
        lo -= d;
        hi += d;
    }
};

} // namespace

std::vector<PlotPoint> select_plot_points(const ForecastSet& set, std::size_t max_points,
                                          std::size_t stride) {
    validate(set);
    if (max_points == 0 || stride == 0) {
        throw ArgumentError("plot points and stride must be >= 1");
    }
    const std::size_t f = set.horizon();
    const std::size_t span = std::min(max_points, set.size() + f - 1);
    const std::size_t first = set.origins.front();
    const std::size_t step_between = f == 1 ? 1 : stride;
    std::vector<PlotPoint> points;
    for (std::size_t i = 0; i < set.size() && i < span; i += step_between) {
        for (std::size_t k = 0; k < f; ++k) {
            const std::size_t index = set.origins[i] + k;
            if (index >= first + span) {
                break;
            }
            points.push_back({set.origins[i], k + 1, index, set.actual(i, k), set.predicted(i, k)});
        }
    }
    return points;
}

Chart build_chart(const std::vector<PlotPoint>& points, std::size_t horizon, std::string title) {
    Chart chart;
    chart.title = std::move(title);
    std::vector<std::pair<double, double>> actual;
    for (const PlotPoint& p : points) {
        actual.emplace_back(static_cast<double>(p.index), p.actual);
    }
    std::sort(actual.begin(), actual.end());
    actual.erase(std::unique(actual.begin(), actual.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 actual.end());
    chart.actual = std::move(actual);
    if (horizon == 1) {
        std::vector<std::pair<double, double>> line;
        for (const PlotPoint& p : points) {
            line.emplace_back(static_cast<double>(p.index), p.predicted);
        }
        chart.predicted.push_back(std::move(line));
        return chart;
    }
    for (const PlotPoint& p : points) {
        if (p.step == 1 || chart.predicted.empty()) {
            chart.predicted.emplace_back();
        }
        chart.predicted.back().emplace_back(static_cast<double>(p.index), p.predicted);
    }
    return chart;
}

std::string render_svg(const Chart& chart) {
    Range xr;
    Range yr;
    for (const auto& [x, y] : chart.actual) {
        xr.add(x);
        yr.add(y);
    }
    for (const auto& line : chart.predicted) {
        for (const auto& [x, y] : line) {
            xr.add(x);
            yr.add(y);
        }
    }
    if (!std::isfinite(xr.lo)) {
        xr = Range{0.0, 1.0};
        yr = Range{0.0, 1.0};
    }
    if (!(xr.hi > xr.lo)) {
        xr.pad(0.0);
    }
    yr.pad(0.05);
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(left + plot_w / 2) +
         "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         escape(chart.title) + "</text>\n";

    // Axes with five ticks each.
    s += "<g stroke=\"#333\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
         num(left + plot_w) + "\" y2=\"" + num(top + plot_h) + "\"/>\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
         "\" y2=\"" + num(top + plot_h) + "\"/>\n";
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        s += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(top + plot_h + 16) +
             "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
        s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(yv) + 4) +
             "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    s += "</g>\n";
    s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(chart.x_label) + "</text>\n";
    s += "<text transform=\"translate(20 " + num(top + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(chart.y_label) + "</text>\n";

    auto polyline = [&](const std::vector<std::pair<double, double>>& line, const char* cls,
                        const char* color) {
        std::string pts;
        for (const auto& [x, y] : line) {
            if (!pts.empty()) {
                pts += ' ';
            }
            pts += num(sx(x)) + "," + num(sy(y));
        }
        s += std::string("<polyline class=\"") + cls + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    };
    polyline(chart.actual, "actual", "#1f77b4");
    for (const auto& line : chart.predicted) {
        polyline(line, "predicted", "#ff7f0e");
    }

    const double lx = left + plot_w + 20;
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(top + 10) + "\" x2=\"" + num(lx + 24) +
         "\" y2=\"" + num(top + 10) + "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(top + 14) + "\">actual</text>\n";
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(top + 30) + "\" x2=\"" + num(lx + 24) +
         "\" y2=\"" + num(top + 30) + "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(top + 34) + "\">predicted</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

std::string plot_points_csv(const std::vector<PlotPoint>& points) {
    std::string s = "origin,step,index,actual,predicted\n";
    for (const PlotPoint& p : points) {
        s += std::to_string(p.origin) + "," + std::to_string(p.step) + "," +
             std::to_string(p.index) + "," + format_double(p.actual) + "," +
             format_double(p.predicted) + "\n";
    }
    return s;
}

} // namespace tsf::cli
