#include "tsf/dataprep/series.hpp"

#include <algorithm>
#include <cmath>

#include "tsf/numkit/errors.hpp"

namespace tsf {

Series normalize(const Series& series, const NormalizeOptions& options) {
    const auto& v = series.values;
    if (v.size() < 2) {
        throw ArgumentError("series '" + series.name + "' needs at least 2 samples, has " +
                            std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw ArgumentError("series '" + series.name + "' has a non-finite value at index " +
                                std::to_string(i));
        }
    }
    std::size_t fit = v.size();
    if (options.fit_length) {
        fit = *options.fit_length;
        if (fit < 1 || fit > v.size()) {
            throw ArgumentError("fit length " + std::to_string(fit) + " outside [1, " +
                                std::to_string(v.size()) + "]");
        }
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(fit));
    Bounds b{*lo, *hi};
    if (!(b.max > b.min)) {
        if (!options.degenerate_to_half) {
            throw DegenerateSeriesError("series '" + series.name + "' is constant (" +
                                        std::to_string(b.min) + "); cannot min-max normalize");
        }
        b = Bounds{b.min - 0.5, b.min + 0.5};
    }
    Series out{series.name, {}, b};
    out.values.reserve(v.size());
    const double range = b.max - b.min;
    for (double x : v) {
        out.values.push_back((x - b.min) / range);
    }
    return out;
}

std::vector<double> denormalize(std::span<const double> values, const Bounds& bounds) {
    if (!(bounds.max > bounds.min)) {
        throw ArgumentError("invalid bounds (" + std::to_string(bounds.min) + ", " +
                            std::to_string(bounds.max) + "): max must exceed min");
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (double x : values) {
        out.push_back(denormalize_value(x, bounds));
    }
    return out;
}

Series denormalize(const Series& series) {
    return Series{series.name, denormalize(series.values, series.bounds), series.bounds};
}

} // namespace tsf
