#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsf/dataprep/series.hpp"
#include "tsf/numkit/matrix.hpp"

namespace tsf {

/// Forecasts over consecutive origins of one series. Row i of `predicted`
/// and `actual` covers samples [origins[i], origins[i] + f); last_observed[i]
/// is the final input sample before that origin.
struct ForecastSet {
    std::vector<std::size_t> origins;
    Matrix predicted;
    Matrix actual;
    std::vector<double> last_observed;
    Bounds bounds;
    /// True while values are in [0, 1]-normalized space.
    bool normalized = true;

    std::size_t size() const noexcept { return origins.size(); }
    std::size_t horizon() const noexcept { return predicted.cols(); }
};

/// Throws ShapeError if the parts of `set` disagree in length or horizon, or
/// ArgumentError if it is empty.
void validate(const ForecastSet& set);

/// The same forecasts mapped back to raw units with set.bounds.
ForecastSet denormalized(const ForecastSet& set);

/// Persistence forecast: f copies of the window's last value.
std::vector<double> baseline_forecast(std::span<const double> window, std::size_t horizon);

/// Square root of the mean squared error over every (origin, step) pair.
double rmse(const ForecastSet& set);

/// Fraction of (origin, step) pairs whose predicted direction of change
/// matches the realized one. The reference for step 1 is the last observed
/// input; for step k > 1 it is the actual value at step k - 1. Directions
/// are sign() in {-1, 0, +1}, so a flat prediction only matches a flat actual.
double directional_accuracy(const ForecastSet& set);

} // namespace tsf
