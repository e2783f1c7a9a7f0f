#include "tsf/evalkit/metrics.hpp"

#include <cmath>
#include <string>

#include "tsf/numkit/errors.hpp"

namespace tsf {

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

void validate(const ForecastSet& set) {
    if (set.origins.empty()) {
        throw ArgumentError("forecast set is empty");
    }
    const std::size_t n = set.origins.size();
    if (set.predicted.rows() != n || set.actual.rows() != n || set.last_observed.size() != n ||
        !set.predicted.same_shape(set.actual)) {
        throw ShapeError("forecast set parts disagree: " + std::to_string(n) + " origins, predicted " +
                         set.predicted.shape_string() + ", actual " + set.actual.shape_string() +
                         ", " + std::to_string(set.last_observed.size()) + " last observations");
    }
}

ForecastSet denormalized(const ForecastSet& set) {
    validate(set);
    if (!set.normalized) {
        return set;
    }
    ForecastSet out = set;
    const auto pred = denormalize(set.predicted.data(), set.bounds);
    const auto act = denormalize(set.actual.data(), set.bounds);
    out.predicted = Matrix(set.predicted.rows(), set.predicted.cols(), pred);
    out.actual = Matrix(set.actual.rows(), set.actual.cols(), act);
    out.last_observed = denormalize(set.last_observed, set.bounds);
    out.normalized = false;
    return out;
}

std::vector<double> baseline_forecast(std::span<const double> window, std::size_t horizon) {
    if (window.empty()) {
        throw ArgumentError("baseline_forecast: empty window");
    }
    if (horizon == 0) {
        throw ArgumentError("baseline_forecast: horizon must be at least 1");
    }
    return std::vector<double>(horizon, window.back());
}

double rmse(const ForecastSet& set) {
    validate(set);
    const auto p = set.predicted.data();
    const auto a = set.actual.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double e = p[i] - a[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(p.size()));
}

double directional_accuracy(const ForecastSet& set) {
    validate(set);
    const std::size_t f = set.horizon();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t k = 0; k < f; ++k) {
            const double ref = k == 0 ? set.last_observed[i] : set.actual(i, k - 1);
            if (sign(set.predicted(i, k) - ref) == sign(set.actual(i, k) - ref)) {
                ++hits;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(set.size() * f);
}

} // namespace tsf
