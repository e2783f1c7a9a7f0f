#include "tsf/dataprep/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tsf/numkit/errors.hpp"

namespace tsf {

namespace {

std::string numbered(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02zu", stem, i + 1);
    return buf;
}

} // namespace

std::vector<Series> gen_activities(Rng& rng, const ActivitiesParams& p) {
    if (p.n_series == 0 || p.samples_per_day == 0) {
        throw ArgumentError("activities: n_series and samples_per_day must be positive");
    }
    if (p.length < 7 * p.samples_per_day) {
        throw ArgumentError("activities: length " + std::to_string(p.length) +
                            " is shorter than one week (" + std::to_string(7 * p.samples_per_day) +
                            " samples)");
    }
    if (p.noise_sd < 0.0 || p.amplitude_jitter < 0.0 || p.amplitude_jitter >= 1.0 ||
        !std::isfinite(p.high_level) || !std::isfinite(p.low_level)) {
        throw ArgumentError("activities: noise_sd must be >= 0 and amplitude_jitter in [0, 1)");
    }
    std::vector<Series> out;
    out.reserve(p.n_series);
    for (std::size_t s = 0; s < p.n_series; ++s) {
        Series series{numbered("activity", s), {}, {}};
        series.values.reserve(p.length);
        double factor = 1.0;
        for (std::size_t t = 0; t < p.length; ++t) {
            const std::size_t day = t / p.samples_per_day;
            if (t % p.samples_per_day == 0) {
                factor = 1.0 + p.amplitude_jitter * (2.0 * rng.uniform() - 1.0);
            }
            const double level = (day % 7) < 5 ? p.high_level : p.low_level;
            const double x = level * factor + p.noise_sd * rng.normal();
            series.values.push_back(std::max(0.0, x));
        }
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<Series> gen_random_walk(Rng& rng, const RandomWalkParams& p) {
    if (p.n_series == 0 || p.length < 2) {
        throw ArgumentError("random walk: need n_series >= 1 and length >= 2");
    }
    if (!(p.start > 0.0) || !std::isfinite(p.start) || p.step_sd < 0.0 ||
        !std::isfinite(p.step_sd)) {
        throw ArgumentError("random walk: start must be positive and step_sd non-negative");
    }
    std::vector<Series> out;
    out.reserve(p.n_series);
    for (std::size_t s = 0; s < p.n_series; ++s) {
        Series series{numbered("walk", s), {}, {}};
        series.values.reserve(p.length);
        double x = p.start;
        series.values.push_back(x);
        for (std::size_t t = 1; t < p.length; ++t) {
            x *= std::exp(p.step_sd * rng.normal());
            series.values.push_back(x);
        }
        out.push_back(std::move(series));
    }
    return out;
}

} // namespace tsf
