#pragma once

#include <cstddef>
#include <vector>

#include "tsf/dataprep/series.hpp"
#include "tsf/numkit/rng.hpp"

namespace tsf {

/// Weekly activity pattern: five high days followed by two low days.
struct ActivitiesParams {
    std::size_t n_series = 10;
    std::size_t length = 3584;
    std::size_t samples_per_day = 4;
    double high_level = 100.0;
    double low_level = 20.0;
    double noise_sd = 5.0;
    /// Each day's level is scaled by a factor uniform in [1 - j, 1 + j].
    double amplitude_jitter = 0.1;
};

/// Geometric random walk x_{t+1} = x_t * exp(eps_t), eps_t ~ N(0, step_sd^2).
struct RandomWalkParams {
    std::size_t n_series = 10;
    std::size_t length = 3032;
    double start = 100.0;
    double step_sd = 0.015;
};

/// Raw (unnormalized) series named activity_01, activity_02, ...
/// Values are clipped at zero.
std::vector<Series> gen_activities(Rng& rng, const ActivitiesParams& params = {});

/// Raw series named walk_01, walk_02, ...
std::vector<Series> gen_random_walk(Rng& rng, const RandomWalkParams& params = {});

} // namespace tsf
