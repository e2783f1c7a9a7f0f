#pragma once

#include <cstddef>
#include <cstdint>

#include "tsf/numkit/matrix.hpp"

namespace tsf {

/// SplitMix64 generator. The raw 64-bit stream depends only on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in [lo, hi); throws ArgumentError unless lo < hi.
    double uniform(double lo, double hi);
    /// Standard normal draw (Box-Muller, one variate per call).
    double normal();
    /// Uniform integer in [0, n); n must be positive.
    std::size_t index(std::size_t n);

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

Matrix rng_uniform(Rng& rng, double lo, double hi, std::size_t rows, std::size_t cols);

} // namespace tsf
