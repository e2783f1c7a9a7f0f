#include "tsf/numkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsf/numkit/errors.hpp"

namespace tsf {

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw ArgumentError("uniform: empty interval [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + ")");
    }
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) {
        throw ArgumentError("index: n must be positive");
    }
    // Rejection sampling removes modulo bias.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next();
    while (x >= limit) {
        x = next();
    }
    return static_cast<std::size_t>(x % bound);
}

Matrix rng_uniform(Rng& rng, double lo, double hi, std::size_t rows, std::size_t cols) {
    if (!(lo < hi)) {
        throw ArgumentError("rng_uniform: requires lo < hi, got lo=" + std::to_string(lo) +
                            " hi=" + std::to_string(hi));
    }
    Matrix out(rows, cols);
    for (double& v : out.data()) {
        v = lo + (hi - lo) * rng.uniform();
    }
    return out;
}

} // namespace tsf
