#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsf {

/// Raw-value range used for min-max scaling.
struct Bounds {
    double min = 0.0;
    double max = 1.0;

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Series {
    std::string name;
    std::vector<double> values;
    /// Bounds recorded by normalize(); (0, 1) for a series never normalized.
    Bounds bounds;
};

struct NormalizeOptions {
    /// Map a constant series to 0.5 instead of raising DegenerateSeriesError.
    /// The recorded bounds become (c - 0.5, c + 0.5), which inverts exactly.
    bool degenerate_to_half = false;
    /// Fit bounds on the first `fit_length` samples only (leak-free mode).
    std::optional<std::size_t> fit_length;
};

/// x' = (x - min) / (max - min) with min/max over the whole series (or the
/// fitted prefix). Requires at least two finite samples.
Series normalize(const Series& series, const NormalizeOptions& options = {});

/// Inverse of normalize(); throws ArgumentError unless bounds.max > bounds.min.
std::vector<double> denormalize(std::span<const double> values, const Bounds& bounds);
Series denormalize(const Series& series);

inline double denormalize_value(double v, const Bounds& b) { return b.min + v * (b.max - b.min); }

} // namespace tsf
