#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsf/dataprep/series.hpp"
#include "tsf/numkit/matrix.hpp"

namespace tsf {

struct PartitionSpec {
    std::size_t window = 60;
    std::size_t horizon = 1;
    std::size_t test_len = 251;
};

enum class Region { train, test };

/// Throws ArgumentError naming Q, w, f and test_len when no training window
/// fits, i.e. unless w, f >= 1, test_len >= f and Q - test_len >= w + f.
void validate(const PartitionSpec& spec, std::size_t series_length);

/// Number of training windows: (Q - test_len) - w - f + 1.
std::size_t train_window_count(const PartitionSpec& spec, std::size_t series_length);
/// Number of test windows: test_len - f + 1.
std::size_t test_window_count(const PartitionSpec& spec);

/// Stride-1 windows over one series. Row i of `inputs` holds samples
/// [s, s + w) and row i of `targets` holds [s + w, s + w + f), where
/// s = origins[i] - w. origins[i] is the index of the first target sample.
struct WindowedDataset {
    Matrix inputs;  // N x w
    Matrix targets; // N x f
    std::vector<std::size_t> origins;
    Bounds bounds;

    std::size_t size() const noexcept { return origins.size(); }
    std::size_t window() const noexcept { return inputs.cols(); }
    std::size_t horizon() const noexcept { return targets.cols(); }
};

/// Training windows keep every target inside [0, Q - test_len). Test windows
/// are those whose whole target lies in [Q - test_len, Q); their inputs may
/// reach back into the training region.
WindowedDataset make_windows(const Series& series, const PartitionSpec& spec, Region region);

} // namespace tsf
