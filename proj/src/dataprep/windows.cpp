#include "tsf/dataprep/windows.hpp"

#include <string>

#include "tsf/numkit/errors.hpp"

namespace tsf {

void validate(const PartitionSpec& spec, std::size_t q) {
    const auto describe = [&] {
        return " (Q=" + std::to_string(q) + ", w=" + std::to_string(spec.window) +
               ", f=" + std::to_string(spec.horizon) + ", test_len=" + std::to_string(spec.test_len) +
               ")";
    };
    if (spec.window == 0 || spec.horizon == 0) {
        throw ArgumentError("window and horizon must be at least 1" + describe());
    }
    if (spec.test_len < spec.horizon) {
        throw ArgumentError("test_len must be at least the horizon" + describe());
    }
    if (q < spec.test_len || q - spec.test_len < spec.window + spec.horizon) {
        throw ArgumentError("series too short: no training window fits" + describe());
    }
}

std::size_t train_window_count(const PartitionSpec& spec, std::size_t q) {
    validate(spec, q);
    return (q - spec.test_len) - spec.window - spec.horizon + 1;
}

std::size_t test_window_count(const PartitionSpec& spec) {
    return spec.test_len - spec.horizon + 1;
}

WindowedDataset make_windows(const Series& series, const PartitionSpec& spec, Region region) {
    const std::size_t q = series.values.size();
    validate(spec, q);
    const std::size_t w = spec.window;
    const std::size_t f = spec.horizon;
    // First window start and window count for the requested region.
    std::size_t first = 0;
    std::size_t n = train_window_count(spec, q);
    if (region == Region::test) {
        first = q - spec.test_len - w;
        n = test_window_count(spec);
    }
    WindowedDataset ds{Matrix(n, w), Matrix(n, f), {}, series.bounds};
    ds.origins.reserve(n);
    const auto& v = series.values;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = first + i;
        auto in = ds.inputs.row(i);
        auto tg = ds.targets.row(i);
        for (std::size_t k = 0; k < w; ++k) {
            in[k] = v[s + k];
        }
        for (std::size_t k = 0; k < f; ++k) {
            tg[k] = v[s + w + k];
        }
        ds.origins.push_back(s + w);
    }
    return ds;
}

} // namespace tsf
