#pragma once

#include <string>

#include "tsf/dataprep/windows.hpp"
#include "tsf/evalkit/metrics.hpp"
#include "tsf/training/checkpoint.hpp"

namespace tsf {

/// Either the persistence baseline or a trained checkpoint. Holds a
/// reference to the checkpoint, which must outlive the forecaster.
class Forecaster {
public:
    static Forecaster baseline() { return Forecaster(nullptr); }
    static Forecaster from_checkpoint(const Checkpoint& c) { return Forecaster(&c); }

    /// "baseline", "lstm" or "gru".
    std::string tag() const;
    bool is_baseline() const noexcept { return checkpoint_ == nullptr; }
    const Checkpoint* checkpoint() const noexcept { return checkpoint_; }

    /// windows: n x w normalized inputs. Returns n x horizon.
    Matrix predict(const Matrix& windows, std::size_t horizon) const;

private:
    explicit Forecaster(const Checkpoint* c) : checkpoint_(c) {}
    const Checkpoint* checkpoint_;
};

struct Evaluation {
    ForecastSet forecasts;
    double rmse = 0.0;
    double directional_accuracy = 0.0;
};

/// Forecasts every test window of an already normalized series and scores
/// them. With normalized_units=false the forecast set is mapped back to raw
/// units with the series' own bounds before scoring. Throws ArgumentError if
/// a checkpoint's window or horizon differs from spec.
Evaluation evaluate(const Forecaster& forecaster, const Series& normalized_series,
                    const PartitionSpec& spec, bool normalized_units = true);

} // namespace tsf
