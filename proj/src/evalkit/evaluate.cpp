#include "tsf/evalkit/evaluate.hpp"

#include <algorithm>

#include "tsf/numkit/errors.hpp"

namespace tsf {

std::string Forecaster::tag() const {
    return checkpoint_ ? to_string(checkpoint_->model.kind()) : "baseline";
}

Matrix Forecaster::predict(const Matrix& windows, std::size_t horizon) const {
    if (checkpoint_ == nullptr) {
        Matrix out(windows.rows(), horizon);
        for (std::size_t i = 0; i < windows.rows(); ++i) {
            const auto f = baseline_forecast(windows.row(i), horizon);
            std::ranges::copy(f, out.row(i).begin());
        }
        return out;
    }
    if (checkpoint_->model.horizon() != horizon) {
        throw ArgumentError("checkpoint horizon " + std::to_string(checkpoint_->model.horizon()) +
                            " cannot produce " + std::to_string(horizon) + "-step forecasts");
    }
    return tsf::predict(checkpoint_->model, windows);
}

Evaluation evaluate(const Forecaster& forecaster, const Series& series, const PartitionSpec& spec,
                    bool normalized_units) {
    if (const Checkpoint* c = forecaster.checkpoint()) {
        if (c->model.window() != spec.window || c->model.horizon() != spec.horizon) {
            throw ArgumentError("checkpoint (" + forecaster.tag() + ", w=" +
                                std::to_string(c->model.window()) + ", f=" +
                                std::to_string(c->model.horizon()) + ") does not match w=" +
                                std::to_string(spec.window) + ", f=" +
                                std::to_string(spec.horizon));
        }
    }
    const WindowedDataset test = make_windows(series, spec, Region::test);
    ForecastSet set;
    set.origins = test.origins;
    set.predicted = forecaster.predict(test.inputs, spec.horizon);
    set.actual = test.targets;
    set.last_observed.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        set.last_observed.push_back(test.inputs(i, spec.window - 1));
    }
    set.bounds = series.bounds;
    set.normalized = true;
    if (!normalized_units) {
        set = denormalized(set);
    }
    Evaluation out;
    out.rmse = rmse(set);
    out.directional_accuracy = directional_accuracy(set);
    out.forecasts = std::move(set);
    return out;
}

} // namespace tsf
