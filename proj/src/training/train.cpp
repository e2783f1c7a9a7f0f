#include "tsf/training/train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsf/numkit/errors.hpp"

namespace tsf {

void validate(const TrainConfig& config) {
    if (config.epochs == 0) {
        throw ArgumentError("epochs must be at least 1");
    }
    if (config.batch_size == 0) {
        throw ArgumentError("batch_size must be at least 1");
    }
    if (config.units == 0) {
        throw ArgumentError("units must be at least 1");
    }
    if (!(config.clip_norm >= 0.0)) {
        throw ArgumentError("clip_norm must be >= 0");
    }
    const std::vector<const Matrix*> none;
    AdamState probe(config.adam, none);
}

std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    if (shuffle) {
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[rng.index(i)]);
        }
    }
    return order;
}

double clip_global_norm(std::span<Matrix* const> grads, double max_norm) {
    double sq = 0.0;
    for (const Matrix* g : grads) {
        for (double v : g->data()) {
            sq += v * v;
        }
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (Matrix* g : grads) {
            for (double& v : g->data()) {
                v *= scale;
            }
        }
    }
    return norm;
}

TrainResult train(CellKind kind, const WindowedDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
    validate(config);
    if (dataset.size() == 0) {
        throw ArgumentError("cannot train on an empty dataset");
    }
    const std::size_t n = dataset.size();
    const std::size_t w = dataset.window();
    const std::size_t f = dataset.horizon();

    Rng rng(config.seed);
    ModelState model(kind, config.units, w, f);
    model.initialize(rng);
    const auto params = model.parameter_tensors();
    const auto grads = model.gradient_tensors();
    const std::vector<const Matrix*> params_view(params.begin(), params.end());
    const std::vector<const Matrix*> grads_view(grads.begin(), grads.end());
    AdamState adam(config.adam, params_view);

    std::vector<double> history;
    history.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto order = epoch_order(n, config.shuffle, rng);
        double total = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t count = std::min(config.batch_size, n - start);
            Matrix xb(count, w);
            Matrix yb(count, f);
            for (std::size_t r = 0; r < count; ++r) {
                const std::size_t src = order[start + r];
                std::ranges::copy(dataset.inputs.row(src), xb.row(r).begin());
                std::ranges::copy(dataset.targets.row(src), yb.row(r).begin());
            }
            try {
                const double loss = backward_batch(model, xb, yb);
                if (config.clip_norm > 0.0) {
                    clip_global_norm(grads, config.clip_norm);
                }
                adam.update(params, grads_view);
                total += loss * static_cast<double>(count);
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) +
                                   ", batch " + std::to_string(batch_index + 1) + ": " + e.what());
            }
        }
        const double epoch_loss = total / static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw NumericError("non-finite mean loss at epoch " + std::to_string(epoch + 1));
        }
        history.push_back(epoch_loss);
        if (on_epoch) {
            on_epoch(epoch + 1, epoch_loss);
        }
    }
    return TrainResult{Checkpoint{std::move(model), dataset.bounds, config}, std::move(history)};
}

} // namespace tsf
