#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tsf/cells/cells.hpp"
#include "tsf/dataprep/windows.hpp"
#include "tsf/training/adam.hpp"
#include "tsf/training/checkpoint.hpp"

namespace tsf {

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<double> loss_history; // mean per-sample training loss, one entry per epoch
};

/// Called after every epoch with the 1-based epoch number and its mean loss.
using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Mini-batch training with Adam on the MSE loss. Deterministic given
/// config.seed: parameter initialization and per-epoch shuffles draw from a
/// single SplitMix64 stream.
TrainResult train(CellKind kind, const WindowedDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Sample order used for one epoch: identity when shuffling is off,
/// otherwise a Fisher-Yates permutation drawn from rng.
std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, Rng& rng);

/// Scales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_global_norm(std::span<Matrix* const> grads, double max_norm);

} // namespace tsf
