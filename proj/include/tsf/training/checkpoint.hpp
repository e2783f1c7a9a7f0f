#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "tsf/cells/cells.hpp"
#include "tsf/dataprep/series.hpp"
#include "tsf/training/adam.hpp"

namespace tsf {

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    std::size_t units = 128;
    bool shuffle = true;
    AdamConfig adam;
    /// Global L2 gradient-norm threshold; 0 disables clipping.
    double clip_norm = 0.0;
};

/// Throws ArgumentError when epochs, batch_size or units is zero or the
/// Adam hyperparameters are out of range.
void validate(const TrainConfig& config);

/// A trained model plus everything needed to reuse it: the normalization
/// bounds of its training series and the configuration that produced it.
struct Checkpoint {
    ModelState model;
    Bounds bounds;
    TrainConfig config;
};

/// On-disk layout (all integers and floats little-endian):
///   "TSFC" | u16 version | u8 kind | u32 window | u32 horizon | u32 units
///   | f64 raw_min | f64 raw_max
///   | u32 epochs | u32 batch_size | u64 seed | u8 shuffle
///   | f64 learning_rate | f64 beta1 | f64 beta2 | f64 epsilon | f64 clip_norm
///   | u32 tensor_count | tensor_count x (u32 rows | u32 cols | rows*cols f64)
///   | u64 FNV-1a checksum of every preceding byte
inline constexpr std::uint16_t checkpoint_version = 1;

void write_checkpoint(const Checkpoint& c, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

/// Throws IoError on open/write failure.
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
/// Throws IoError, VersionMismatchError or CorruptPayloadError.
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace tsf
