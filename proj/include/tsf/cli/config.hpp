#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tsf/dataprep/generators.hpp"
#include "tsf/dataprep/windows.hpp"
#include "tsf/training/checkpoint.hpp"

namespace tsf::cli {

enum class DataSource { activities, random_walk, csv };

const char* to_string(DataSource source);
/// Accepts "activities", "random-walk" or "csv".
DataSource parse_data_source(std::string_view text);

enum class ReportUnits { normalized, raw };

const char* to_string(ReportUnits units);
ReportUnits parse_report_units(std::string_view text);

struct DatasetConfig {
    DataSource source = DataSource::activities;
    std::string csv_path;
    bool date_column = false;
    ActivitiesParams activities;
    RandomWalkParams random_walk;
};

/// One experiment: data, partitioning, models and training settings. The
/// top-level seed drives both the data generators and training.
struct ExperimentConfig {
    DatasetConfig dataset;
    std::uint64_t seed = 42;
    std::size_t window = 60;
    std::vector<std::size_t> horizons{1, 20};
    std::size_t test_len = 251;
    /// Any of "lstm", "gru", "baseline".
    std::vector<std::string> models{"lstm", "gru", "baseline"};
    std::size_t train_series_index = 0;
    TrainConfig train;
    /// Fit normalization bounds on the training region only.
    bool fit_bounds_on_train = false;
    std::string output_dir = "out";
    ReportUnits report_units = ReportUnits::normalized;
    std::size_t plot_points = 100;
    /// Origin spacing of the forecast fans drawn for multi-step horizons.
    std::size_t plot_stride = 20;

    /// Training settings with the experiment seed applied.
    TrainConfig train_config() const;
    PartitionSpec partition(std::size_t horizon) const;
};

/// Throws ArgumentError on empty or zero horizons, unknown or repeated
/// models, zero plot settings or invalid training settings.
void validate(const ExperimentConfig& config);

/// JSON document with every field; parse_config(to_json(c)) == c.
std::string to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys and ill-typed values
/// raise ParseError naming the key.
ExperimentConfig parse_config(std::string_view json);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

/// Field-wise equality; train.seed is ignored in favour of seed.
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

} // namespace tsf::cli
