#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tsf {

struct SeriesScore {
    std::string series;
    double rmse = 0.0;
    double directional_accuracy = 0.0;
};

/// Scores of one (model, horizon) pair over a dataset, with mean and
/// sample standard deviation (divisor n - 1; 0 when n == 1).
struct EvalReport {
    std::string model;
    std::size_t horizon = 0;
    std::string units = "normalized";
    std::string sd_convention = "sample";
    std::vector<SeriesScore> rows;
    double mean_rmse = 0.0;
    double sd_rmse = 0.0;
    double mean_da = 0.0;
    double sd_da = 0.0;
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

/// Arithmetic mean and sample SD; throws ArgumentError on empty input.
MeanSd mean_and_sample_sd(const std::vector<double>& values);

EvalReport aggregate(std::string model, std::size_t horizon, std::vector<SeriesScore> rows,
                     std::string units = "normalized");

/// Columns: model,horizon,units,row,series,rmse,da. `row` is "series" for
/// per-series lines, "mean" or "sd_sample" for the aggregate lines.
void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports);
void write_report_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports);

/// Aligned plain-text table, one block per (model, horizon).
std::string format_report_table(const std::vector<EvalReport>& reports);

} // namespace tsf
