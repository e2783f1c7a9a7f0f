#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tsf/cli/config.hpp"
#include "tsf/dataprep/series.hpp"
#include "tsf/evalkit/metrics.hpp"
#include "tsf/evalkit/report.hpp"

namespace tsf::cli {

inline constexpr const char* toolkit_version = "0.1.0";

/// File names of every artifact under the output directory.
class OutputLayout {
public:
    explicit OutputLayout(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path dataset() const;
    std::filesystem::path checkpoint(const std::string& model, std::size_t horizon) const;
    std::filesystem::path losses(const std::string& model, std::size_t horizon) const;
    std::filesystem::path forecasts(const std::string& model, std::size_t horizon) const;
    std::filesystem::path report_csv() const;
    std::filesystem::path report_table() const;
    std::filesystem::path plot_svg(const std::string& series, const std::string& model,
                                   std::size_t horizon) const;
    std::filesystem::path plot_csv(const std::string& series, const std::string& model,
                                   std::size_t horizon) const;
    std::filesystem::path manifest() const;

private:
    std::filesystem::path root_;
};

/// Progress messages; silent when quiet.
struct Console {
    std::ostream* out = nullptr;
    bool quiet = false;

    void info(const std::string& line) const;
};

/// Raw series from the configured generator (seeded by config.seed) or CSV
/// file. Throws ArgumentError if train_series_index is out of range.
std::vector<Series> load_dataset(const ExperimentConfig& config);

/// Min-max scaling as used by every stage: constant series map to 0.5, and
/// with fit_bounds_on_train the bounds come from the training region only.
Series prepare_series(const Series& raw, const ExperimentConfig& config);

/// Trains every non-baseline model at every horizon on the configured
/// training series; writes checkpoints and per-epoch loss CSVs.
void stage_train(const ExperimentConfig& config, const std::vector<Series>& raw,
                 const Console& console);

/// Scores every (model, horizon) pair on all series; writes forecast CSVs,
/// the report CSV and the text table. Throws IoError naming the pair when a
/// checkpoint is missing.
std::vector<EvalReport> stage_evaluate(const ExperimentConfig& config,
                                       const std::vector<Series>& raw, const Console& console);

/// Renders an SVG chart and a CSV of plotted values per (series, model,
/// horizon) from the forecast CSVs written by stage_evaluate.
void stage_plot(const ExperimentConfig& config, const Console& console);

/// Forecasts of one (model, horizon) pair keyed by series name, in
/// normalized units with each series' bounds.
std::vector<std::pair<std::string, ForecastSet>> read_forecasts(const std::filesystem::path& path);
void write_forecasts(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, ForecastSet>>& sets);

using StageTimings = std::map<std::string, double>;

/// Writes manifest.json listing the config, seed, version, timings and every
/// artifact of the layout that exists on disk.
void write_manifest(const ExperimentConfig& config, const StageTimings& timings);

/// generate/load, train, evaluate and plot in sequence, then the manifest.
/// Stage errors are rethrown with the stage name prefixed.
void run_pipeline(const ExperimentConfig& config, const Console& console);

} // namespace tsf::cli
