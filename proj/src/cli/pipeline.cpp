#include "tsf/cli/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tsf/cli/plot.hpp"
#include "tsf/dataprep/csv.hpp"
#include "tsf/dataprep/windows.hpp"
#include "tsf/evalkit/evaluate.hpp"
#include "tsf/numkit/errors.hpp"
#include "tsf/training/train.hpp"

namespace tsf::cli {

namespace fs = std::filesystem;

namespace {

std::string pair_name(const std::string& model, std::size_t horizon) {
    return model + "_f" + std::to_string(horizon);
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        ensure_directory(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            return cells;
        }
        start = comma + 1;
    }
}

double to_double(std::string_view cell, const fs::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const std::string s(cell);
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ParseError(path.string() + ": line " + std::to_string(line) + ": '" + std::string(cell) +
                     "' is not a number");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
void run_stage(const char* name, StageTimings& timings, F&& body) {
    const auto start = Clock::now();
    try {
        body();
    } catch (const Error& e) {
        rethrow_with_context(e, std::string(name) + " stage: ");
    }
    timings[name] = seconds_since(start);
}

} // namespace

fs::path OutputLayout::dataset() const { return root_ / "dataset.csv"; }

fs::path OutputLayout::checkpoint(const std::string& model, std::size_t horizon) const {
    return root_ / "checkpoints" / (pair_name(model, horizon) + ".tsfc");
}

fs::path OutputLayout::losses(const std::string& model, std::size_t horizon) const {
    return root_ / "losses" / (pair_name(model, horizon) + ".csv");
}

fs::path OutputLayout::forecasts(const std::string& model, std::size_t horizon) const {
    return root_ / "forecasts" / (pair_name(model, horizon) + ".csv");
}

fs::path OutputLayout::report_csv() const { return root_ / "report.csv"; }

fs::path OutputLayout::report_table() const { return root_ / "report.txt"; }

fs::path OutputLayout::plot_svg(const std::string& series, const std::string& model,
                                std::size_t horizon) const {
    return root_ / "plots" / (series + "_" + pair_name(model, horizon) + ".svg");
}

fs::path OutputLayout::plot_csv(const std::string& series, const std::string& model,
                                std::size_t horizon) const {
    return root_ / "plots" / (series + "_" + pair_name(model, horizon) + ".csv");
}

fs::path OutputLayout::manifest() const { return root_ / "manifest.json"; }

void Console::info(const std::string& line) const {
    if (!quiet && out != nullptr) {
        *out << line << '\n';
    }
}

std::vector<Series> load_dataset(const ExperimentConfig& config) {
    std::vector<Series> series;
    switch (config.dataset.source) {
    case DataSource::activities: {
        Rng rng(config.seed);
        series = gen_activities(rng, config.dataset.activities);
        break;
    }
    case DataSource::random_walk: {
        Rng rng(config.seed);
        series = gen_random_walk(rng, config.dataset.random_walk);
        break;
    }
    case DataSource::csv:
        series = load_csv(config.dataset.csv_path, CsvLayout{config.dataset.date_column});
        break;
    }
    if (config.train_series_index >= series.size()) {
        throw ArgumentError("train_series_index " + std::to_string(config.train_series_index) +
                            " is out of range for a dataset of " + std::to_string(series.size()) +
                            " series");
    }
    return series;
}

Series prepare_series(const Series& raw, const ExperimentConfig& config) {
    NormalizeOptions options;
    options.degenerate_to_half = true;
    if (config.fit_bounds_on_train) {
        validate(config.partition(1), raw.values.size());
        options.fit_length = raw.values.size() - config.test_len;
    }
    try {
        return normalize(raw, options);
    } catch (const Error& e) {
        rethrow_with_context(e, "series '" + raw.name + "': ");
    }
}

void stage_train(const ExperimentConfig& config, const std::vector<Series>& raw,
                 const Console& console) {
    validate(config);
    if (config.train_series_index >= raw.size()) {
        throw ArgumentError("train_series_index " + std::to_string(config.train_series_index) +
                            " is out of range for a dataset of " + std::to_string(raw.size()) +
                            " series");
    }
    const OutputLayout layout(config.output_dir);
    const Series& source = raw[config.train_series_index];
    const Series normalized = prepare_series(source, config);
    const TrainConfig train_config = config.train_config();
    for (const std::string& model : config.models) {
        if (model == "baseline") {
            continue;
        }
        const CellKind kind = parse_cell_kind(model);
        for (std::size_t h : config.horizons) {
            const WindowedDataset data = make_windows(normalized, config.partition(h), Region::train);
            const std::size_t report_every = std::max<std::size_t>(1, train_config.epochs / 10);
            console.info("training " + model + " f=" + std::to_string(h) + " on '" + source.name +
                         "' (" + std::to_string(data.size()) + " windows)");
            auto progress = [&](std::size_t epoch, double loss) {
                if (epoch % report_every == 0 || epoch == train_config.epochs) {
                    console.info("  epoch " + std::to_string(epoch) + "/" +
                                 std::to_string(train_config.epochs) + " loss " +
                                 format_double(loss));
                }
            };
            const TrainResult result = [&] {
                try {
                    return train(kind, data, train_config, progress);
                } catch (const Error& e) {
                    rethrow_with_context(e, model + " f=" + std::to_string(h) + ": ");
                }
            }();
            ensure_directory(layout.checkpoint(model, h).parent_path());
            save_checkpoint(result.checkpoint, layout.checkpoint(model, h));
            std::string losses = "epoch,loss\n";
            for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
                losses += std::to_string(e + 1) + "," + format_double(result.loss_history[e]) + "\n";
            }
            write_text(layout.losses(model, h), losses);
        }
    }
}

void write_forecasts(const fs::path& path,
                     const std::vector<std::pair<std::string, ForecastSet>>& sets) {
    std::string s = "series,origin,step,predicted,actual,last_observed,raw_min,raw_max\n";
    for (const auto& [name, set] : sets) {
        for (std::size_t i = 0; i < set.size(); ++i) {
            for (std::size_t k = 0; k < set.horizon(); ++k) {
                s += name + "," + std::to_string(set.origins[i]) + "," + std::to_string(k + 1) +
                     "," + format_double(set.predicted(i, k)) + "," +
                     format_double(set.actual(i, k)) + "," + format_double(set.last_observed[i]) +
                     "," + format_double(set.bounds.min) + "," + format_double(set.bounds.max) +
                     "\n";
            }
        }
    }
    write_text(path, s);
}

std::vector<std::pair<std::string, ForecastSet>> read_forecasts(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open forecasts '" + path.string() + "' (run evaluate first)");
    }
    struct Row {
        std::size_t origin;
        std::size_t step;
        double predicted;
        double actual;
        double last;
        Bounds bounds;
    };
    std::vector<std::pair<std::string, std::vector<Row>>> grouped;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) {
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 8) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected 8 columns");
        }
        const std::string name(cells[0]);
        if (grouped.empty() || grouped.back().first != name) {
            grouped.emplace_back(name, std::vector<Row>{});
        }
        Row r;
        r.origin = static_cast<std::size_t>(to_double(cells[1], path, line_no));
        r.step = static_cast<std::size_t>(to_double(cells[2], path, line_no));
        r.predicted = to_double(cells[3], path, line_no);
        r.actual = to_double(cells[4], path, line_no);
        r.last = to_double(cells[5], path, line_no);
        r.bounds = Bounds{to_double(cells[6], path, line_no), to_double(cells[7], path, line_no)};
        grouped.back().second.push_back(r);
    }
    std::vector<std::pair<std::string, ForecastSet>> out;
    for (auto& [name, rows] : grouped) {
        std::size_t horizon = 0;
        for (const Row& r : rows) {
            horizon = std::max(horizon, r.step);
        }
        if (horizon == 0 || rows.size() % horizon != 0) {
            throw ParseError(path.string() + ": series '" + name + "' has incomplete forecasts");
        }
        const std::size_t n = rows.size() / horizon;
        ForecastSet set;
        set.predicted = Matrix(n, horizon);
        set.actual = Matrix(n, horizon);
        set.bounds = rows.front().bounds;
        for (std::size_t i = 0; i < n; ++i) {
            set.origins.push_back(rows[i * horizon].origin);
            set.last_observed.push_back(rows[i * horizon].last);
            for (std::size_t k = 0; k < horizon; ++k) {
                const Row& r = rows[i * horizon + k];
                if (r.step != k + 1 || r.origin != set.origins.back()) {
                    throw ParseError(path.string() + ": series '" + name +
                                     "' rows are out of order");
                }
                set.predicted(i, k) = r.predicted;
                set.actual(i, k) = r.actual;
            }
        }
        out.emplace_back(name, std::move(set));
    }
    if (out.empty()) {
        throw ParseError(path.string() + ": no forecasts");
    }
    return out;
}

std::vector<EvalReport> stage_evaluate(const ExperimentConfig& config,
                                       const std::vector<Series>& raw, const Console& console) {
    validate(config);
    const OutputLayout layout(config.output_dir);
    std::vector<Series> normalized;
    normalized.reserve(raw.size());
    for (const Series& s : raw) {
        normalized.push_back(prepare_series(s, config));
    }
    std::vector<EvalReport> reports;
    for (const std::string& model : config.models) {
        for (std::size_t h : config.horizons) {
            const std::string tag = model + " f=" + std::to_string(h);
            std::optional<Checkpoint> checkpoint;
            if (model != "baseline") {
                const fs::path path = layout.checkpoint(model, h);
                if (!fs::exists(path)) {
                    throw IoError("missing checkpoint for " + tag + ": '" + path.string() +
                                  "' (run train first)");
                }
                checkpoint = load_checkpoint(path);
                if (checkpoint->model.kind() != parse_cell_kind(model)) {
                    throw ArgumentError("checkpoint '" + path.string() + "' holds a " +
                                        to_string(checkpoint->model.kind()) + " model, expected " +
                                        model);
                }
            }
            const Forecaster forecaster =
                checkpoint ? Forecaster::from_checkpoint(*checkpoint) : Forecaster::baseline();
            std::vector<SeriesScore> rows;
            std::vector<std::pair<std::string, ForecastSet>> sets;
            for (const Series& s : normalized) {
                Evaluation ev;
                try {
                    ev = evaluate(forecaster, s, config.partition(h));
                } catch (const Error& e) {
                    rethrow_with_context(e, tag + " on '" + s.name + "': ");
                }
                if (config.report_units == ReportUnits::raw) {
                    const ForecastSet raw_set = denormalized(ev.forecasts);
                    rows.push_back({s.name, rmse(raw_set), directional_accuracy(raw_set)});
                } else {
                    rows.push_back({s.name, ev.rmse, ev.directional_accuracy});
                }
                sets.emplace_back(s.name, std::move(ev.forecasts));
            }
            write_forecasts(layout.forecasts(model, h), sets);
            reports.push_back(aggregate(model, h, std::move(rows), to_string(config.report_units)));
            const EvalReport& r = reports.back();
            console.info("evaluated " + tag + ": mean RMSE " + format_double(r.mean_rmse) +
                         ", mean DA " + format_double(r.mean_da));
        }
    }
    std::ostringstream csv;
    write_report_csv(csv, reports);
    write_text(layout.report_csv(), csv.str());
    write_text(layout.report_table(), format_report_table(reports));
    return reports;
}

void stage_plot(const ExperimentConfig& config, const Console& console) {
    validate(config);
    const OutputLayout layout(config.output_dir);
    std::size_t count = 0;
    for (const std::string& model : config.models) {
        for (std::size_t h : config.horizons) {
            const auto sets = read_forecasts(layout.forecasts(model, h));
            for (const auto& [name, set] : sets) {
                if (set.horizon() != h) {
                    throw ArgumentError("forecasts for " + model + " f=" + std::to_string(h) +
                                        " hold horizon " + std::to_string(set.horizon()));
                }
                const ForecastSet raw = denormalized(set);
                const auto points = select_plot_points(raw, config.plot_points, config.plot_stride);
                const Chart chart =
                    build_chart(points, h, name + ": " + model + ", " + std::to_string(h) + "-step ahead");
                write_text(layout.plot_svg(name, model, h), render_svg(chart));
                write_text(layout.plot_csv(name, model, h), plot_points_csv(points));
                ++count;
            }
        }
    }
    console.info("wrote " + std::to_string(count) + " plots to '" +
                 (layout.root() / "plots").string() + "'");
}

void write_manifest(const ExperimentConfig& config, const StageTimings& timings) {
    using nlohmann::json;
    const OutputLayout layout(config.output_dir);
    auto existing = [](const fs::path& p) { return fs::exists(p); };
    json m;
    m["toolkit_version"] = toolkit_version;
    m["seed"] = config.seed;
    m["config"] = json::parse(to_json(config));
    if (config.dataset.source == DataSource::csv) {
        m["dataset"] = config.dataset.csv_path;
    } else if (existing(layout.dataset())) {
        m["dataset"] = layout.dataset().generic_string();
    } else {
        m["dataset"] = nullptr;
    }
    json checkpoints = json::object();
    json losses = json::object();
    json forecasts = json::object();
    json plots = json::array();
    for (const std::string& model : config.models) {
        for (std::size_t h : config.horizons) {
            const std::string key = pair_name(model, h);
            if (existing(layout.checkpoint(model, h))) {
                checkpoints[key] = layout.checkpoint(model, h).generic_string();
            }
            if (existing(layout.losses(model, h))) {
                losses[key] = layout.losses(model, h).generic_string();
            }
            if (!existing(layout.forecasts(model, h))) {
                continue;
            }
            forecasts[key] = layout.forecasts(model, h).generic_string();
            for (const auto& [name, set] : read_forecasts(layout.forecasts(model, h))) {
                for (const fs::path& p : {layout.plot_svg(name, model, h), layout.plot_csv(name, model, h)}) {
                    if (existing(p)) {
                        plots.push_back(p.generic_string());
                    }
                }
            }
        }
    }
    m["checkpoints"] = checkpoints;
    m["loss_histories"] = losses;
    m["forecasts"] = forecasts;
    json reports = json::object();
    if (existing(layout.report_csv())) {
        reports["csv"] = layout.report_csv().generic_string();
    }
    if (existing(layout.report_table())) {
        reports["table"] = layout.report_table().generic_string();
    }
    m["reports"] = reports;
    m["plots"] = plots;
    m["timings_seconds"] = timings;
    write_text(layout.manifest(), m.dump(2) + "\n");
}

void run_pipeline(const ExperimentConfig& config, const Console& console) {
    validate(config);
    const auto start = Clock::now();
    const OutputLayout layout(config.output_dir);
    StageTimings timings;
    std::vector<Series> raw;
    run_stage("data", timings, [&] {
        raw = load_dataset(config);
        if (config.dataset.source != DataSource::csv) {
            ensure_directory(layout.root());
            write_csv(layout.dataset(), raw);
        }
        console.info("dataset: " + std::to_string(raw.size()) + " series of " +
                     std::to_string(raw.front().values.size()) + " samples");
    });
    run_stage("train", timings, [&] { stage_train(config, raw, console); });
    run_stage("evaluate", timings, [&] {
        const auto reports = stage_evaluate(config, raw, console);
        console.info(format_report_table(reports));
    });
    run_stage("plot", timings, [&] { stage_plot(config, console); });
    timings["total"] = seconds_since(start);
    write_manifest(config, timings);
    console.info("manifest: '" + layout.manifest().string() + "'");
}

} // namespace tsf::cli
