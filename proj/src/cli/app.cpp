#include "tsf/cli/app.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "tsf/cli/config.hpp"
#include "tsf/cli/pipeline.hpp"
#include "tsf/dataprep/csv.hpp"
#include "tsf/numkit/errors.hpp"

namespace tsf::cli {

namespace {

// Command-line overrides applied on top of the config file, in registration order.
class Overrides {
public:
    template <typename T, typename Setter>
    CLI::Option* add(CLI::App& app, const std::string& flag, const std::string& help, Setter set) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app.add_option(flag, *value, help);
        appliers_.push_back([opt, value, set](ExperimentConfig& c) {
            if (opt->count() > 0) {
                set(c, *value);
            }
        });
        return opt;
    }

    template <typename Setter>
    CLI::Option* add_flag(CLI::App& app, const std::string& flag, const std::string& help,
                          Setter set) {
        auto value = std::make_shared<bool>(false);
        CLI::Option* opt = app.add_flag(flag, *value, help);
        appliers_.push_back([opt, value, set](ExperimentConfig& c) {
            if (opt->count() > 0) {
                set(c, *value);
            }
        });
        return opt;
    }

    void apply(ExperimentConfig& c) const {
        for (const auto& f : appliers_) {
            f(c);
        }
    }

private:
    std::vector<std::function<void(ExperimentConfig&)>> appliers_;
};

void register_overrides(CLI::App& app, Overrides& o) {
    const std::string data = "Dataset";
    const std::string model = "Model and training";
    const std::string output = "Output";
    o.add<std::string>(app, "--source", "Dataset source: activities, random-walk or csv",
                       [](ExperimentConfig& c, const std::string& v) {
                           c.dataset.source = parse_data_source(v);
                       })
        ->group(data);
    o.add<std::string>(app, "--csv", "Load series from this wide CSV file",
                       [](ExperimentConfig& c, const std::string& v) {
                           c.dataset.source = DataSource::csv;
                           c.dataset.csv_path = v;
                       })
        ->group(data);
    o.add_flag(app, "--date-column", "The CSV's first column holds dates and is skipped",
               [](ExperimentConfig& c, bool v) { c.dataset.date_column = v; })
        ->group(data);
    o.add<std::size_t>(app, "--length", "Samples per generated series",
                       [](ExperimentConfig& c, std::size_t v) {
                           if (c.dataset.source == DataSource::random_walk) {
                               c.dataset.random_walk.length = v;
                           } else {
                               c.dataset.activities.length = v;
                           }
                       })
        ->group(data);
    o.add<std::size_t>(app, "--series", "Number of generated series",
                       [](ExperimentConfig& c, std::size_t v) {
                           if (c.dataset.source == DataSource::random_walk) {
                               c.dataset.random_walk.n_series = v;
                           } else {
                               c.dataset.activities.n_series = v;
                           }
                       })
        ->group(data);
    o.add<std::size_t>(app, "--samples-per-day", "Activities: samples per day",
                       [](ExperimentConfig& c, std::size_t v) {
                           c.dataset.activities.samples_per_day = v;
                       })
        ->group(data);
    o.add<double>(app, "--high-level", "Activities: level on high days",
                  [](ExperimentConfig& c, double v) { c.dataset.activities.high_level = v; })
        ->group(data);
    o.add<double>(app, "--low-level", "Activities: level on low days",
                  [](ExperimentConfig& c, double v) { c.dataset.activities.low_level = v; })
        ->group(data);
    o.add<double>(app, "--noise-sd", "Activities: standard deviation of additive noise",
                  [](ExperimentConfig& c, double v) { c.dataset.activities.noise_sd = v; })
        ->group(data);
    o.add<double>(app, "--jitter", "Activities: relative per-day amplitude jitter",
                  [](ExperimentConfig& c, double v) { c.dataset.activities.amplitude_jitter = v; })
        ->group(data);
    o.add<double>(app, "--start-value", "Random walk: starting level",
                  [](ExperimentConfig& c, double v) { c.dataset.random_walk.start = v; })
        ->group(data);
    o.add<double>(app, "--step-sd", "Random walk: standard deviation of log steps",
                  [](ExperimentConfig& c, double v) { c.dataset.random_walk.step_sd = v; })
        ->group(data);

    o.add<std::size_t>(app, "--window", "Input window length",
                       [](ExperimentConfig& c, std::size_t v) { c.window = v; })
        ->group(model);
    o.add<std::vector<std::size_t>>(app, "--horizons", "Forecast horizons, e.g. 1,20",
                                    [](ExperimentConfig& c, const std::vector<std::size_t>& v) {
                                        c.horizons = v;
                                    })
        ->delimiter(',')
        ->group(model);
    o.add<std::size_t>(app, "--test-len", "Samples held out at the end of each series",
                       [](ExperimentConfig& c, std::size_t v) { c.test_len = v; })
        ->group(model);
    o.add<std::vector<std::string>>(app, "--models", "Models to run, e.g. lstm,gru,baseline",
                                    [](ExperimentConfig& c, const std::vector<std::string>& v) {
                                        c.models = v;
                                    })
        ->delimiter(',')
        ->group(model);
    o.add<std::size_t>(app, "--train-series-index", "Series used for training",
                       [](ExperimentConfig& c, std::size_t v) { c.train_series_index = v; })
        ->group(model);
    o.add<std::size_t>(app, "--epochs", "Training epochs",
                       [](ExperimentConfig& c, std::size_t v) { c.train.epochs = v; })
        ->group(model);
    o.add<std::size_t>(app, "--batch-size", "Mini-batch size",
                       [](ExperimentConfig& c, std::size_t v) { c.train.batch_size = v; })
        ->group(model);
    o.add<std::size_t>(app, "--units", "Hidden units of the recurrent layer",
                       [](ExperimentConfig& c, std::size_t v) { c.train.units = v; })
        ->group(model);
    o.add_flag(app, "--shuffle,!--no-shuffle", "Reshuffle training windows every epoch",
               [](ExperimentConfig& c, bool v) { c.train.shuffle = v; })
        ->group(model);
    o.add<double>(app, "--learning-rate", "Adam step size",
                  [](ExperimentConfig& c, double v) { c.train.adam.learning_rate = v; })
        ->group(model);
    o.add<double>(app, "--beta1", "Adam first-moment decay",
                  [](ExperimentConfig& c, double v) { c.train.adam.beta1 = v; })
        ->group(model);
    o.add<double>(app, "--beta2", "Adam second-moment decay",
                  [](ExperimentConfig& c, double v) { c.train.adam.beta2 = v; })
        ->group(model);
    o.add<double>(app, "--epsilon", "Adam denominator offset",
                  [](ExperimentConfig& c, double v) { c.train.adam.epsilon = v; })
        ->group(model);
    o.add<double>(app, "--clip-norm", "Global gradient-norm limit (0 disables)",
                  [](ExperimentConfig& c, double v) { c.train.clip_norm = v; })
        ->group(model);
    o.add_flag(app, "--fit-bounds-on-train", "Fit normalization bounds on the training region only",
               [](ExperimentConfig& c, bool v) { c.fit_bounds_on_train = v; })
        ->group(model);

    o.add<std::string>(app, "--report-units", "Score in normalized or raw units",
                       [](ExperimentConfig& c, const std::string& v) {
                           c.report_units = parse_report_units(v);
                       })
        ->group(output);
    o.add<std::size_t>(app, "--plot-points", "Test samples shown per plot",
                       [](ExperimentConfig& c, std::size_t v) { c.plot_points = v; })
        ->group(output);
    o.add<std::size_t>(app, "--plot-stride", "Origin spacing of multi-step forecast fans",
                       [](ExperimentConfig& c, std::size_t v) { c.plot_stride = v; })
        ->group(output);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Train and evaluate recurrent time-series forecasters", "tsforecast"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("tsforecast ") + toolkit_version);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_path;
    bool quiet = false;
    std::string save_config_path;
    app.add_option("--config", config_path, "JSON experiment config")->group("Global");
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed for data and training")->group("Global");
    CLI::Option* out_opt =
        app.add_option("--out", out_path, "Output directory (generate: output CSV file)")
            ->group("Global");
    app.add_flag("--quiet,-q", quiet, "Suppress progress output")->group("Global");
    app.add_option("--save-config", save_config_path, "Also write the effective config here")
        ->group("Global");
    Overrides overrides;
    register_overrides(app, overrides);

    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic dataset as wide CSV");
    std::string generate_kind;
    generate->add_option("kind", generate_kind, "activities or random-walk");
    CLI::App* train = app.add_subcommand("train", "Train every model at every horizon");
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score all series and write the report");
    CLI::App* plot = app.add_subcommand("plot", "Render SVG and CSV plots from forecasts");
    CLI::App* run_all = app.add_subcommand("run", "Data, train, evaluate and plot end to end");

    std::vector<const char*> argv{"tsforecast"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed_opt->count() > 0) {
            config.seed = seed;
        }
        if (out_opt->count() > 0 && !generate->parsed()) {
            config.output_dir = out_path;
        }
        if (generate->parsed() && !generate_kind.empty()) {
            config.dataset.source = parse_data_source(generate_kind);
        }
        overrides.apply(config);
        config.train.seed = config.seed;
        validate(config);
        if (!save_config_path.empty()) {
            save_config(config, save_config_path);
        }
        const Console console{&out, quiet};

        if (generate->parsed()) {
            if (config.dataset.source == DataSource::csv) {
                throw ArgumentError("generate needs a generator: activities or random-walk");
            }
            const auto series = load_dataset(config);
            const std::filesystem::path target =
                out_opt->count() > 0 ? std::filesystem::path(out_path)
                                     : OutputLayout(config.output_dir).dataset();
            if (target.has_parent_path()) {
                std::error_code ec;
                std::filesystem::create_directories(target.parent_path(), ec);
            }
            write_csv(target, series);
            console.info("wrote " + std::to_string(series.size()) + " series x " +
                         std::to_string(series.front().values.size()) + " samples to '" +
                         target.string() + "'");
            return exit_ok;
        }

        using Clock = std::chrono::steady_clock;
        const auto start = Clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
        if (train->parsed()) {
            stage_train(config, load_dataset(config), console);
            write_manifest(config, {{"train", elapsed()}});
        } else if (evaluate->parsed()) {
            const auto reports = stage_evaluate(config, load_dataset(config), console);
            console.info(format_report_table(reports));
            write_manifest(config, {{"evaluate", elapsed()}});
        } else if (plot->parsed()) {
            stage_plot(config, console);
            write_manifest(config, {{"plot", elapsed()}});
        } else if (run_all->parsed()) {
            run_pipeline(config, console);
        }
        return exit_ok;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace tsf::cli
