#include "tsf/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsf/cells/cells.hpp"
#include "tsf/numkit/errors.hpp"

namespace tsf::cli {

using nlohmann::json;

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) {
            throw ParseError("config: '" + name() + "' must be an object");
        }
    }

    void size(const char* key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) {
                fail(key, "a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }
    void u64(const char* key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) {
                fail(key, "a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }
    void real(const char* key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) {
                fail(key, "a number");
            }
            out = v->get<double>();
        }
    }
    void flag(const char* key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) {
                fail(key, "true or false");
            }
            out = v->get<bool>();
        }
    }
    void text(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) {
                fail(key, "a string");
            }
            out = v->get<std::string>();
        }
    }
    void sizes(const char* key, std::vector<std::size_t>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() ||
                !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number_unsigned(); })) {
                fail(key, "an array of non-negative integers");
            }
            out = v->get<std::vector<std::size_t>>();
        }
    }
    void texts(const char* key, std::vector<std::string>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() ||
                !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_string(); })) {
                fail(key, "an array of strings");
            }
            out = v->get<std::vector<std::string>>();
        }
    }
    const json* child(const char* key) { return find(key); }
    std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    /// Throws on any key that was never looked up.
    void finish() const {
        for (const auto& [key, value] : object_.items()) {
            if (!seen_.count(key)) {
                throw ParseError("config: unknown key '" + child_path(key.c_str()) + "'");
            }
        }
    }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        const auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }
    std::string name() const { return path_.empty() ? "<root>" : path_; }
    [[noreturn]] void fail(const char* key, const char* expected) const {
        throw ParseError("config: '" + child_path(key) + "' must be " + expected);
    }

    const json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

} // namespace

const char* to_string(DataSource source) {
    switch (source) {
    case DataSource::activities: return "activities";
    case DataSource::random_walk: return "random-walk";
    case DataSource::csv: return "csv";
    }
    return "?";
}

DataSource parse_data_source(std::string_view text) {
    if (text == "activities") {
        return DataSource::activities;
    }
    if (text == "random-walk") {
        return DataSource::random_walk;
    }
    if (text == "csv") {
        return DataSource::csv;
    }
    throw ArgumentError("unknown dataset source '" + std::string(text) +
                        "' (expected activities, random-walk or csv)");
}

const char* to_string(ReportUnits units) {
    return units == ReportUnits::normalized ? "normalized" : "raw";
}

ReportUnits parse_report_units(std::string_view text) {
    if (text == "normalized") {
        return ReportUnits::normalized;
    }
    if (text == "raw") {
        return ReportUnits::raw;
    }
    throw ArgumentError("unknown report units '" + std::string(text) +
                        "' (expected normalized or raw)");
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig t = train;
    t.seed = seed;
    return t;
}

PartitionSpec ExperimentConfig::partition(std::size_t horizon) const {
    return PartitionSpec{window, horizon, test_len};
}

void validate(const ExperimentConfig& config) {
    if (config.horizons.empty()) {
        throw ArgumentError("at least one horizon is required");
    }
    for (std::size_t h : config.horizons) {
        if (h == 0) {
            throw ArgumentError("every horizon must be >= 1");
        }
    }
    if (std::set<std::size_t>(config.horizons.begin(), config.horizons.end()).size() !=
        config.horizons.size()) {
        throw ArgumentError("horizons must not repeat");
    }
    if (config.models.empty()) {
        throw ArgumentError("at least one model is required");
    }
    std::set<std::string> seen;
    for (const std::string& m : config.models) {
        if (m != "baseline") {
            parse_cell_kind(m);
        }
        if (!seen.insert(m).second) {
            throw ArgumentError("model '" + m + "' is listed twice");
        }
    }
    if (config.window == 0) {
        throw ArgumentError("window must be >= 1");
    }
    if (config.plot_points == 0 || config.plot_stride == 0) {
        throw ArgumentError("plot_points and plot_stride must be >= 1");
    }
    if (config.output_dir.empty()) {
        throw ArgumentError("output_dir must not be empty");
    }
    if (config.dataset.source == DataSource::csv && config.dataset.csv_path.empty()) {
        throw ArgumentError("dataset source csv needs csv_path");
    }
    validate(config.train_config());
}

std::string to_json(const ExperimentConfig& c) {
    const auto& a = c.dataset.activities;
    const auto& r = c.dataset.random_walk;
    const auto& t = c.train;
    json j;
    j["dataset"] = {
        {"source", to_string(c.dataset.source)},
        {"csv_path", c.dataset.csv_path},
        {"date_column", c.dataset.date_column},
        {"activities",
         {{"n_series", a.n_series},
          {"length", a.length},
          {"samples_per_day", a.samples_per_day},
          {"high_level", a.high_level},
          {"low_level", a.low_level},
          {"noise_sd", a.noise_sd},
          {"amplitude_jitter", a.amplitude_jitter}}},
        {"random_walk",
         {{"n_series", r.n_series}, {"length", r.length}, {"start", r.start}, {"step_sd", r.step_sd}}},
    };
    j["seed"] = c.seed;
    j["window"] = c.window;
    j["horizons"] = c.horizons;
    j["test_len"] = c.test_len;
    j["models"] = c.models;
    j["train_series_index"] = c.train_series_index;
    j["train"] = {
        {"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"units", t.units},
        {"shuffle", t.shuffle},
        {"learning_rate", t.adam.learning_rate},
        {"beta1", t.adam.beta1},
        {"beta2", t.adam.beta2},
        {"epsilon", t.adam.epsilon},
        {"clip_norm", t.clip_norm},
    };
    j["fit_bounds_on_train"] = c.fit_bounds_on_train;
    j["output_dir"] = c.output_dir;
    j["report_units"] = to_string(c.report_units);
    j["plot_points"] = c.plot_points;
    j["plot_stride"] = c.plot_stride;
    return j.dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    ObjectReader top(root, "");
    if (const json* d = top.child("dataset")) {
        ObjectReader ds(*d, "dataset");
        std::string source = to_string(c.dataset.source);
        ds.text("source", source);
        try {
            c.dataset.source = parse_data_source(source);
        } catch (const ArgumentError& e) {
            throw ParseError(std::string("config: dataset.source: ") + e.what());
        }
        ds.text("csv_path", c.dataset.csv_path);
        ds.flag("date_column", c.dataset.date_column);
        if (const json* a = ds.child("activities")) {
            auto& p = c.dataset.activities;
            ObjectReader ar(*a, "dataset.activities");
            ar.size("n_series", p.n_series);
            ar.size("length", p.length);
            ar.size("samples_per_day", p.samples_per_day);
            ar.real("high_level", p.high_level);
            ar.real("low_level", p.low_level);
            ar.real("noise_sd", p.noise_sd);
            ar.real("amplitude_jitter", p.amplitude_jitter);
            ar.finish();
        }
        if (const json* w = ds.child("random_walk")) {
            auto& p = c.dataset.random_walk;
            ObjectReader wr(*w, "dataset.random_walk");
            wr.size("n_series", p.n_series);
            wr.size("length", p.length);
            wr.real("start", p.start);
            wr.real("step_sd", p.step_sd);
            wr.finish();
        }
        ds.finish();
    }
    top.u64("seed", c.seed);
    top.size("window", c.window);
    top.sizes("horizons", c.horizons);
    top.size("test_len", c.test_len);
    top.texts("models", c.models);
    top.size("train_series_index", c.train_series_index);
    if (const json* t = top.child("train")) {
        ObjectReader tr(*t, "train");
        tr.size("epochs", c.train.epochs);
        tr.size("batch_size", c.train.batch_size);
        tr.size("units", c.train.units);
        tr.flag("shuffle", c.train.shuffle);
        tr.real("learning_rate", c.train.adam.learning_rate);
        tr.real("beta1", c.train.adam.beta1);
        tr.real("beta2", c.train.adam.beta2);
        tr.real("epsilon", c.train.adam.epsilon);
        tr.real("clip_norm", c.train.clip_norm);
        tr.finish();
    }
    top.flag("fit_bounds_on_train", c.fit_bounds_on_train);
    top.text("output_dir", c.output_dir);
    std::string units = to_string(c.report_units);
    top.text("report_units", units);
    try {
        c.report_units = parse_report_units(units);
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("config: report_units: ") + e.what());
    }
    top.size("plot_points", c.plot_points);
    top.size("plot_stride", c.plot_stride);
    top.finish();
    c.train.seed = c.seed;
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const Error& e) {
        rethrow_with_context(e, path.string() + ": ");
    }
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    out << to_json(config);
    if (!out) {
        throw IoError("cannot write config '" + path.string() + "'");
    }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    const auto& da = a.dataset;
    const auto& db = b.dataset;
    const auto& aa = da.activities;
    const auto& ab = db.activities;
    const auto& ra = da.random_walk;
    const auto& rb = db.random_walk;
    const auto& ta = a.train;
    const auto& tb = b.train;
    return da.source == db.source && da.csv_path == db.csv_path &&
           da.date_column == db.date_column && aa.n_series == ab.n_series &&
           aa.length == ab.length && aa.samples_per_day == ab.samples_per_day &&
           aa.high_level == ab.high_level && aa.low_level == ab.low_level &&
           aa.noise_sd == ab.noise_sd && aa.amplitude_jitter == ab.amplitude_jitter &&
           ra.n_series == rb.n_series && ra.length == rb.length && ra.start == rb.start &&
           ra.step_sd == rb.step_sd && a.seed == b.seed && a.window == b.window &&
           a.horizons == b.horizons && a.test_len == b.test_len && a.models == b.models &&
           a.train_series_index == b.train_series_index && ta.epochs == tb.epochs &&
           ta.batch_size == tb.batch_size && ta.units == tb.units && ta.shuffle == tb.shuffle &&
           ta.adam.learning_rate == tb.adam.learning_rate && ta.adam.beta1 == tb.adam.beta1 &&
           ta.adam.beta2 == tb.adam.beta2 && ta.adam.epsilon == tb.adam.epsilon &&
           ta.clip_norm == tb.clip_norm && a.fit_bounds_on_train == b.fit_bounds_on_train &&
           a.output_dir == b.output_dir && a.report_units == b.report_units &&
           a.plot_points == b.plot_points && a.plot_stride == b.plot_stride;
}

} // namespace tsf::cli
