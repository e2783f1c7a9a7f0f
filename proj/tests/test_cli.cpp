#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsf/cli/app.hpp"
#include "tsf/cli/config.hpp"
#include "tsf/cli/pipeline.hpp"
#include "tsf/cli/plot.hpp"
#include "tsf/dataprep/csv.hpp"
#include "tsf/numkit/errors.hpp"

namespace fs = std::filesystem;
using namespace tsf;
using namespace tsf::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / "cli_work" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

// A scaled-down experiment that finishes in well under a second per stage.
std::vector<std::string> small(const fs::path& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"--quiet", "--out", out.string(), "--length", "400", "--series", "3",
                                  "--window", "20", "--horizons", "1,3", "--test-len", "40",
                                  "--epochs", "3", "--units", "4"};
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

std::vector<std::string> with(std::string sub, std::vector<std::string> args) {
    args.push_back(std::move(sub));
    return args;
}

} // namespace

TEST_CASE("config survives a json round trip") {
    ExperimentConfig c;
    c.seed = 9;
    c.horizons = {2, 5};
    c.models = {"gru"};
    c.dataset.source = DataSource::random_walk;
    c.dataset.random_walk.step_sd = 0.03;
    c.train.epochs = 11;
    c.train.clip_norm = 1.5;
    c.report_units = ReportUnits::raw;
    CHECK(parse_config(to_json(c)) == c);
    const fs::path p = fresh_dir("config") / "c.json";
    save_config(c, p);
    CHECK(load_config(p) == c);
}

TEST_CASE("config parsing is strict") {
    CHECK_THROWS_AS(parse_config(R"({"windoww": 5})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"window": "five"})"), ParseError);
    CHECK_THROWS_AS(parse_config("{"), ParseError);
    CHECK(parse_config(R"({"window": 5})").window == 5);
    ExperimentConfig bad;
    bad.horizons = {1, 1};
    CHECK_THROWS_AS(validate(bad), ArgumentError);
    bad = ExperimentConfig{};
    bad.models = {"transformer"};
    CHECK_THROWS_AS(validate(bad), ArgumentError);
}

TEST_CASE("generate is byte-identical for a fixed seed") {
    const fs::path dir = fresh_dir("generate");
    const auto a = invoke({"--quiet", "--seed", "4", "--out", (dir / "a.csv").string(), "generate"});
    const auto b = invoke({"--quiet", "--seed", "4", "--out", (dir / "b.csv").string(), "generate"});
    const auto c = invoke({"--quiet", "--seed", "5", "--out", (dir / "c.csv").string(), "generate"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(c.code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
    const auto series = load_csv(dir / "a.csv");
    CHECK(series.size() == 10);
    CHECK(series[0].values.size() == 3584);
}

TEST_CASE("generate random-walk writes ten series of 3032 samples") {
    const fs::path dir = fresh_dir("walk");
    REQUIRE(invoke({"--quiet", "--out", (dir / "w.csv").string(), "generate", "random-walk"}).code == 0);
    const auto series = load_csv(dir / "w.csv");
    REQUIRE(series.size() == 10);
    for (const auto& s : series) {
        CHECK(s.values.size() == 3032);
    }
}

TEST_CASE("generate into an unwritable location fails with usage code") {
    const fs::path dir = fresh_dir("blocked");
    std::ofstream(dir / "file") << "x";
    const auto r = invoke({"--quiet", "--out", (dir / "file" / "d.csv").string(), "generate"});
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("train writes one checkpoint and loss history per pair") {
    const fs::path dir = fresh_dir("train");
    REQUIRE(invoke(with("train", small(dir))).code == 0);
    const OutputLayout layout(dir);
    for (const char* m : {"lstm", "gru"}) {
        for (std::size_t h : {1u, 3u}) {
            CHECK(fs::exists(layout.checkpoint(m, h)));
            const auto rows = lines_of(layout.losses(m, h));
            REQUIRE(rows.size() == 4);
            CHECK(rows[0] == "epoch,loss");
        }
    }
    CHECK_FALSE(fs::exists(layout.checkpoint("baseline", 1)));
    CHECK(fs::exists(layout.manifest()));
}

TEST_CASE("an out-of-range training series index is a usage error") {
    const fs::path dir = fresh_dir("index");
    const auto r = invoke(with("train", small(dir, {"--train-series-index", "99"})));
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("train_series_index") != std::string::npos);
}

TEST_CASE("evaluate reports every series for every pair") {
    const fs::path dir = fresh_dir("evaluate");
    REQUIRE(invoke(with("train", small(dir))).code == 0);
    const auto r = invoke(with("evaluate", small(dir)));
    REQUIRE(r.code == 0);
    const auto rows = lines_of(OutputLayout(dir).report_csv());
    // header + 3 models x 2 horizons x (3 series + mean + sd)
    CHECK(rows.size() == 1 + 3 * 2 * 5);
    const auto forecasts = lines_of(OutputLayout(dir).forecasts("gru", 3));
    CHECK(forecasts[0] == "series,origin,step,predicted,actual,last_observed,raw_min,raw_max");
    CHECK(forecasts.size() == 1 + 3 * (40 - 3 + 1) * 3);
}

TEST_CASE("evaluate without checkpoints names the missing pair") {
    const fs::path dir = fresh_dir("missing");
    const auto r = invoke(with("evaluate", small(dir, {"--models", "gru"})));
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("gru f=1") != std::string::npos);
    CHECK(invoke(with("evaluate", small(dir, {"--models", "baseline"}))).code == 0);
}

TEST_CASE("evaluate with a different window than training is rejected") {
    const fs::path dir = fresh_dir("mismatch");
    REQUIRE(invoke(with("train", small(dir, {"--models", "lstm"}))).code == 0);
    auto args = small(dir, {"--models", "lstm"});
    *(std::find(args.begin(), args.end(), "--window") + 1) = "25";
    const auto r = invoke(with("evaluate", args));
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("w=20") != std::string::npos);
}

TEST_CASE("baseline on a constant csv scores perfectly") {
    const fs::path dir = fresh_dir("constant");
    {
        std::ofstream csv(dir / "flat.csv");
        csv << "a,b\n";
        for (int i = 0; i < 150; ++i) {
            csv << "5,-2\n";
        }
    }
    const auto r = invoke({"--quiet", "--out", (dir / "out").string(), "--csv", (dir / "flat.csv").string(),
                        "--models", "baseline", "--window", "10", "--test-len", "30", "evaluate"});
    REQUIRE(r.code == 0);
    for (const auto& line : lines_of(OutputLayout(dir / "out").report_csv())) {
        if (line.rfind("baseline,", 0) == 0 && line.find(",sd_sample,") == std::string::npos) {
            CHECK(line.substr(line.size() - 4) == ",0,1");
        }
    }
}

TEST_CASE("run produces plots whose values match the forecasts") {
    const fs::path dir = fresh_dir("run");
    REQUIRE(invoke(with("run", small(dir))).code == 0);
    const OutputLayout layout(dir);
    const auto sets = read_forecasts(layout.forecasts("lstm", 3));
    REQUIRE(sets.size() == 3);
    for (const auto& [name, set] : sets) {
        const std::string svg = slurp(layout.plot_svg(name, "lstm", 3));
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("class=\"actual\"") != std::string::npos);
        CHECK(svg.find("class=\"predicted\"") != std::string::npos);

        const ForecastSet raw = denormalized(set);
        const auto rows = lines_of(layout.plot_csv(name, "lstm", 3));
        REQUIRE(rows.size() > 1);
        CHECK(rows[0] == "origin,step,index,actual,predicted");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            std::istringstream cells(rows[i]);
            std::string tok;
            std::vector<double> v;
            while (std::getline(cells, tok, ',')) {
                v.push_back(std::stod(tok));
            }
            REQUIRE(v.size() == 5);
            const auto origin = static_cast<std::size_t>(v[0]);
            const auto step = static_cast<std::size_t>(v[1]);
            const auto row = static_cast<std::size_t>(
                std::find(raw.origins.begin(), raw.origins.end(), origin) - raw.origins.begin());
            REQUIRE(row < raw.size());
            CHECK(v[2] == static_cast<double>(origin + step - 1));
            CHECK(std::abs(v[3] - raw.actual(row, step - 1)) <= 1e-9);
            CHECK(std::abs(v[4] - raw.predicted(row, step - 1)) <= 1e-9);
        }
    }
}

TEST_CASE("manifest lists exactly the artifacts on disk") {
    const fs::path dir = fresh_dir("manifest");
    REQUIRE(invoke(with("run", small(dir))).code == 0);
    const auto m = nlohmann::json::parse(slurp(OutputLayout(dir).manifest()));
    CHECK(m["toolkit_version"] == toolkit_version);
    CHECK(m["seed"] == 42);
    std::set<fs::path> listed;
    auto add = [&](const nlohmann::json& p) {
        const fs::path path = p.get<std::string>();
        CHECK(fs::exists(path));
        listed.insert(fs::weakly_canonical(path));
    };
    add(m["dataset"]);
    for (const char* key : {"checkpoints", "loss_histories", "forecasts", "reports"}) {
        for (const auto& item : m[key].items()) {
            add(item.value());
        }
    }
    for (const auto& p : m["plots"]) {
        add(p);
    }
    CHECK(m["checkpoints"].size() == 4);
    CHECK(m["forecasts"].size() == 6);
    CHECK(m["plots"].size() == 3 * 6 * 2);
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
            CHECK_MESSAGE(listed.count(fs::weakly_canonical(entry.path())) == 1, entry.path().string());
        }
    }
    CHECK(m["timings_seconds"].contains("train"));
}

TEST_CASE("two runs with the same seed give identical artifacts") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    REQUIRE(invoke(with("run", small(a))).code == 0);
    REQUIRE(invoke(with("run", small(b))).code == 0);
    CHECK(slurp(OutputLayout(a).report_csv()) == slurp(OutputLayout(b).report_csv()));
    CHECK(slurp(OutputLayout(a).checkpoint("gru", 3)) == slurp(OutputLayout(b).checkpoint("gru", 3)));
    CHECK(slurp(OutputLayout(a).forecasts("lstm", 1)) == slurp(OutputLayout(b).forecasts("lstm", 1)));
}

TEST_CASE("evaluate alone reuses saved checkpoints") {
    const fs::path dir = fresh_dir("rerun");
    REQUIRE(invoke(with("run", small(dir))).code == 0);
    const OutputLayout layout(dir);
    const std::string report = slurp(layout.report_csv());
    const auto stamp = fs::last_write_time(layout.checkpoint("lstm", 1));
    fs::remove_all(dir / "forecasts");
    fs::remove(layout.report_csv());
    REQUIRE(invoke(with("evaluate", small(dir))).code == 0);
    CHECK(slurp(layout.report_csv()) == report);
    CHECK(fs::last_write_time(layout.checkpoint("lstm", 1)) == stamp);
}

TEST_CASE("divergent training exits with the numeric code") {
    const fs::path dir = fresh_dir("diverge");
    const auto r = invoke(with("train", small(dir, {"--models", "lstm", "--learning-rate", "1e300"})));
    CHECK(r.code == exit_numeric);
    CHECK(r.err.find("epoch") != std::string::npos);
}

TEST_CASE("usage handling") {
    CHECK(invoke({"--help"}).code == exit_ok);
    CHECK(invoke({"--version"}).out.find("0.1.0") != std::string::npos);
    CHECK(invoke({}).code == exit_usage);
    CHECK(invoke({"bogus"}).code == exit_usage);
    CHECK(invoke({"--window", "abc", "train"}).code == exit_usage);
    CHECK(invoke({"--horizons", "0", "train"}).code == exit_usage);
    CHECK(invoke({"--config", "/nonexistent/c.json", "train"}).code == exit_usage);
}

TEST_CASE("save-config writes the effective configuration") {
    const fs::path dir = fresh_dir("saved");
    const fs::path path = dir / "effective.json";
    REQUIRE(invoke(with("train", small(dir / "out", {"--models", "gru", "--save-config", path.string()}))).code == 0);
    const ExperimentConfig c = load_config(path);
    CHECK(c.window == 20);
    CHECK(c.horizons == std::vector<std::size_t>{1, 3});
    CHECK(c.models == std::vector<std::string>{"gru"});
    CHECK(c.train.units == 4);
}
