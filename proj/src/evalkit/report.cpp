#include "tsf/evalkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tsf/dataprep/csv.hpp"
#include "tsf/numkit/errors.hpp"

namespace tsf {

MeanSd mean_and_sample_sd(const std::vector<double>& values) {
    if (values.empty()) {
        throw ArgumentError("cannot aggregate an empty set of values");
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / n;
    if (values.size() == 1) {
        return {mean, 0.0};
    }
    double sq = 0.0;
    for (double v : values) {
        sq += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(sq / (n - 1.0))};
}

EvalReport aggregate(std::string model, std::size_t horizon, std::vector<SeriesScore> rows,
                     std::string units) {
    if (rows.empty()) {
        throw ArgumentError("aggregate: no series results for " + model);
    }
    std::vector<double> r;
    std::vector<double> d;
    for (const auto& row : rows) {
        r.push_back(row.rmse);
        d.push_back(row.directional_accuracy);
    }
    const MeanSd rs = mean_and_sample_sd(r);
    const MeanSd ds = mean_and_sample_sd(d);
    EvalReport report;
    report.model = std::move(model);
    report.horizon = horizon;
    report.units = std::move(units);
    report.rows = std::move(rows);
    report.mean_rmse = rs.mean;
    report.sd_rmse = rs.sd;
    report.mean_da = ds.mean;
    report.sd_da = ds.sd;
    return report;
}

void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << "model,horizon,units,row,series,rmse,da\n";
    for (const auto& rep : reports) {
        const std::string prefix = rep.model + "," + std::to_string(rep.horizon) + "," + rep.units + ",";
        for (const auto& row : rep.rows) {
            out << prefix << "series," << row.series << "," << format_double(row.rmse) << ","
                << format_double(row.directional_accuracy) << "\n";
        }
        out << prefix << "mean,," << format_double(rep.mean_rmse) << ","
            << format_double(rep.mean_da) << "\n";
        out << prefix << "sd_" << rep.sd_convention << ",," << format_double(rep.sd_rmse) << ","
            << format_double(rep.sd_da) << "\n";
    }
}

void write_report_csv(const std::filesystem::path& path, const std::vector<EvalReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_report_csv(out, reports);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
    std::ostringstream os;
    char line[256];
    for (const auto& rep : reports) {
        std::size_t name_width = 6;
        for (const auto& row : rep.rows) {
            name_width = std::max(name_width, row.series.size());
        }
        const int nw = static_cast<int>(name_width);
        os << rep.model << "  f=" << rep.horizon << "  (" << rep.units << " RMSE, SD divisor n-1)\n";
        std::snprintf(line, sizeof line, "  %-*s  %12s  %8s\n", nw, "series", "RMSE", "DA");
        os << line;
        for (const auto& row : rep.rows) {
            std::snprintf(line, sizeof line, "  %-*s  %12.6f  %8.4f\n", nw, row.series.c_str(),
                          row.rmse, row.directional_accuracy);
            os << line;
        }
        std::snprintf(line, sizeof line, "  %-*s  %12.6f  %8.4f\n", nw, "mean", rep.mean_rmse,
                      rep.mean_da);
        os << line;
        std::snprintf(line, sizeof line, "  %-*s  %12.6f  %8.4f\n\n", nw, "sd", rep.sd_rmse,
                      rep.sd_da);
        os << line;
    }
    return os.str();
}

} // namespace tsf
