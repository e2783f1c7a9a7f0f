#include "tsf/dataprep/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "tsf/numkit/errors.hpp"

namespace tsf {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view cell, std::size_t line, std::size_t column) {
    std::string_view s = cell;
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(value)) {
        fail(line, "column " + std::to_string(column) + ": '" + std::string(cell) +
                       "' is not a finite number");
    }
    return value;
}

} // namespace

std::vector<Series> parse_csv(std::istream& in, const CsvLayout& layout) {
    const std::size_t skip = layout.date_column ? 1 : 0;
    std::vector<Series> series;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line);
        if (!have_header) {
            if (cells.size() <= skip) {
                fail(line_no, "header has no series columns");
            }
            for (std::size_t c = skip; c < cells.size(); ++c) {
                series.push_back(Series{unquote(cells[c]), {}, {}});
            }
            have_header = true;
            continue;
        }
        if (cells.size() != series.size() + skip) {
            fail(line_no, "expected " + std::to_string(series.size() + skip) + " columns, found " +
                              std::to_string(cells.size()));
        }
        for (std::size_t c = skip; c < cells.size(); ++c) {
            series[c - skip].values.push_back(parse_number(cells[c], line_no, c + 1));
        }
        ++rows;
    }
    if (!have_header) {
        fail(line_no + 1, "empty file");
    }
    if (rows == 0) {
        fail(line_no + 1, "no data rows after the header");
    }
    return series;
}

std::vector<Series> load_csv(const std::filesystem::path& path, const CsvLayout& layout) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    try {
        return parse_csv(in, layout);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string format_double(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

void write_csv(std::ostream& out, const std::vector<Series>& series) {
    if (series.empty()) {
        throw ArgumentError("write_csv: no series to write");
    }
    const std::size_t q = series.front().values.size();
    for (const auto& s : series) {
        if (s.values.size() != q) {
            throw ArgumentError("write_csv: series '" + s.name + "' has length " +
                                std::to_string(s.values.size()) + ", expected " +
                                std::to_string(q));
        }
    }
    for (std::size_t c = 0; c < series.size(); ++c) {
        out << (c ? "," : "") << series[c].name;
    }
    out << '\n';
    for (std::size_t r = 0; r < q; ++r) {
        for (std::size_t c = 0; c < series.size(); ++c) {
            out << (c ? "," : "") << format_double(series[c].values[r]);
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<Series>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_csv(out, series);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace tsf
