#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsf/dataprep/series.hpp"

namespace tsf {

/// Wide layout: a header row of series names, then one row per time step
/// with one column per series. An optional leading date column is skipped.
struct CsvLayout {
    bool date_column = false;
};

/// Throws ParseError (with 1-based line number) on ragged rows, non-numeric
/// cells or an empty file; IoError if the file cannot be opened.
std::vector<Series> load_csv(const std::filesystem::path& path, const CsvLayout& layout = {});
std::vector<Series> parse_csv(std::istream& in, const CsvLayout& layout = {});

/// Writes the wide layout with shortest round-trip formatting, so
/// load_csv(write_csv(s)) reproduces every value bit for bit. All series
/// must share one length.
void write_csv(const std::filesystem::path& path, const std::vector<Series>& series);
void write_csv(std::ostream& out, const std::vector<Series>& series);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

} // namespace tsf
