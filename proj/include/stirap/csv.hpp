#pragma once

#include <string>
#include <vector>

namespace stirap {

/// Numeric table with a header row. All simulator CSV files use '.' decimal
/// separators and '\n' line endings regardless of locale.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// Shortest round-trip decimal form of a double (locale-independent).
std::string format_double(double value);

}  // namespace stirap
