#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qdt/dataset.hpp"

namespace qdt {

// Names the target column and optionally pins column types. Columns without
// an override are inferred: numeric when every cell parses as a number
// (binary if every value is 0 or 1), categorical otherwise.
struct CsvSchema {
    std::string target = "y";
    // When false and the target column is absent, targets are filled with 0.
    bool target_required = true;
    std::map<std::string, ColumnKind> overrides;
};

RawTable read_csv(std::istream& in, const CsvSchema& schema);
RawTable load_csv(const std::string& path, const CsvSchema& schema);

void write_csv(std::ostream& out, const RawTable& table);
void save_csv(const RawTable& table, const std::string& path);

// Low-level helpers shared with the CLI writers.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);
std::string format_double(double v);

}  // namespace qdt
