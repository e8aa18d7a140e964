#include "qdt/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "qdt/errors.hpp"

namespace qdt {

namespace {

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    char buf[32];
    // Shortest representation that round-trips.
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

RawTable read_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV input is empty");
    strip_cr(line);
    const auto header = split_csv_line(line);

    std::size_t target_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == schema.target) target_col = c;
    const bool has_target = target_col != header.size();
    if (!has_target && schema.target_required)
        throw DataError("target column '" + schema.target + "' not found in header");

    std::vector<std::vector<std::string>> cells(header.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row + 1) + " has " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) cells[c].push_back(std::move(fields[c]));
        ++row;
    }
    if (row == 0) throw DataError("CSV input has no data rows");

    RawTable table;
    table.target_name = schema.target;
    table.target.reserve(row);
    for (std::size_t r = 0; r < row && !has_target; ++r) table.target.push_back(0.0);
    for (std::size_t r = 0; r < row && has_target; ++r) {
        const auto& cell = cells[target_col][r];
        if (cell.empty()) throw DataError("missing target value at row " + std::to_string(r + 1));
        const auto v = parse_number(cell);
        if (!v) throw DataError("non-numeric target value '" + cell + "' at row " + std::to_string(r + 1));
        table.target.push_back(*v);
    }

    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == target_col) continue;
        Column col;
        col.name = header[c];
        std::vector<double> numbers;
        numbers.reserve(row);
        bool numeric = true, binary = true;
        for (const auto& cell : cells[c]) {
            const auto v = parse_number(cell);
            if (!v) {
                numeric = false;
                break;
            }
            if (*v != 0.0 && *v != 1.0) binary = false;
            numbers.push_back(*v);
        }
        if (auto it = schema.overrides.find(col.name); it != schema.overrides.end()) {
            col.kind = it->second;
            if (col.kind != ColumnKind::Categorical && !numeric)
                throw DataError("column '" + col.name + "' is declared numeric but holds non-numeric values");
            if (col.kind == ColumnKind::Binary && !binary)
                throw DataError("column '" + col.name + "' is declared binary but holds values other than 0/1");
        } else {
            col.kind = !numeric ? ColumnKind::Categorical : (binary ? ColumnKind::Binary : ColumnKind::Numeric);
        }
        if (col.kind == ColumnKind::Categorical)
            col.labels = std::move(cells[c]);
        else
            col.numbers = std::move(numbers);
        table.columns.push_back(std::move(col));
    }
    table.validate();
    return table;
}

RawTable load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_csv(in, schema);
}

void write_csv(std::ostream& out, const RawTable& table) {
    table.validate();
    for (const auto& c : table.columns) out << csv_escape(c.name) << ',';
    out << csv_escape(table.target_name) << '\n';
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (const auto& c : table.columns) {
            if (c.kind == ColumnKind::Categorical)
                out << csv_escape(c.labels[r]);
            else
                out << format_double(c.numbers[r]);
            out << ',';
        }
        out << format_double(table.target[r]) << '\n';
    }
}

void save_csv(const RawTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_csv(out, table);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace qdt
