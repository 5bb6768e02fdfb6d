#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttv/common.hpp"

namespace ttv::csv {

// One parsed record plus its 1-based line number in the source file (the
// line the record started on; quoted fields may span lines).
struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC-4180 table reader: header row required, UTF-8 (BOM stripped),
// CR/LF tolerated. Errors name file, line, and column.
class Table {
public:
    static Table read_file(const std::filesystem::path& path);
    static Table read_string(std::string text, std::string name);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::string& name() const { return name_; }

    bool has_column(const std::string& column) const;

    // Index of a required column; throws input_error if absent.
    std::size_t column(const std::string& column) const;

    // Field accessors validate presence and convert with full context in
    // error messages (file, line, column name).
    const std::string& text(const Row& row, std::size_t col) const;
    double number(const Row& row, std::size_t col) const;
    std::int64_t integer(const Row& row, std::size_t col) const;

private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, std::size_t> index_;

    [[noreturn]] void fail(const Row& row, std::size_t col, const std::string& what) const;
};

// Quotes per RFC 4180 (only when the value contains comma, quote, or
// newline).
std::string escape_field(const std::string& value);

// Shortest round-trip decimal representation, deterministic across runs.
std::string format_double(double value);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);

    void write_row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

}  // namespace ttv::csv
