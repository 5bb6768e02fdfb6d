#include "ttv/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

namespace ttv::csv {

namespace {

struct Parser {
    const std::string& text;
    const std::string& name;
    std::size_t pos = 0;
    std::size_t line = 1;

    bool done() const { return pos >= text.size(); }

    // Parses one record; returns false at end of input.
    bool next_record(Row& row) {
        row.fields.clear();
        if (done()) return false;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool record_open = true;
        while (record_open) {
            if (done()) {
                if (in_quotes) {
                    throw input_error(name + ":" + std::to_string(row.line) +
                                      ": unterminated quoted field");
                }
                row.fields.push_back(std::move(field));
                return true;
            }
            const char c = text[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                    } else {
                        in_quotes = false;
                        ++pos;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++pos;
                }
            } else {
                switch (c) {
                    case '"':
                        if (!field.empty()) {
                            throw input_error(name + ":" + std::to_string(line) + ": column " +
                                              std::to_string(row.fields.size() + 1) +
                                              ": quote inside unquoted field");
                        }
                        in_quotes = true;
                        ++pos;
                        break;
                    case ',':
                        row.fields.push_back(std::move(field));
                        field.clear();
                        ++pos;
                        break;
                    case '\r':
                        ++pos;
                        break;
                    case '\n':
                        ++line;
                        ++pos;
                        row.fields.push_back(std::move(field));
                        record_open = false;
                        break;
                    default:
                        field.push_back(c);
                        ++pos;
                }
            }
        }
        return true;
    }
};

}  // namespace

Table Table::read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw input_error("cannot open file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return read_string(buffer.str(), path.filename().string());
}

Table Table::read_string(std::string text, std::string name) {
    Table table;
    table.name_ = std::move(name);
    // Strip UTF-8 BOM.
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        text.erase(0, 3);
    }
    Parser parser{text, table.name_};
    Row row;
    if (!parser.next_record(row) || row.fields.empty() ||
        (row.fields.size() == 1 && row.fields[0].empty())) {
        throw input_error(table.name_ + ": missing header row");
    }
    table.header_ = row.fields;
    for (std::size_t i = 0; i < table.header_.size(); ++i) {
        table.index_.emplace(table.header_[i], i);
    }
    while (parser.next_record(row)) {
        if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
        if (row.fields.size() != table.header_.size()) {
            throw input_error(table.name_ + ":" + std::to_string(row.line) + ": expected " +
                              std::to_string(table.header_.size()) + " fields, got " +
                              std::to_string(row.fields.size()));
        }
        table.rows_.push_back(std::move(row));
    }
    return table;
}

bool Table::has_column(const std::string& column) const { return index_.count(column) > 0; }

std::size_t Table::column(const std::string& column) const {
    auto it = index_.find(column);
    if (it == index_.end()) {
        throw input_error(name_ + ": missing required column '" + column + "'");
    }
    return it->second;
}

void Table::fail(const Row& row, std::size_t col, const std::string& what) const {
    throw input_error(name_ + ":" + std::to_string(row.line) + ": column '" + header_[col] +
                      "': " + what);
}

const std::string& Table::text(const Row& row, std::size_t col) const { return row.fields[col]; }

double Table::number(const Row& row, std::size_t col) const {
    const std::string& s = row.fields[col];
    if (s.empty()) fail(row, col, "empty numeric field");
    const char* begin = s.data();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size()) fail(row, col, "not a number: '" + s + "'");
    return v;
}

std::int64_t Table::integer(const Row& row, std::size_t col) const {
    const std::string& s = row.fields[col];
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        fail(row, col, "not an integer: '" + s + "'");
    }
    return v;
}

std::string escape_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) {
        throw input_error("cannot open file for writing: " + path.string());
    }
}

void Writer::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape_field(fields[i]);
    }
    out_ << '\n';
}

void Writer::close() {
    out_.close();
    if (!out_) {
        throw std::runtime_error("failed writing " + path_.string());
    }
}

}  // namespace ttv::csv
