#include "cgain/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "cgain/error.hpp"

namespace cgain {
namespace {

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\n\r") != std::string::npos; }

std::string quote(const std::string& s) {
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string format_double(double x) {
    char buf[32];
    // Shortest representation that round-trips.
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;
    char c = 0;

    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        const bool blank = row.size() == 1 && row[0].empty();
        if (!blank) {
            if (table.header.empty()) {
                table.header = std::move(row);
            } else {
                if (row.size() != table.header.size()) {
                    throw ParseError("expected " + std::to_string(table.header.size()) + " cells, found " +
                                     std::to_string(row.size()), row_line);
                }
                table.rows.push_back(std::move(row));
            }
        }
        row.clear();
        row_line = line;
    };

    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) throw ParseError("unexpected quote inside unquoted field", line);
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r': break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", row_line);
    if (!field.empty() || !row.empty()) end_row();
    if (table.header.empty()) throw ParseError("empty CSV input");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open CSV file '" + path + "'");
    return parse_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << quote(row[k]);
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
}

CellValue parse_cell(const std::string& cell, const FeatureSpec& spec) {
    if (cell.empty()) return Missing{};
    switch (spec.kind) {
        case FeatureKind::multiclass: {
            const auto k = spec.category_of(cell);
            if (!k) throw SchemaError("unknown category '" + cell + "' for feature '" + spec.name + "'");
            return *k;
        }
        case FeatureKind::multilabel: {
            std::vector<std::size_t> set;
            if (cell == "{}") return set;
            std::size_t start = 0;
            while (true) {
                const auto pos = cell.find('|', start);
                const std::string part = cell.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
                const auto k = spec.category_of(part);
                if (!k) throw SchemaError("unknown category '" + part + "' for feature '" + spec.name + "'");
                set.push_back(*k);
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
            std::sort(set.begin(), set.end());
            set.erase(std::unique(set.begin(), set.end()), set.end());
            return set;
        }
        case FeatureKind::numeric: {
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw SchemaError("'" + cell + "' is not a number (feature '" + spec.name + "')");
            }
            if (!(x >= 0.0 && x <= 1.0)) {
                throw SchemaError("value " + cell + " outside [0, 1] (feature '" + spec.name + "')");
            }
            return x;
        }
    }
    return Missing{};
}

std::string format_cell(const CellValue& value, const FeatureSpec& spec) {
    if (is_missing(value)) return {};
    if (const auto* k = std::get_if<std::size_t>(&value)) return spec.label_of(*k);
    if (const auto* set = std::get_if<std::vector<std::size_t>>(&value)) {
        if (set->empty()) return "{}";
        std::string out;
        for (std::size_t i = 0; i < set->size(); ++i) out += (i ? "|" : "") + spec.label_of((*set)[i]);
        return out;
    }
    return format_double(std::get<double>(value));
}

LabeledRecords records_from_table(const CsvTable& table, const FeatureSchema& schema, const std::string& label_column) {
    std::vector<std::size_t> column_of(schema.feature_count(), SIZE_MAX);
    std::size_t label_index = SIZE_MAX;
    std::vector<std::string> unknown;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& name = table.header[c];
        if (!label_column.empty() && name == label_column) {
            label_index = c;
        } else if (const auto j = schema.find(name)) {
            if (column_of[*j] != SIZE_MAX) throw ParseError("duplicate column '" + name + "'", 1, c + 1);
            column_of[*j] = c;
        } else {
            unknown.push_back(name);
        }
    }
    std::vector<std::string> absent;
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        if (column_of[j] == SIZE_MAX) absent.push_back(schema.feature(j).name);
    }
    if (!label_column.empty() && label_index == SIZE_MAX) absent.push_back(label_column + " (label)");
    if (!unknown.empty() || !absent.empty()) {
        std::string msg = "schema/data mismatch";
        auto list = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
            return s;
        };
        if (!unknown.empty()) msg += "; columns not in schema: " + list(unknown);
        if (!absent.empty()) msg += "; schema features without a column: " + list(absent);
        throw SchemaError(msg);
    }

    LabeledRecords out;
    out.records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        RawRecord record(schema.feature_count(), Missing{});
        for (std::size_t j = 0; j < schema.feature_count(); ++j) {
            try {
                record[j] = parse_cell(row[column_of[j]], schema.feature(j));
            } catch (const SchemaError& e) {
                // +2: 1-based and the header line.
                throw ParseError(e.what(), r + 2, column_of[j] + 1);
            }
        }
        if (label_index != SIZE_MAX) out.labels.push_back(row[label_index]);
        out.records.push_back(std::move(record));
    }
    return out;
}

std::vector<int> binary_labels(const std::vector<std::string>& labels, const std::string& positive) {
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty()) throw ParseError("missing label", i + 2, 0);
        distinct.insert(labels[i]);
    }
    if (distinct.size() > 2) throw SchemaError("label column has " + std::to_string(distinct.size()) +
                                               " distinct values; a binary label is required");
    const std::string pos = !positive.empty() ? positive : (distinct.empty() ? std::string() : *distinct.rbegin());
    if (!positive.empty() && distinct.size() == 2 && !distinct.contains(positive)) {
        throw SchemaError("positive label '" + positive + "' does not occur in the label column");
    }
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(l == pos ? 1 : 0);
    return out;
}

CsvTable table_from_records(const std::vector<RawRecord>& records, const FeatureSchema& schema) {
    CsvTable table;
    for (const auto& f : schema.features()) table.header.push_back(f.name);
    table.rows.reserve(records.size());
    for (const auto& record : records) {
        validate_record(record, schema);
        std::vector<std::string> row;
        row.reserve(record.size());
        for (std::size_t j = 0; j < record.size(); ++j) row.push_back(format_cell(record[j], schema.feature(j)));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace cgain
