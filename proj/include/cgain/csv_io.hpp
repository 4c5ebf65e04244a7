#pragma once

// CSV ingestion and export for coded datasets.
//
// Cell conventions: multiclass = category label; multilabel = labels joined
// by '|' ("{}" is the observed empty set); numeric = decimal in [0, 1];
// missing = empty cell.

#include <iosfwd>
#include <string>
#include <vector>

#include "cgain/codec.hpp"

namespace cgain {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180-style reader (quoted fields, doubled quotes). Every row must
/// have as many cells as the header; violations raise ParseError with the
/// 1-based line number.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);

CellValue parse_cell(const std::string& cell, const FeatureSpec& spec);
std::string format_cell(const CellValue& value, const FeatureSpec& spec);

struct LabeledRecords {
    std::vector<RawRecord> records;
    /// Values of the label column, empty when no label column was requested.
    std::vector<std::string> labels;
};

/// Maps CSV columns to schema features by header name. Extra columns other
/// than `label_column` are rejected, as are schema features without a column.
LabeledRecords records_from_table(const CsvTable& table, const FeatureSchema& schema,
                                  const std::string& label_column = {});

/// 1 where the label equals `positive`, else 0. Without `positive`, the
/// lexicographically larger of the two observed values is the positive
/// class. More than two distinct values, or an empty label, is an error.
std::vector<int> binary_labels(const std::vector<std::string>& labels, const std::string& positive = {});

CsvTable table_from_records(const std::vector<RawRecord>& records, const FeatureSchema& schema);

}  // namespace cgain
