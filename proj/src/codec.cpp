#include "cgain/codec.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cgain/error.hpp"

namespace cgain {
namespace {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string describe(const FeatureSpec& spec) { return "feature '" + spec.name + "'"; }

void check_binary(const VectorRef& z, const char* what) {
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        if (z(k) != 0.0 && z(k) != 1.0) {
            throw EncodingError(std::string(what) + ": entry " + std::to_string(k) + " is not 0 or 1");
        }
    }
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::multiclass: return "multiclass";
        case FeatureKind::multilabel: return "multilabel";
        case FeatureKind::numeric: return "numeric";
    }
    return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "multiclass") return FeatureKind::multiclass;
    if (text == "multilabel") return FeatureKind::multilabel;
    if (text == "numeric") return FeatureKind::numeric;
    throw SchemaError("unknown feature kind '" + std::string(text) + "'");
}

std::optional<std::size_t> FeatureSpec::category_of(std::string_view label) const {
    if (labels.empty()) {
        std::size_t value = 0;
        if (label.empty()) return std::nullopt;
        for (const char c : label) {
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + static_cast<std::size_t>(c - '0');
            if (value >= cardinality) return std::nullopt;
        }
        return value;
    }
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
}

std::string FeatureSpec::label_of(std::size_t category) const {
    if (labels.empty()) return std::to_string(category);
    return labels.at(category);
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    std::unordered_set<std::string> names;
    offsets_.reserve(features_.size());
    for (const auto& f : features_) {
        if (f.name.empty()) throw SchemaError("feature with empty name");
        if (!names.insert(f.name).second) throw SchemaError("duplicate " + describe(f));
        switch (f.kind) {
            case FeatureKind::multiclass:
                if (f.cardinality < 2) throw SchemaError(describe(f) + ": multiclass needs at least 2 categories");
                break;
            case FeatureKind::multilabel:
                if (f.cardinality < 1) throw SchemaError(describe(f) + ": multilabel needs at least 1 category");
                break;
            case FeatureKind::numeric:
                if (f.cardinality != 1) throw SchemaError(describe(f) + ": numeric features have cardinality 1");
                if (!f.labels.empty()) throw SchemaError(describe(f) + ": numeric features take no labels");
                break;
        }
        if (!f.labels.empty() && f.labels.size() != f.cardinality) {
            throw SchemaError(describe(f) + ": " + std::to_string(f.labels.size()) + " labels for cardinality " +
                              std::to_string(f.cardinality));
        }
        std::unordered_set<std::string> seen;
        for (const auto& l : f.labels) {
            if (l.empty() || !seen.insert(l).second) throw SchemaError(describe(f) + ": empty or duplicate label");
        }
        offsets_.push_back(width_);
        width_ += f.cardinality;
    }
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
    for (std::size_t j = 0; j < features_.size(); ++j) {
        if (features_[j].name == name) return j;
    }
    return std::nullopt;
}

std::uint64_t FeatureSchema::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : to_text()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string FeatureSchema::to_text() const {
    std::ostringstream out;
    for (const auto& f : features_) {
        out << f.name << ' ' << to_string(f.kind) << ' ' << f.cardinality;
        if (!f.labels.empty()) {
            out << ' ';
            for (std::size_t k = 0; k < f.labels.size(); ++k) out << (k ? "," : "") << f.labels[k];
        }
        out << '\n';
    }
    return out.str();
}

FeatureSchema FeatureSchema::parse(std::string_view text) {
    std::vector<FeatureSpec> features;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;
        if (tokens.size() < 3 || tokens.size() > 4) {
            throw ParseError("expected 'name kind cardinality [labels]'", line_no);
        }
        FeatureSpec spec;
        spec.name = tokens[0];
        try {
            spec.kind = parse_feature_kind(tokens[1]);
        } catch (const SchemaError& e) {
            throw ParseError(e.what(), line_no);
        }
        try {
            std::size_t used = 0;
            const long long q = std::stoll(tokens[2], &used);
            if (used != tokens[2].size() || q < 1) throw std::invalid_argument("cardinality");
            spec.cardinality = static_cast<std::size_t>(q);
        } catch (const std::exception&) {
            throw ParseError("cardinality must be a positive integer, got '" + tokens[2] + "'", line_no);
        }
        if (tokens.size() == 4) spec.labels = split(tokens[3], ',');
        features.push_back(std::move(spec));
    }
    try {
        return FeatureSchema(std::move(features));
    } catch (const SchemaError& e) {
        throw ParseError(std::string("invalid schema: ") + e.what());
    }
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schema file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void validate_record(const RawRecord& record, const FeatureSchema& schema) {
    if (record.size() != schema.feature_count()) {
        throw SchemaError("record has " + std::to_string(record.size()) + " values, schema has " +
                          std::to_string(schema.feature_count()) + " features");
    }
    for (std::size_t j = 0; j < record.size(); ++j) {
        const auto& spec = schema.feature(j);
        const auto& value = record[j];
        if (is_missing(value)) continue;
        switch (spec.kind) {
            case FeatureKind::multiclass: {
                const auto* idx = std::get_if<std::size_t>(&value);
                if (!idx) throw SchemaError(describe(spec) + ": expected a category index");
                if (*idx >= spec.cardinality) {
                    throw SchemaError(describe(spec) + ": category " + std::to_string(*idx) + " out of range");
                }
                break;
            }
            case FeatureKind::multilabel: {
                const auto* set = std::get_if<std::vector<std::size_t>>(&value);
                if (!set) throw SchemaError(describe(spec) + ": expected a category set");
                for (const auto k : *set) {
                    if (k >= spec.cardinality) {
                        throw SchemaError(describe(spec) + ": category " + std::to_string(k) + " out of range");
                    }
                }
                break;
            }
            case FeatureKind::numeric: {
                const auto* x = std::get_if<double>(&value);
                if (!x) throw SchemaError(describe(spec) + ": expected a numeric value");
                if (!(*x >= 0.0 && *x <= 1.0)) throw SchemaError(describe(spec) + ": value outside [0, 1]");
                break;
            }
        }
    }
}

BinaryRow encode_binary(const RawRecord& record, const FeatureSchema& schema) {
    validate_record(record, schema);
    BinaryRow row{VectorXd::Zero(static_cast<Eigen::Index>(schema.total_width())),
                  VectorXd::Zero(static_cast<Eigen::Index>(schema.feature_count()))};
    for (std::size_t j = 0; j < record.size(); ++j) {
        const auto& value = record[j];
        if (is_missing(value)) continue;
        row.feature_mask(static_cast<Eigen::Index>(j)) = 1.0;
        const auto base = static_cast<Eigen::Index>(schema.offset(j));
        switch (schema.feature(j).kind) {
            case FeatureKind::multiclass: row.codes(base + static_cast<Eigen::Index>(std::get<std::size_t>(value))) = 1.0; break;
            case FeatureKind::multilabel:
                for (const auto k : std::get<std::vector<std::size_t>>(value)) row.codes(base + static_cast<Eigen::Index>(k)) = 1.0;
                break;
            case FeatureKind::numeric: row.codes(base) = std::get<double>(value); break;
        }
    }
    return row;
}

VectorXd fuzzify_multiclass(const VectorRef& onehot, Rng& rng) {
    check_binary(onehot, "fuzzify_multiclass");
    if (onehot.sum() != 1.0) throw EncodingError("fuzzify_multiclass: input is not one-hot");
    const auto q = onehot.size();
    const double upper = 1.0 / static_cast<double>(q);
    VectorXd x(q);
    Eigen::Index active = 0;
    double inactive_mass = 0.0;
    for (Eigen::Index k = 0; k < q; ++k) {
        if (onehot(k) == 1.0) {
            active = k;
            continue;
        }
        x(k) = rng.uniform(0.0, upper);
        inactive_mass += x(k);
    }
    x(active) = 1.0 - inactive_mass;
    return x;
}

VectorXd fuzzify_multilabel(const VectorRef& multihot, Rng& rng) {
    check_binary(multihot, "fuzzify_multilabel");
    VectorXd x(multihot.size());
    for (Eigen::Index k = 0; k < multihot.size(); ++k) {
        x(k) = multihot(k) == 1.0 ? rng.uniform_closed(0.5, 1.0) : rng.uniform(0.0, 0.5);
    }
    return x;
}

CellValue decode(const VectorRef& block, const FeatureSpec& spec) {
    switch (spec.kind) {
        case FeatureKind::multiclass: {
            Eigen::Index best = 0;
            for (Eigen::Index k = 1; k < block.size(); ++k) {
                if (block(k) > block(best)) best = k;
            }
            return static_cast<std::size_t>(best);
        }
        case FeatureKind::multilabel: {
            std::vector<std::size_t> active;
            for (Eigen::Index k = 0; k < block.size(); ++k) {
                if (block(k) >= 0.5) active.push_back(static_cast<std::size_t>(k));
            }
            return active;
        }
        case FeatureKind::numeric: return block(0);
    }
    return Missing{};
}

RawRecord decode_row(const VectorRef& values, const VectorRef& feature_mask, const FeatureSchema& schema) {
    if (static_cast<std::size_t>(values.size()) != schema.total_width() ||
        static_cast<std::size_t>(feature_mask.size()) != schema.feature_count()) {
        throw DimensionError("decode_row: row width does not match schema");
    }
    RawRecord record(schema.feature_count(), Missing{});
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        if (feature_mask(static_cast<Eigen::Index>(j)) == 0.0) continue;
        record[j] = decode(values.segment(static_cast<Eigen::Index>(schema.offset(j)),
                                          static_cast<Eigen::Index>(schema.width(j))),
                           schema.feature(j));
    }
    return record;
}

VectorXd binarize_block(const VectorRef& block, const FeatureSpec& spec) {
    VectorXd out = VectorXd::Zero(block.size());
    const CellValue v = decode(block, spec);
    switch (spec.kind) {
        case FeatureKind::multiclass: out(static_cast<Eigen::Index>(std::get<std::size_t>(v))) = 1.0; break;
        case FeatureKind::multilabel:
            for (const auto k : std::get<std::vector<std::size_t>>(v)) out(static_cast<Eigen::Index>(k)) = 1.0;
            break;
        case FeatureKind::numeric: out(0) = std::get<double>(v); break;
    }
    return out;
}

VectorXd build_masks(const VectorRef& feature_mask, const FeatureSchema& schema) {
    if (static_cast<std::size_t>(feature_mask.size()) != schema.feature_count()) {
        throw DimensionError("build_masks: mask length does not match feature count");
    }
    VectorXd mask(static_cast<Eigen::Index>(schema.total_width()));
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        mask.segment(static_cast<Eigen::Index>(schema.offset(j)), static_cast<Eigen::Index>(schema.width(j)))
            .setConstant(feature_mask(static_cast<Eigen::Index>(j)));
    }
    return mask;
}

namespace {

void fuzzify_row(FuzzyDataset& d, Eigen::Index i, Rng& rng) {
    const auto& schema = d.schema;
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const auto off = static_cast<Eigen::Index>(schema.offset(j));
        const auto w = static_cast<Eigen::Index>(schema.width(j));
        if (d.feature_mask(i, static_cast<Eigen::Index>(j)) == 0.0) {
            d.values.row(i).segment(off, w).setZero();
            continue;
        }
        const VectorXd z = d.binary.row(i).segment(off, w).transpose();
        switch (schema.feature(j).kind) {
            case FeatureKind::multiclass: d.values.row(i).segment(off, w) = fuzzify_multiclass(z, rng).transpose(); break;
            case FeatureKind::multilabel: d.values.row(i).segment(off, w) = fuzzify_multilabel(z, rng).transpose(); break;
            case FeatureKind::numeric: d.values(i, off) = z(0); break;
        }
    }
}

}  // namespace

FuzzyDataset encode_dataset(std::span<const RawRecord> records, const FeatureSchema& schema, std::uint64_t seed,
                            Coding coding) {
    const auto n = static_cast<Eigen::Index>(records.size());
    const auto q = static_cast<Eigen::Index>(schema.total_width());
    const auto p = static_cast<Eigen::Index>(schema.feature_count());
    FuzzyDataset d{schema, MatrixXd::Zero(n, q), MatrixXd::Zero(n, q), MatrixXd::Zero(n, p), MatrixXd::Zero(n, q),
                   coding};

    std::string errors;
    std::size_t error_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            const BinaryRow row = encode_binary(records[static_cast<std::size_t>(i)], schema);
            d.binary.row(i) = row.codes.transpose();
            d.feature_mask.row(i) = row.feature_mask.transpose();
            d.mask.row(i) = build_masks(row.feature_mask, schema).transpose();
        } catch (const SchemaError& e) {
            if (++error_count <= 20) errors += "\n  row " + std::to_string(i + 1) + ": " + e.what();
        }
    }
    if (error_count > 0) {
        if (error_count > 20) errors += "\n  ... " + std::to_string(error_count - 20) + " more";
        throw SchemaError(std::to_string(error_count) + " record(s) do not conform to the schema:" + errors);
    }

    if (coding == Coding::hard) {
        d.values = d.binary;
    } else {
        refuzzify(d, seed);
    }
    return d;
}

void refuzzify(FuzzyDataset& dataset, std::uint64_t seed) {
    for (Eigen::Index i = 0; i < dataset.values.rows(); ++i) {
        Rng rng(derive_seed(seed, "fuzzify", static_cast<std::uint64_t>(i)));
        fuzzify_row(dataset, i, rng);
    }
}

void apply_feature_mask(FuzzyDataset& dataset, const MatrixXd& feature_mask) {
    if (feature_mask.rows() != dataset.feature_mask.rows() || feature_mask.cols() != dataset.feature_mask.cols()) {
        throw DimensionError("apply_feature_mask: mask shape does not match dataset");
    }
    const auto& schema = dataset.schema;
    for (Eigen::Index i = 0; i < feature_mask.rows(); ++i) {
        for (std::size_t j = 0; j < schema.feature_count(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (feature_mask(i, jj) != 0.0 || dataset.feature_mask(i, jj) == 0.0) continue;
            const auto off = static_cast<Eigen::Index>(schema.offset(j));
            const auto w = static_cast<Eigen::Index>(schema.width(j));
            dataset.feature_mask(i, jj) = 0.0;
            dataset.mask.row(i).segment(off, w).setZero();
            dataset.values.row(i).segment(off, w).setZero();
            dataset.binary.row(i).segment(off, w).setZero();
        }
    }
}

FuzzyDataset select_rows(const FuzzyDataset& dataset, std::span<const std::size_t> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    FuzzyDataset out{dataset.schema,
                     MatrixXd(n, dataset.values.cols()),
                     MatrixXd(n, dataset.binary.cols()),
                     MatrixXd(n, dataset.feature_mask.cols()),
                     MatrixXd(n, dataset.mask.cols()),
                     dataset.coding};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
        if (src >= dataset.values.rows()) throw DimensionError("select_rows: row index out of range");
        out.values.row(i) = dataset.values.row(src);
        out.binary.row(i) = dataset.binary.row(src);
        out.feature_mask.row(i) = dataset.feature_mask.row(src);
        out.mask.row(i) = dataset.mask.row(src);
    }
    return out;
}

std::vector<RawRecord> decode_dataset(const FuzzyDataset& dataset) {
    std::vector<RawRecord> records;
    records.reserve(dataset.rows());
    for (Eigen::Index i = 0; i < dataset.values.rows(); ++i) {
        records.push_back(decode_row(dataset.values.row(i).transpose(), dataset.feature_mask.row(i).transpose(),
                                     dataset.schema));
    }
    return records;
}

}  // namespace cgain
