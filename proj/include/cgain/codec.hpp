#pragma once

// Binary and fuzzy-binary coding of categorical records.
//
// A record with p features is coded as a vector of width Q = sum(q_j): one
// block of q_j columns per feature. Multiclass blocks are one-hot, multilabel
// blocks multi-hot, numeric blocks a single value in [0, 1]. The fuzzy code
// replaces the zeros and ones by reals that keep the argmax (multiclass) or
// the 0.5 threshold (multilabel), so the category is always recoverable.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cgain/random.hpp"

namespace cgain {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using VectorRef = Eigen::Ref<const VectorXd>;

enum class FeatureKind { multiclass, multilabel, numeric };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::multiclass;
    std::size_t cardinality = 2;
    /// Optional category labels used for CSV cells; empty means cells carry
    /// the 0-based category index.
    std::vector<std::string> labels;

    std::optional<std::size_t> category_of(std::string_view label) const;
    std::string label_of(std::size_t category) const;
};

class FeatureSchema {
public:
    FeatureSchema() = default;
    /// Throws SchemaError when a feature violates its kind's cardinality
    /// rule, names repeat, or the label count does not match the cardinality.
    explicit FeatureSchema(std::vector<FeatureSpec> features);

    std::size_t feature_count() const noexcept { return features_.size(); }
    std::size_t total_width() const noexcept { return width_; }

    const FeatureSpec& feature(std::size_t j) const { return features_.at(j); }
    std::span<const FeatureSpec> features() const noexcept { return features_; }

    /// First column of feature j's block.
    std::size_t offset(std::size_t j) const { return offsets_.at(j); }
    std::size_t width(std::size_t j) const { return features_.at(j).cardinality; }

    std::optional<std::size_t> find(std::string_view name) const;

    /// Stable 64-bit fingerprint of the canonical text form.
    std::uint64_t hash() const;

    /// One feature per line: `name kind cardinality [label,label,...]`.
    std::string to_text() const;
    static FeatureSchema parse(std::string_view text);
    static FeatureSchema load(const std::string& path);

    bool operator==(const FeatureSchema& other) const { return to_text() == other.to_text(); }

private:
    std::vector<FeatureSpec> features_;
    std::vector<std::size_t> offsets_;
    std::size_t width_ = 0;
};

struct Missing {
    bool operator==(const Missing&) const = default;
};

/// One feature value: category index (multiclass), set of category indices
/// (multilabel, sorted ascending), real in [0, 1] (numeric), or missing.
using CellValue = std::variant<Missing, std::size_t, std::vector<std::size_t>, double>;
using RawRecord = std::vector<CellValue>;

inline bool is_missing(const CellValue& v) { return std::holds_alternative<Missing>(v); }

/// Throws SchemaError describing the first offending feature.
void validate_record(const RawRecord& record, const FeatureSchema& schema);

struct BinaryRow {
    VectorXd codes;         // width Q, zero blocks for missing features
    VectorXd feature_mask;  // width p, 1 = observed
};

BinaryRow encode_binary(const RawRecord& record, const FeatureSchema& schema);

/// Inactive entries ~ U[0, 1/q); the active entry takes the remaining mass.
VectorXd fuzzify_multiclass(const VectorRef& onehot, Rng& rng);

/// Inactive entries ~ U[0, 0.5); active entries ~ U[0.5, 1].
VectorXd fuzzify_multilabel(const VectorRef& multihot, Rng& rng);

/// Multiclass: index of the maximum (lowest index on ties). Multilabel: all
/// k with x(k) >= 0.5. Numeric: the value itself.
CellValue decode(const VectorRef& block, const FeatureSpec& spec);

/// Decodes every observed feature of a coded row; features with mu = 0 decode to Missing.
RawRecord decode_row(const VectorRef& values, const VectorRef& feature_mask, const FeatureSchema& schema);

/// Hard binary code of a block as produced by decode (one-hot / multi-hot / value).
VectorXd binarize_block(const VectorRef& block, const FeatureSpec& spec);

/// Expands a per-feature mask (width p) to the per-column mask (width Q).
VectorXd build_masks(const VectorRef& feature_mask, const FeatureSchema& schema);

enum class Coding { fuzzy, hard };

/// Coded dataset. `values` holds the coding the models see (fuzzy or hard);
/// `binary` always holds the hard codes. Missing blocks are zero in both.
struct FuzzyDataset {
    FeatureSchema schema;
    MatrixXd values;        // n x Q
    MatrixXd binary;        // n x Q
    MatrixXd feature_mask;  // n x p, mu
    MatrixXd mask;          // n x Q, expanded mu
    Coding coding = Coding::fuzzy;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

/// Codes every record once. Row i draws its fuzzy values from the substream
/// derive_seed(seed, "fuzzify", i), so the result does not depend on
/// evaluation order. Per-record failures are collected and reported together.
FuzzyDataset encode_dataset(std::span<const RawRecord> records, const FeatureSchema& schema, std::uint64_t seed,
                            Coding coding = Coding::fuzzy);

/// Redraws the fuzzy values from the stored binary codes (per-epoch resampling).
void refuzzify(FuzzyDataset& dataset, std::uint64_t seed);

/// Sets mu to `feature_mask` (a subset of the currently observed cells) and
/// zeroes the newly missing blocks.
void apply_feature_mask(FuzzyDataset& dataset, const MatrixXd& feature_mask);

FuzzyDataset select_rows(const FuzzyDataset& dataset, std::span<const std::size_t> rows);

std::vector<RawRecord> decode_dataset(const FuzzyDataset& dataset);

}  // namespace cgain
