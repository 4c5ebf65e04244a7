#pragma once

// Benchmark protocol: MCAR feature masking, k-fold cross-validation, ridge
// logistic regression on imputed features, accuracy and AUROC per fold.
// Imputers are fitted on the masked training fold only and applied to both
// folds.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgain/baselines.hpp"
#include "cgain/codec.hpp"
#include "cgain/gain.hpp"

namespace cgain {

enum class Method { complete, most_popular, random, no_imputation, average, svd, autoencoder, gain };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
/// complete, most_popular and random ignore masking and are reported once.
bool is_sanity_method(Method method);

struct MaskingPlan {
    double proportion = 0.0;
    std::uint64_t seed = 0;
};

struct MaskedCell {
    std::size_t row = 0;
    std::size_t feature = 0;
    VectorXd values;  // coded block before masking
    VectorXd binary;
};

struct MaskedDataset {
    FuzzyDataset dataset;
    std::vector<MaskedCell> truth;
};

/// Each observed feature cell is masked independently with probability
/// plan.proportion. Returns the new per-feature mask (n x p).
MatrixXd sample_feature_mask(const FuzzyDataset& dataset, const MaskingPlan& plan);
MaskedDataset mask_dataset(const FuzzyDataset& dataset, const MaskingPlan& plan);

/// k disjoint folds covering [0, n), sizes differing by at most one.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct BenchmarkConfig {
    std::vector<Method> methods;
    std::vector<double> proportions;
    std::size_t folds = 5;
    double ridge = 1.0;
    /// Candidate ranks for SVD and auto-encoder; the best one per fold is
    /// chosen by AUROC on a validation split of the training fold.
    std::vector<std::size_t> ranks{4, 8, 16, 32};
    double validation_fraction = 0.2;
    GainConfig gain;
    std::size_t imputations = 100;
    /// Score GAIN on per-cell majority completions instead of averaging
    /// metrics over the individual draws.
    bool modal_completion = false;
    AutoencoderConfig autoencoder;
    std::uint64_t seed = 0;
    /// Concurrent cells; 0 means hardware concurrency.
    std::size_t threads = 0;
};

struct ReportRow {
    std::optional<double> proportion;  // empty for sanity rows
    std::string method;
    std::string metric;  // "accuracy" or "auroc"
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> fold_values;
    std::string error;  // non-empty when the cell failed
    std::string note;   // e.g. chosen ranks per fold
};

struct EvalReport {
    std::vector<ReportRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    bool has_errors() const;
    const ReportRow* find(std::optional<double> proportion, std::string_view method, std::string_view metric) const;
};

/// Per-fold split of the coded data for one masking proportion.
struct FoldData {
    FuzzyDataset fuzzy_train, fuzzy_test;
    FuzzyDataset hard_train, hard_test;
    std::vector<int> train_labels, test_labels;
};

struct CellResult {
    double accuracy = 0.0;
    double auroc = 0.0;
    /// Everything fitted on the training fold: imputer and downstream
    /// parameters, flattened. Used by the leakage audit.
    std::vector<double> fitted;
    std::string note;
};

/// Fits `method` on the training half of `fold` and scores the test half.
CellResult evaluate_method(Method method, const FoldData& fold, const BenchmarkConfig& config,
                           std::uint64_t cell_seed);

/// Masks the data for (fold, proportion) with the run's substreams and splits it.
FoldData make_fold(const FuzzyDataset& fuzzy, const FuzzyDataset& hard, std::span<const int> labels,
                   const std::vector<std::vector<std::size_t>>& folds, std::size_t fold, double proportion,
                   std::uint64_t seed);

EvalReport run_benchmark(std::span<const RawRecord> records, const FeatureSchema& schema, std::span<const int> labels,
                         const BenchmarkConfig& config);

struct AuditResult {
    Method method;
    bool passed = false;
    std::string detail;
};

/// For each configured method: fit on fold 0 with the original test fold,
/// then again with the test rows scrambled (values and labels), and compare
/// the fitted parameters bit for bit.
std::vector<AuditResult> audit_leakage(std::span<const RawRecord> records, const FeatureSchema& schema,
                                       std::span<const int> labels, const BenchmarkConfig& config,
                                       double proportion);

/// Adversarial loss traces of the same masked data under fuzzy and hard
/// coding. Both runs share the mask and the network initialization. A run
/// that diverges keeps its partial trace, ends in a NaN row and records the
/// reason in `*_error`.
struct LossCurves {
    TrainTrace fuzzy, hard;
    std::string fuzzy_error, hard_error;
};

LossCurves loss_curves(std::span<const RawRecord> records, const FeatureSchema& schema, double proportion,
                       const GainConfig& gain, std::uint64_t seed);

/// Columns `proportion,method,metric,mean,sd,fold_values`; fold values are
/// ';'-separated, failed cells carry "error: ..." there.
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_json(std::ostream& out, const EvalReport& report);

}  // namespace cgain
