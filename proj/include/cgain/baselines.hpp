#pragma once

// Comparison imputers. All of them work on the coded matrix of a dataset,
// return continuous values (no argmax) and leave observed slots untouched.

#include <cstdint>
#include <vector>

#include "cgain/codec.hpp"
#include "cgain/nn.hpp"

namespace cgain {

/// Per-column mean over the observed slots. A column without observed
/// slots falls back to 1/q for multiclass blocks and 0.5 otherwise.
VectorXd column_means(const FuzzyDataset& train);

/// Copies `data.values` with every missing slot set to the column mean.
MatrixXd prefill(const FuzzyDataset& data, const VectorXd& means);

/// Observed slots of `data.values` overwrite those of `imputed`.
MatrixXd restore_observed(const MatrixXd& imputed, const FuzzyDataset& data);

MatrixXd no_impute(const FuzzyDataset& target);

/// Missing slots of `target` receive the column means of `train`.
MatrixXd avg_impute(const FuzzyDataset& train, const FuzzyDataset& target);

struct SvdImputer {
    std::size_t rank = 0;
    VectorXd means;             // pre-fill values
    VectorXd singular_values;   // all of them, non-increasing
    MatrixXd left;              // U_r, n x r
    MatrixXd components;        // D_r V_r^T, r x Q
    MatrixXd components_pinv;   // (D_r V_r^T)^+, Q x r
};

/// Decomposes an already pre-filled training matrix.
SvdImputer svd_fit(const MatrixXd& prefilled, std::size_t rank);
/// Pre-fills with the training column means, then decomposes.
SvdImputer svd_fit(const FuzzyDataset& train, std::size_t rank);

/// U_r D_r V_r^T with observed slots restored.
MatrixXd svd_impute_train(const SvdImputer& imputer, const FuzzyDataset& train);
/// X_te (D_r V_r^T)^+ (D_r V_r^T) on the pre-filled test matrix, observed slots restored.
MatrixXd svd_impute_test(const SvdImputer& imputer, const FuzzyDataset& test);

/// The row-space projector (D_r V_r^T)^+ (D_r V_r^T), Q x Q.
MatrixXd svd_projector(const SvdImputer& imputer);

struct AutoencoderConfig {
    std::size_t epochs = 500;
    std::size_t batch_size = 64;
    AdamConfig optimizer;
    std::uint64_t seed = 0;
};

struct AutoencoderImputer {
    FeatureSchema schema;
    Mlp network;  // Q -> r (tanh) -> Q (softmax/sigmoid heads per feature)
    VectorXd means;
    std::vector<double> loss_trace;  // mean reconstruction loss per epoch
};

/// Trains on mean-pre-filled rows to reconstruct the observed slots
/// (masked cross-entropy, the same per-kind loss as the GAIN similarity term).
AutoencoderImputer ae_fit(const FuzzyDataset& train, std::size_t rank, const AutoencoderConfig& config);
MatrixXd ae_impute(const AutoencoderImputer& imputer, const FuzzyDataset& target);

}  // namespace cgain
