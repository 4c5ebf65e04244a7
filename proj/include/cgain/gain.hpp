#pragma once

// Categorical generative adversarial imputation.
//
// The generator sees [x + (1 - m) * r, m]: coded values with random seeds in
// the missing blocks, plus the column mask. It has three relu hidden layers
// and one head per feature (softmax for multiclass, sigmoid for multilabel
// and numeric). Observed blocks of its output are overwritten with the real
// values before anything downstream sees them.
//
// The discriminator sees [g, h] and predicts one probability per feature
// that the feature is real. The hint h equals the mask except for a sampled
// subset of features whose whole blocks are set to 0.5.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgain/codec.hpp"
#include "cgain/error.hpp"
#include "cgain/nn.hpp"

namespace cgain {

/// Probabilities are clamped into [eps, 1 - eps] before any logarithm.
inline constexpr double probability_clamp = 1e-7;

struct SeedBounds {
    double low = 0.0;
    double high = 1.0;
};

struct GainConfig {
    /// Empty means three layers of width 2Q.
    std::vector<std::size_t> generator_hidden;
    /// Empty means two layers of width 2Q.
    std::vector<std::size_t> discriminator_hidden;
    std::size_t epochs = 500;
    std::size_t batch_size = 64;
    double hint_rate = 0.1;
    /// Weight of the similarity loss in the generator objective.
    double lambda = 1.0;
    SeedBounds seeds;
    AdamConfig optimizer;
    /// Restrict the adversarial losses to the features whose hint was
    /// neutralized. With false, every feature contributes.
    bool hinted_loss_only = true;
    /// Redraw the fuzzy codes before every epoch instead of once.
    bool refuzzify_each_epoch = false;
    std::uint64_t seed = 0;
};

struct GainModel {
    FeatureSchema schema;
    Mlp generator;
    Mlp discriminator;
    double hint_rate = 0.1;
    double lambda = 1.0;
    SeedBounds seeds;
};

/// One head block per feature, matching the schema's block layout.
std::vector<HeadBlock> generator_heads(const FeatureSchema& schema);

/// Builds both networks with Glorot-uniform weights from derive_seed(config.seed, "init").
GainModel make_gain_model(const FeatureSchema& schema, const GainConfig& config);

/// i.i.d. uniform draws within `bounds`, one per column of `mask`. Only
/// positions with mask 0 ever reach the generator.
VectorXd sample_seeds(const VectorRef& mask, const SeedBounds& bounds, Rng& rng);

struct GeneratorOutput {
    MatrixXd raw;       // head outputs before the observed values are restored
    MatrixXd combined;  // m * x + (1 - m) * raw
};

/// Batch form; rows of x, m and seeds are samples.
GeneratorOutput generator_forward(const GainModel& model, const MatrixXd& x, const MatrixXd& mask,
                                  const MatrixXd& seeds);
VectorXd generate_row(const GainModel& model, const VectorRef& x, const VectorRef& mask, const VectorRef& seeds);

struct Hint {
    VectorXd values;       // width Q, entries in {0, 0.5, 1}
    VectorXd neutralized;  // width p, 1 where the feature's block was set to 0.5
};

/// Exactly round(hint_rate * p) features, drawn without replacement, get
/// their whole block set to 0.5; other blocks copy the mask.
Hint sample_hints(const VectorRef& mask, const FeatureSchema& schema, double hint_rate, Rng& rng);

/// Returns a batch x p matrix of probabilities.
MatrixXd discriminator_forward(const GainModel& model, const MatrixXd& combined, const MatrixXd& hints);
VectorXd discriminate_row(const GainModel& model, const VectorRef& combined, const VectorRef& hint);

/// -sum_j w_j [mu_j log(p_j) + (1 - mu_j) log(1 - p_j)]; w defaults to ones.
double loss_d(const VectorRef& feature_mask, const VectorRef& predicted);
double loss_d(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights);

/// -sum_j w_j (1 - mu_j) log(p_j): only generated features contribute.
double loss_g(const VectorRef& feature_mask, const VectorRef& predicted);
double loss_g(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights);

/// Reconstruction loss of the raw generator output on observed blocks:
/// cross-entropy -x.log(g) for multiclass blocks, Bernoulli log-loss for
/// multilabel blocks, squared error for numeric blocks.
double loss_sim(const VectorRef& x, const VectorRef& raw, const VectorRef& mask, const FeatureSchema& schema);

/// d loss_d / d predicted (and likewise for loss_g, loss_sim w.r.t. raw).
/// Zero where the clamp is active.
VectorXd loss_d_gradient(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights);
VectorXd loss_g_gradient(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights);
VectorXd loss_sim_gradient(const VectorRef& x, const VectorRef& raw, const VectorRef& mask,
                           const FeatureSchema& schema);

/// One minibatch in training layout; rows are samples. `weights` (b x p)
/// selects which features enter the adversarial losses.
struct GainBatch {
    MatrixXd x, mask, feature_mask, seeds, hints, weights;
};

struct BatchGradients {
    Gradients grads;       // of the batch-mean objective
    double loss_sum = 0.0;  // adversarial loss summed over rows
    double sim_sum = 0.0;   // similarity loss summed over rows (generator only)
};

/// Gradient of mean loss_d over the batch w.r.t. the discriminator.
BatchGradients discriminator_gradients(const GainModel& model, const GainBatch& batch);
/// Gradient of mean (loss_g + lambda * loss_sim) w.r.t. the generator,
/// back-propagated through the discriminator and the pass-through.
BatchGradients generator_gradients(const GainModel& model, const GainBatch& batch);

struct TrainTrace {
    std::vector<double> loss_d;
    std::vector<double> loss_g;
    std::vector<double> loss_sim;

    std::size_t epochs() const noexcept { return loss_d.size(); }
};

/// `epoch,loss_d,loss_g,loss_sim` with one row per epoch.
/// Ends a diverged trace with a NaN row unless its last row is already non-finite.
void close_diverged_trace(TrainTrace& trace);

void write_trace_csv(std::ostream& out, const TrainTrace& trace);

class TrainingDiverged : public DivergenceError {
public:
    TrainingDiverged(const std::string& what, std::size_t epoch, TrainTrace trace)
        : DivergenceError(what, epoch), trace_(std::move(trace)) {}

    const TrainTrace& trace() const noexcept { return trace_; }

private:
    TrainTrace trace_;
};

/// Alternating minibatch training: per batch one discriminator step on
/// loss_d, then one generator step on loss_g + lambda * loss_sim. Losses are
/// averaged over rows; the trace holds per-epoch means. Deterministic for a
/// fixed config.seed. Throws TrainingDiverged on a non-finite loss or
/// gradient.
TrainTrace train(GainModel& model, const FuzzyDataset& data, const GainConfig& config);

struct ImputationResult {
    /// k completed datasets; observed cells equal the input.
    std::vector<std::vector<RawRecord>> draws;
    /// Hard binary codes of each completion (n x Q), for downstream models.
    std::vector<MatrixXd> coded;
    /// Per cell: most frequent value across the draws and its frequency.
    std::vector<RawRecord> modal;
    MatrixXd agreement;  // n x p, 1 for observed cells
};

/// k completions with seeds from derive_seed(seed, "impute", draw).
ImputationResult impute(const GainModel& model, const FuzzyDataset& data, std::size_t k, std::uint64_t seed);

void save_gain_model(std::ostream& out, const GainModel& model);
GainModel load_gain_model(std::istream& in, const FeatureSchema& schema);
void save_gain_model(const std::string& path, const GainModel& model);
GainModel load_gain_model(const std::string& path, const FeatureSchema& schema);

}  // namespace cgain
