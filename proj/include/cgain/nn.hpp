#pragma once

// Dense feed-forward networks with hand-written backpropagation and an
// adaptive-moment optimizer. Batches are row-major in the sense that each
// row of a batch matrix is one sample.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgain/random.hpp"

namespace cgain {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation { linear, relu, sigmoid, tanh, blockwise };

enum class HeadKind { softmax, sigmoid };

/// A contiguous group of output units sharing one head activation.
struct HeadBlock {
    std::size_t offset = 0;
    std::size_t width = 0;
    HeadKind kind = HeadKind::sigmoid;

    bool operator==(const HeadBlock&) const = default;
};

struct DenseLayer {
    MatrixXd weights;  // outputs x inputs
    VectorXd bias;
    Activation activation = Activation::linear;
    /// Only for Activation::blockwise: an ordered partition of the outputs.
    std::vector<HeadBlock> blocks;

    std::size_t inputs() const noexcept { return static_cast<std::size_t>(weights.cols()); }
    std::size_t outputs() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

struct LayerGradient {
    MatrixXd weights;
    VectorXd bias;
};

struct Gradients {
    std::vector<LayerGradient> layers;
    MatrixXd input;  // d loss / d input, batch x input width
};

class Mlp;

struct ForwardCache {
    std::vector<MatrixXd> inputs;   // input to layer l
    std::vector<MatrixXd> outputs;  // post-activation output of layer l
    const Mlp* owner = nullptr;
    std::uint64_t version = 0;
};

class Mlp {
public:
    Mlp() = default;
    /// Throws DimensionError when adjacent widths disagree or a blockwise
    /// layer's blocks do not partition its outputs.
    explicit Mlp(std::vector<DenseLayer> layers);

    /// Weights ~ U(-a, a) with a = sqrt(6 / (fan_in + fan_out)); zero biases.
    /// `widths` has one more entry than `activations`. `head` is used by a
    /// blockwise final layer.
    static Mlp glorot(std::span<const std::size_t> widths, std::span<const Activation> activations,
                      std::vector<HeadBlock> head, Rng& rng);

    std::size_t input_width() const;
    std::size_t output_width() const;
    std::size_t parameter_count() const;
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    MatrixXd forward(const MatrixXd& batch) const;
    MatrixXd forward(const MatrixXd& batch, ForwardCache& cache) const;

    /// Gradients of a loss whose derivative w.r.t. the network output is
    /// `grad_output` (batch x output width), summed over the batch. Throws
    /// Error when `cache` came from another network or older parameters.
    Gradients backward(const ForwardCache& cache, const MatrixXd& grad_output) const;

    /// Flattened parameters: per layer, weights row-major then bias.
    VectorXd parameters() const;
    void set_parameters(const VectorXd& flat);

    /// Adds the deltas to one layer's parameters; used by optimizers.
    void add_to_layer(std::size_t layer, const MatrixXd& weight_delta, const VectorXd& bias_delta);

    std::uint64_t version() const noexcept { return version_; }

private:
    std::vector<DenseLayer> layers_;
    std::uint64_t version_ = 0;
};

/// Applies a layer activation in place to a batch of pre-activations.
void activate(MatrixXd& z, Activation activation, std::span<const HeadBlock> blocks);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam() = default;
    Adam(const Mlp& model, AdamConfig config);

    /// One bias-corrected update. Throws DivergenceError (tagged with
    /// `epoch`) if a gradient is not finite; parameters stay untouched then.
    void step(Mlp& model, const Gradients& grads, std::size_t epoch = 0);

    std::size_t steps() const noexcept { return steps_; }
    const AdamConfig& config() const noexcept { return config_; }

private:
    AdamConfig config_;
    std::size_t steps_ = 0;
    std::vector<LayerGradient> first_;
    std::vector<LayerGradient> second_;
};

// Binary model files: "CGAIN" magic, format version, a kind tag, the schema
// hash, then one or more serialized networks (layer dimensions, activation
// tags, head blocks, row-major float64 parameters).

inline constexpr std::uint32_t model_format_version = 1;

void write_model_header(std::ostream& out, const std::string& kind, std::uint64_t schema_hash);
/// Throws ParseError on bad magic, version or kind, and SchemaError when the
/// stored hash differs from `expected_schema_hash`.
void read_model_header(std::istream& in, const std::string& kind, std::uint64_t expected_schema_hash);

void write_mlp(std::ostream& out, const Mlp& mlp);
Mlp read_mlp(std::istream& in);

void write_f64(std::ostream& out, double x);
double read_f64(std::istream& in);
void write_u64(std::ostream& out, std::uint64_t x);
std::uint64_t read_u64(std::istream& in);

}  // namespace cgain
