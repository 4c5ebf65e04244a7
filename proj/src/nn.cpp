#include "cgain/nn.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "cgain/error.hpp"

namespace cgain {
namespace {

void check_blocks(const DenseLayer& layer, std::size_t index) {
    if (layer.activation != Activation::blockwise) return;
    std::size_t next = 0;
    for (const auto& b : layer.blocks) {
        if (b.offset != next || b.width == 0) {
            throw DimensionError("layer " + std::to_string(index) + ": head blocks do not partition the outputs");
        }
        next += b.width;
    }
    if (next != layer.outputs()) {
        throw DimensionError("layer " + std::to_string(index) + ": head blocks cover " + std::to_string(next) +
                             " of " + std::to_string(layer.outputs()) + " outputs");
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// d loss / d pre-activation, given d loss / d output and the layer output.
MatrixXd activation_backward(const DenseLayer& layer, const MatrixXd& out, const MatrixXd& grad) {
    switch (layer.activation) {
        case Activation::linear: return grad;
        case Activation::relu: return (out.array() > 0.0).select(grad, 0.0);
        case Activation::sigmoid: return grad.array() * out.array() * (1.0 - out.array());
        case Activation::tanh: return grad.array() * (1.0 - out.array().square());
        case Activation::blockwise: {
            MatrixXd dz(grad.rows(), grad.cols());
            for (const auto& b : layer.blocks) {
                const auto off = static_cast<Eigen::Index>(b.offset);
                const auto w = static_cast<Eigen::Index>(b.width);
                const auto s = out.middleCols(off, w).array();
                const auto g = grad.middleCols(off, w).array();
                if (b.kind == HeadKind::sigmoid) {
                    dz.middleCols(off, w) = g * s * (1.0 - s);
                } else {
                    const VectorXd inner = (g * s).rowwise().sum();
                    dz.middleCols(off, w) = s * (g.colwise() - inner.array());
                }
            }
            return dz;
        }
    }
    return grad;
}

}  // namespace

void activate(MatrixXd& z, Activation activation, std::span<const HeadBlock> blocks) {
    switch (activation) {
        case Activation::linear: return;
        case Activation::relu: z = z.cwiseMax(0.0); return;
        case Activation::sigmoid: z = z.unaryExpr(&sigmoid); return;
        case Activation::tanh: z = z.array().tanh(); return;
        case Activation::blockwise:
            for (const auto& b : blocks) {
                auto block = z.middleCols(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.width));
                if (b.kind == HeadKind::sigmoid) {
                    block = block.unaryExpr(&sigmoid);
                } else {
                    const VectorXd row_max = block.rowwise().maxCoeff();
                    block = (block.colwise() - row_max).array().exp().matrix();
                    const VectorXd row_sum = block.rowwise().sum();
                    block = block.array().colwise() / row_sum.array();
                }
            }
            return;
    }
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (static_cast<std::size_t>(layer.bias.size()) != layer.outputs()) {
            throw DimensionError("layer " + std::to_string(l) + ": bias length does not match outputs");
        }
        if (l > 0 && layers_[l - 1].outputs() != layer.inputs()) {
            throw DimensionError("layer " + std::to_string(l) + ": expects " + std::to_string(layer.inputs()) +
                                 " inputs, previous layer has " + std::to_string(layers_[l - 1].outputs()) +
                                 " outputs");
        }
        check_blocks(layer, l);
    }
}

Mlp Mlp::glorot(std::span<const std::size_t> widths, std::span<const Activation> activations,
                std::vector<HeadBlock> head, Rng& rng) {
    if (widths.size() != activations.size() + 1) {
        throw DimensionError("glorot: need one more width than activations");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < activations.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(widths[l]);
        const auto out = static_cast<Eigen::Index>(widths[l + 1]);
        const double a = std::sqrt(6.0 / static_cast<double>(in + out));
        DenseLayer layer;
        layer.weights.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r) {
            for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = rng.uniform(-a, a);
        }
        layer.bias = VectorXd::Zero(out);
        layer.activation = activations[l];
        if (layer.activation == Activation::blockwise) layer.blocks = head;
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

std::size_t Mlp::input_width() const { return layers_.empty() ? 0 : layers_.front().inputs(); }
std::size_t Mlp::output_width() const { return layers_.empty() ? 0 : layers_.back().outputs(); }

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

MatrixXd Mlp::forward(const MatrixXd& batch) const {
    if (static_cast<std::size_t>(batch.cols()) != input_width()) {
        throw DimensionError("forward: input width " + std::to_string(batch.cols()) + ", network expects " +
                             std::to_string(input_width()));
    }
    MatrixXd x = batch;
    for (const auto& layer : layers_) {
        MatrixXd z = x * layer.weights.transpose();
        z.rowwise() += layer.bias.transpose();
        activate(z, layer.activation, layer.blocks);
        x = std::move(z);
    }
    return x;
}

MatrixXd Mlp::forward(const MatrixXd& batch, ForwardCache& cache) const {
    if (static_cast<std::size_t>(batch.cols()) != input_width()) {
        throw DimensionError("forward: input width " + std::to_string(batch.cols()) + ", network expects " +
                             std::to_string(input_width()));
    }
    cache.inputs.clear();
    cache.outputs.clear();
    cache.owner = this;
    cache.version = version_;
    const MatrixXd* x = &batch;
    for (const auto& layer : layers_) {
        cache.inputs.push_back(*x);
        MatrixXd z = *x * layer.weights.transpose();
        z.rowwise() += layer.bias.transpose();
        activate(z, layer.activation, layer.blocks);
        cache.outputs.push_back(std::move(z));
        x = &cache.outputs.back();
    }
    return cache.outputs.back();
}

Gradients Mlp::backward(const ForwardCache& cache, const MatrixXd& grad_output) const {
    if (cache.owner != this || cache.version != version_ || cache.outputs.size() != layers_.size()) {
        throw Error("backward: forward cache is stale or belongs to another network");
    }
    if (grad_output.rows() != cache.outputs.back().rows() ||
        static_cast<std::size_t>(grad_output.cols()) != output_width()) {
        throw DimensionError("backward: output gradient shape does not match the cached forward pass");
    }
    Gradients grads;
    grads.layers.resize(layers_.size());
    MatrixXd grad = grad_output;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const MatrixXd dz = activation_backward(layer, cache.outputs[l], grad);
        grads.layers[l].weights = dz.transpose() * cache.inputs[l];
        grads.layers[l].bias = dz.colwise().sum().transpose();
        grad = dz * layer.weights;
    }
    grads.input = std::move(grad);
    return grads;
}

VectorXd Mlp::parameters() const {
    VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (const auto& l : layers_) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) flat(k++) = l.weights(r, c);
        }
        flat.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return flat;
}

void Mlp::set_parameters(const VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
        throw DimensionError("set_parameters: expected " + std::to_string(parameter_count()) + " values");
    }
    Eigen::Index k = 0;
    for (auto& l : layers_) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = flat(k++);
        }
        l.bias = flat.segment(k, l.bias.size());
        k += l.bias.size();
    }
    ++version_;
}

void Mlp::add_to_layer(std::size_t layer, const MatrixXd& weight_delta, const VectorXd& bias_delta) {
    auto& l = layers_.at(layer);
    l.weights += weight_delta;
    l.bias += bias_delta;
    ++version_;
}

Adam::Adam(const Mlp& model, AdamConfig config) : config_(config) {
    for (const auto& l : model.layers()) {
        first_.push_back({MatrixXd::Zero(l.weights.rows(), l.weights.cols()), VectorXd::Zero(l.bias.size())});
        second_.push_back(first_.back());
    }
}

void Adam::step(Mlp& model, const Gradients& grads, std::size_t epoch) {
    if (grads.layers.size() != first_.size()) throw DimensionError("Adam::step: gradient/layer count mismatch");
    for (const auto& g : grads.layers) {
        if (!g.weights.allFinite() || !g.bias.allFinite()) throw DivergenceError("non-finite gradient", epoch);
    }
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    for (std::size_t l = 0; l < first_.size(); ++l) {
        const auto& g = grads.layers[l];
        auto& m = first_[l];
        auto& v = second_[l];
        m.weights = b1 * m.weights + (1.0 - b1) * g.weights;
        m.bias = b1 * m.bias + (1.0 - b1) * g.bias;
        v.weights = b2 * v.weights + (1.0 - b2) * g.weights.cwiseAbs2();
        v.bias = b2 * v.bias + (1.0 - b2) * g.bias.cwiseAbs2();
        const MatrixXd dw = -lr * (m.weights / c1).array() / ((v.weights / c2).array().sqrt() + eps);
        const VectorXd db = -lr * (m.bias / c1).array() / ((v.bias / c2).array().sqrt() + eps);
        model.add_to_layer(l, dw, db);
    }
}

// Serialization -------------------------------------------------------------

namespace {

constexpr char magic[8] = {'C', 'G', 'A', 'I', 'N', 'M', 'D', 'L'};

void write_u32(std::ostream& out, std::uint32_t x) { out.write(reinterpret_cast<const char*>(&x), sizeof x); }

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t x = 0;
    if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) throw ParseError("model file truncated");
    return x;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read_u32(in);
    if (n > 4096) throw ParseError("model file corrupt (string length)");
    std::string s(n, '\0');
    if (!in.read(s.data(), n)) throw ParseError("model file truncated");
    return s;
}

}  // namespace

void write_f64(std::ostream& out, double x) { out.write(reinterpret_cast<const char*>(&x), sizeof x); }

double read_f64(std::istream& in) {
    double x = 0.0;
    if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) throw ParseError("model file truncated");
    return x;
}

void write_u64(std::ostream& out, std::uint64_t x) { out.write(reinterpret_cast<const char*>(&x), sizeof x); }

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t x = 0;
    if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) throw ParseError("model file truncated");
    return x;
}

void write_model_header(std::ostream& out, const std::string& kind, std::uint64_t schema_hash) {
    out.write(magic, sizeof magic);
    write_u32(out, model_format_version);
    write_string(out, kind);
    write_u64(out, schema_hash);
}

void read_model_header(std::istream& in, const std::string& kind, std::uint64_t expected_schema_hash) {
    char buf[sizeof magic];
    if (!in.read(buf, sizeof buf) || std::memcmp(buf, magic, sizeof magic) != 0) {
        throw ParseError("not a model file (bad magic)");
    }
    if (const auto v = read_u32(in); v != model_format_version) {
        throw ParseError("unsupported model format version " + std::to_string(v));
    }
    if (const auto k = read_string(in); k != kind) throw ParseError("model kind '" + k + "', expected '" + kind + "'");
    if (const auto h = read_u64(in); h != expected_schema_hash) {
        throw SchemaError("model was trained on a different schema (hash mismatch)");
    }
}

void write_mlp(std::ostream& out, const Mlp& mlp) {
    write_u32(out, static_cast<std::uint32_t>(mlp.layers().size()));
    for (const auto& l : mlp.layers()) {
        write_u64(out, l.inputs());
        write_u64(out, l.outputs());
        write_u32(out, static_cast<std::uint32_t>(l.activation));
        write_u32(out, static_cast<std::uint32_t>(l.blocks.size()));
        for (const auto& b : l.blocks) {
            write_u64(out, b.offset);
            write_u64(out, b.width);
            write_u32(out, static_cast<std::uint32_t>(b.kind));
        }
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) write_f64(out, l.weights(r, c));
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) write_f64(out, l.bias(r));
    }
}

Mlp read_mlp(std::istream& in) {
    const auto count = read_u32(in);
    if (count > 64) throw ParseError("model file corrupt (layer count)");
    std::vector<DenseLayer> layers;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto inputs = read_u64(in);
        const auto outputs = read_u64(in);
        if (inputs > (1u << 20) || outputs > (1u << 20)) throw ParseError("model file corrupt (layer size)");
        DenseLayer l;
        const auto act = read_u32(in);
        if (act > static_cast<std::uint32_t>(Activation::blockwise)) throw ParseError("unknown activation tag");
        l.activation = static_cast<Activation>(act);
        const auto nblocks = read_u32(in);
        if (nblocks > outputs) throw ParseError("model file corrupt (block count)");
        for (std::uint32_t b = 0; b < nblocks; ++b) {
            HeadBlock block;
            block.offset = read_u64(in);
            block.width = read_u64(in);
            const auto kind = read_u32(in);
            if (kind > static_cast<std::uint32_t>(HeadKind::sigmoid)) throw ParseError("unknown head tag");
            block.kind = static_cast<HeadKind>(kind);
            l.blocks.push_back(block);
        }
        l.weights.resize(static_cast<Eigen::Index>(outputs), static_cast<Eigen::Index>(inputs));
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = read_f64(in);
        }
        l.bias.resize(static_cast<Eigen::Index>(outputs));
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = read_f64(in);
        layers.push_back(std::move(l));
    }
    return Mlp(std::move(layers));
}

}  // namespace cgain
