#include "cgain/gain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

namespace cgain {
namespace {

constexpr double eps = probability_clamp;

double clamp_probability(double p) { return std::clamp(p, eps, 1.0 - eps); }
bool clamped(double p) { return p < eps || p > 1.0 - eps; }

void check_width(Eigen::Index got, std::size_t want, const char* what) {
    if (static_cast<std::size_t>(got) != want) {
        throw DimensionError(std::string(what) + ": width " + std::to_string(got) + ", expected " +
                             std::to_string(want));
    }
}

MatrixXd concat_columns(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

std::vector<std::size_t> hidden_or_default(const std::vector<std::size_t>& hidden, std::size_t layers,
                                           std::size_t q) {
    if (!hidden.empty()) return hidden;
    return std::vector<std::size_t>(layers, 2 * q);
}

// Numeric cells are compared on a 0.01 grid when counting agreement.
CellValue agreement_key(const CellValue& v) {
    if (const auto* x = std::get_if<double>(&v)) return std::round(*x * 100.0) / 100.0;
    return v;
}

struct CellLess {
    bool operator()(const CellValue& a, const CellValue& b) const {
        if (a.index() != b.index()) return a.index() < b.index();
        switch (a.index()) {
            case 1: return std::get<1>(a) < std::get<1>(b);
            case 2: return std::get<2>(a) < std::get<2>(b);
            case 3: return std::get<3>(a) < std::get<3>(b);
            default: return false;
        }
    }
};

}  // namespace

std::vector<HeadBlock> generator_heads(const FeatureSchema& schema) {
    std::vector<HeadBlock> heads;
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const bool softmax = schema.feature(j).kind == FeatureKind::multiclass;
        heads.push_back({schema.offset(j), schema.width(j), softmax ? HeadKind::softmax : HeadKind::sigmoid});
    }
    return heads;
}

GainModel make_gain_model(const FeatureSchema& schema, const GainConfig& config) {
    const std::size_t q = schema.total_width();
    const std::size_t p = schema.feature_count();
    if (q == 0) throw SchemaError("cannot build a model for an empty schema");
    Rng rng(derive_seed(config.seed, "init"));

    std::vector<std::size_t> gw{2 * q};
    const auto gh = hidden_or_default(config.generator_hidden, 3, q);
    gw.insert(gw.end(), gh.begin(), gh.end());
    gw.push_back(q);
    std::vector<Activation> ga(gh.size(), Activation::relu);
    ga.push_back(Activation::blockwise);

    std::vector<std::size_t> dw{2 * q};
    const auto dh = hidden_or_default(config.discriminator_hidden, 2, q);
    dw.insert(dw.end(), dh.begin(), dh.end());
    dw.push_back(p);
    std::vector<Activation> da(dh.size(), Activation::relu);
    da.push_back(Activation::sigmoid);

    GainModel model;
    model.schema = schema;
    model.generator = Mlp::glorot(gw, ga, generator_heads(schema), rng);
    model.discriminator = Mlp::glorot(dw, da, {}, rng);
    model.hint_rate = config.hint_rate;
    model.lambda = config.lambda;
    model.seeds = config.seeds;
    return model;
}

VectorXd sample_seeds(const VectorRef& mask, const SeedBounds& bounds, Rng& rng) {
    VectorXd r(mask.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) r(k) = rng.uniform(bounds.low, bounds.high);
    return r;
}

GeneratorOutput generator_forward(const GainModel& model, const MatrixXd& x, const MatrixXd& mask,
                                  const MatrixXd& seeds) {
    const std::size_t q = model.schema.total_width();
    check_width(x.cols(), q, "generator_forward (values)");
    check_width(mask.cols(), q, "generator_forward (mask)");
    check_width(seeds.cols(), q, "generator_forward (seeds)");
    const MatrixXd seeded = x.array() + (1.0 - mask.array()) * seeds.array();
    GeneratorOutput out;
    out.raw = model.generator.forward(concat_columns(seeded, mask));
    out.combined = mask.array() * x.array() + (1.0 - mask.array()) * out.raw.array();
    return out;
}

VectorXd generate_row(const GainModel& model, const VectorRef& x, const VectorRef& mask, const VectorRef& seeds) {
    return generator_forward(model, MatrixXd(x.transpose()), MatrixXd(mask.transpose()), MatrixXd(seeds.transpose()))
        .combined.row(0)
        .transpose();
}

Hint sample_hints(const VectorRef& mask, const FeatureSchema& schema, double hint_rate, Rng& rng) {
    if (!(hint_rate >= 0.0 && hint_rate <= 1.0)) throw Error("hint_rate must lie in [0, 1]");
    check_width(mask.size(), schema.total_width(), "sample_hints");
    const std::size_t p = schema.feature_count();
    const auto chosen = static_cast<std::size_t>(std::round(hint_rate * static_cast<double>(p)));

    // Partial Fisher-Yates: the first `chosen` entries are a uniform sample.
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < chosen; ++i) std::swap(order[i], order[i + rng.index(p - i)]);

    Hint hint{mask, VectorXd::Zero(static_cast<Eigen::Index>(p))};
    for (std::size_t i = 0; i < chosen; ++i) {
        const std::size_t j = order[i];
        hint.neutralized(static_cast<Eigen::Index>(j)) = 1.0;
        hint.values.segment(static_cast<Eigen::Index>(schema.offset(j)), static_cast<Eigen::Index>(schema.width(j)))
            .setConstant(0.5);
    }
    return hint;
}

MatrixXd discriminator_forward(const GainModel& model, const MatrixXd& combined, const MatrixXd& hints) {
    const std::size_t q = model.schema.total_width();
    check_width(combined.cols(), q, "discriminator_forward (values)");
    check_width(hints.cols(), q, "discriminator_forward (hints)");
    return model.discriminator.forward(concat_columns(combined, hints));
}

VectorXd discriminate_row(const GainModel& model, const VectorRef& combined, const VectorRef& hint) {
    return discriminator_forward(model, MatrixXd(combined.transpose()), MatrixXd(hint.transpose())).row(0).transpose();
}

double loss_d(const VectorRef& feature_mask, const VectorRef& predicted) {
    return loss_d(feature_mask, predicted, VectorXd::Ones(feature_mask.size()));
}

double loss_d(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights) {
    if (feature_mask.size() != predicted.size() || weights.size() != predicted.size()) {
        throw DimensionError("loss_d: length mismatch");
    }
    double loss = 0.0;
    for (Eigen::Index j = 0; j < predicted.size(); ++j) {
        const double p = clamp_probability(predicted(j));
        const double mu = feature_mask(j);
        loss -= weights(j) * (mu * std::log(p) + (1.0 - mu) * std::log(1.0 - p));
    }
    return loss;
}

double loss_g(const VectorRef& feature_mask, const VectorRef& predicted) {
    return loss_g(feature_mask, predicted, VectorXd::Ones(feature_mask.size()));
}

double loss_g(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights) {
    if (feature_mask.size() != predicted.size() || weights.size() != predicted.size()) {
        throw DimensionError("loss_g: length mismatch");
    }
    double loss = 0.0;
    for (Eigen::Index j = 0; j < predicted.size(); ++j) {
        loss -= weights(j) * (1.0 - feature_mask(j)) * std::log(clamp_probability(predicted(j)));
    }
    return loss;
}

double loss_sim(const VectorRef& x, const VectorRef& raw, const VectorRef& mask, const FeatureSchema& schema) {
    check_width(x.size(), schema.total_width(), "loss_sim (values)");
    check_width(raw.size(), schema.total_width(), "loss_sim (generated)");
    check_width(mask.size(), schema.total_width(), "loss_sim (mask)");
    double loss = 0.0;
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const auto off = static_cast<Eigen::Index>(schema.offset(j));
        const auto kind = schema.feature(j).kind;
        for (Eigen::Index k = off; k < off + static_cast<Eigen::Index>(schema.width(j)); ++k) {
            if (mask(k) == 0.0) continue;
            const double g = clamp_probability(raw(k));
            switch (kind) {
                case FeatureKind::multiclass: loss -= mask(k) * x(k) * std::log(g); break;
                case FeatureKind::multilabel:
                    loss -= mask(k) * (x(k) * std::log(g) + (1.0 - x(k)) * std::log(1.0 - g));
                    break;
                case FeatureKind::numeric: loss += mask(k) * (raw(k) - x(k)) * (raw(k) - x(k)); break;
            }
        }
    }
    return loss;
}

VectorXd loss_d_gradient(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights) {
    VectorXd grad = VectorXd::Zero(predicted.size());
    for (Eigen::Index j = 0; j < predicted.size(); ++j) {
        const double p = predicted(j);
        if (clamped(p)) continue;
        const double mu = feature_mask(j);
        grad(j) = -weights(j) * (mu / p - (1.0 - mu) / (1.0 - p));
    }
    return grad;
}

VectorXd loss_g_gradient(const VectorRef& feature_mask, const VectorRef& predicted, const VectorRef& weights) {
    VectorXd grad = VectorXd::Zero(predicted.size());
    for (Eigen::Index j = 0; j < predicted.size(); ++j) {
        const double p = predicted(j);
        if (clamped(p)) continue;
        grad(j) = -weights(j) * (1.0 - feature_mask(j)) / p;
    }
    return grad;
}

VectorXd loss_sim_gradient(const VectorRef& x, const VectorRef& raw, const VectorRef& mask,
                           const FeatureSchema& schema) {
    VectorXd grad = VectorXd::Zero(raw.size());
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const auto off = static_cast<Eigen::Index>(schema.offset(j));
        const auto kind = schema.feature(j).kind;
        for (Eigen::Index k = off; k < off + static_cast<Eigen::Index>(schema.width(j)); ++k) {
            if (mask(k) == 0.0) continue;
            const double g = raw(k);
            if (kind == FeatureKind::numeric) {
                grad(k) = 2.0 * mask(k) * (g - x(k));
                continue;
            }
            if (clamped(g)) continue;
            if (kind == FeatureKind::multiclass) {
                grad(k) = -mask(k) * x(k) / g;
            } else {
                grad(k) = -mask(k) * (x(k) / g - (1.0 - x(k)) / (1.0 - g));
            }
        }
    }
    return grad;
}

void close_diverged_trace(TrainTrace& trace) {
    if (trace.epochs() > 0 && !std::isfinite(trace.loss_d.back() + trace.loss_g.back() + trace.loss_sim.back())) return;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    trace.loss_d.push_back(nan);
    trace.loss_g.push_back(nan);
    trace.loss_sim.push_back(nan);
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
    out << "epoch,loss_d,loss_g,loss_sim\n";
    char buf[128];
    for (std::size_t e = 0; e < trace.epochs(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e + 1, trace.loss_d[e], trace.loss_g[e],
                      trace.loss_sim[e]);
        out << buf;
    }
}

namespace {

MatrixXd generator_input(const GainBatch& batch) {
    const MatrixXd seeded = batch.x.array() + (1.0 - batch.mask.array()) * batch.seeds.array();
    return concat_columns(seeded, batch.mask);
}

}  // namespace

BatchGradients discriminator_gradients(const GainModel& model, const GainBatch& batch) {
    const auto b = batch.x.rows();
    const double inv_b = 1.0 / static_cast<double>(b);
    const MatrixXd raw = model.generator.forward(generator_input(batch));
    const MatrixXd combined = batch.mask.array() * batch.x.array() + (1.0 - batch.mask.array()) * raw.array();
    ForwardCache cache;
    const MatrixXd pred = model.discriminator.forward(concat_columns(combined, batch.hints), cache);
    BatchGradients out;
    MatrixXd grad(b, pred.cols());
    for (Eigen::Index i = 0; i < b; ++i) {
        const VectorXd mu = batch.feature_mask.row(i).transpose();
        const VectorXd p = pred.row(i).transpose();
        const VectorXd w = batch.weights.row(i).transpose();
        out.loss_sum += loss_d(mu, p, w);
        grad.row(i) = inv_b * loss_d_gradient(mu, p, w).transpose();
    }
    out.grads = model.discriminator.backward(cache, grad);
    return out;
}

BatchGradients generator_gradients(const GainModel& model, const GainBatch& batch) {
    const auto b = batch.x.rows();
    const auto q = batch.x.cols();
    const double inv_b = 1.0 / static_cast<double>(b);
    ForwardCache g_cache;
    const MatrixXd raw = model.generator.forward(generator_input(batch), g_cache);
    const MatrixXd combined = batch.mask.array() * batch.x.array() + (1.0 - batch.mask.array()) * raw.array();
    ForwardCache d_cache;
    const MatrixXd pred = model.discriminator.forward(concat_columns(combined, batch.hints), d_cache);
    BatchGradients out;
    MatrixXd grad_pred(b, pred.cols());
    MatrixXd grad_raw(b, q);
    for (Eigen::Index i = 0; i < b; ++i) {
        const VectorXd mu = batch.feature_mask.row(i).transpose();
        const VectorXd p = pred.row(i).transpose();
        const VectorXd w = batch.weights.row(i).transpose();
        out.loss_sum += loss_g(mu, p, w);
        grad_pred.row(i) = inv_b * loss_g_gradient(mu, p, w).transpose();
        const VectorXd x = batch.x.row(i).transpose();
        const VectorXd r = raw.row(i).transpose();
        const VectorXd m = batch.mask.row(i).transpose();
        out.sim_sum += loss_sim(x, r, m, model.schema);
        grad_raw.row(i) = (inv_b * model.lambda) * loss_sim_gradient(x, r, m, model.schema).transpose();
    }
    const Gradients d_grads = model.discriminator.backward(d_cache, grad_pred);
    grad_raw.array() += (1.0 - batch.mask.array()) * d_grads.input.leftCols(q).array();
    out.grads = model.generator.backward(g_cache, grad_raw);
    return out;
}

TrainTrace train(GainModel& model, const FuzzyDataset& data, const GainConfig& config) {
    if (data.rows() == 0) throw Error("train: empty dataset");
    if (!(data.schema == model.schema)) throw SchemaError("train: dataset schema differs from model schema");
    if (config.batch_size == 0) throw Error("train: batch size must be positive");

    const auto& schema = model.schema;
    const auto n = static_cast<Eigen::Index>(data.rows());
    const auto q = static_cast<Eigen::Index>(schema.total_width());
    const auto p = static_cast<Eigen::Index>(schema.feature_count());

    Adam opt_g(model.generator, config.optimizer);
    Adam opt_d(model.discriminator, config.optimizer);
    TrainTrace trace;

    FuzzyDataset working = data;
    std::vector<std::size_t> order(static_cast<std::size_t>(n));

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.refuzzify_each_epoch && data.coding == Coding::fuzzy) {
            refuzzify(working, derive_seed(config.seed, "refuzzify", epoch));
        }
        Rng batch_rng(derive_seed(config.seed, "batches", epoch));
        Rng seed_rng(derive_seed(config.seed, "seeds", epoch));
        Rng hint_rng(derive_seed(config.seed, "hints", epoch));
        std::iota(order.begin(), order.end(), 0);
        batch_rng.shuffle(std::span<std::size_t>(order));

        double sum_d = 0.0, sum_g = 0.0, sum_sim = 0.0;
        try {
            for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
                const auto b = static_cast<Eigen::Index>(std::min(config.batch_size, order.size() - start));
                MatrixXd x(b, q), m(b, q), mu(b, p), r(b, q), h(b, q), w(b, p);
                for (Eigen::Index i = 0; i < b; ++i) {
                    const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(i)]);
                    x.row(i) = working.values.row(src);
                    m.row(i) = working.mask.row(src);
                    mu.row(i) = working.feature_mask.row(src);
                    r.row(i) = sample_seeds(m.row(i).transpose(), model.seeds, seed_rng).transpose();
                    const Hint hint = sample_hints(m.row(i).transpose(), schema, model.hint_rate, hint_rng);
                    h.row(i) = hint.values.transpose();
                    if (config.hinted_loss_only) w.row(i) = hint.neutralized.transpose();
                    else w.row(i).setOnes();
                }
                const GainBatch batch{std::move(x), std::move(m), std::move(mu), std::move(r), std::move(h), std::move(w)};
                const BatchGradients d_step = discriminator_gradients(model, batch);
                sum_d += d_step.loss_sum;
                opt_d.step(model.discriminator, d_step.grads, epoch + 1);
                // Generator step against the updated discriminator.
                const BatchGradients g_step = generator_gradients(model, batch);
                sum_g += g_step.loss_sum;
                sum_sim += g_step.sim_sum;
                opt_g.step(model.generator, g_step.grads, epoch + 1);
            }
        } catch (const TrainingDiverged&) {
            throw;
        } catch (const DivergenceError&) {
            throw TrainingDiverged("non-finite gradient", epoch + 1, trace);
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        trace.loss_d.push_back(sum_d * inv_n);
        trace.loss_g.push_back(sum_g * inv_n);
        trace.loss_sim.push_back(sum_sim * inv_n);
        if (!std::isfinite(sum_d) || !std::isfinite(sum_g) || !std::isfinite(sum_sim)) {
            throw TrainingDiverged("non-finite loss", epoch + 1, trace);
        }
    }
    return trace;
}

ImputationResult impute(const GainModel& model, const FuzzyDataset& data, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw Error("impute: k must be at least 1");
    if (!(data.schema == model.schema)) throw SchemaError("impute: dataset schema differs from model schema");
    const auto& schema = model.schema;
    const auto n = static_cast<Eigen::Index>(data.rows());
    const auto p = schema.feature_count();

    ImputationResult result;
    result.draws.reserve(k);
    result.coded.reserve(k);
    for (std::size_t d = 0; d < k; ++d) {
        Rng rng(derive_seed(seed, "impute", d));
        MatrixXd seeds(n, data.values.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            seeds.row(i) = sample_seeds(data.mask.row(i).transpose(), model.seeds, rng).transpose();
        }
        const GeneratorOutput out = generator_forward(model, data.values, data.mask, seeds);
        std::vector<RawRecord> records;
        records.reserve(static_cast<std::size_t>(n));
        MatrixXd coded = data.binary;
        for (Eigen::Index i = 0; i < n; ++i) {
            RawRecord record(p, Missing{});
            for (std::size_t j = 0; j < p; ++j) {
                const auto off = static_cast<Eigen::Index>(schema.offset(j));
                const auto w = static_cast<Eigen::Index>(schema.width(j));
                const VectorXd block = out.combined.row(i).segment(off, w).transpose();
                record[j] = decode(block, schema.feature(j));
                if (data.feature_mask(i, static_cast<Eigen::Index>(j)) == 0.0) {
                    coded.row(i).segment(off, w) = binarize_block(block, schema.feature(j)).transpose();
                }
            }
            records.push_back(std::move(record));
        }
        result.draws.push_back(std::move(records));
        result.coded.push_back(std::move(coded));
    }

    result.modal.assign(static_cast<std::size_t>(n), RawRecord(p, Missing{}));
    result.agreement = MatrixXd::Ones(n, static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (std::size_t j = 0; j < p; ++j) {
            if (data.feature_mask(i, static_cast<Eigen::Index>(j)) != 0.0) {
                result.modal[row][j] = result.draws.front()[row][j];
                continue;
            }
            std::map<CellValue, std::size_t, CellLess> counts;
            for (const auto& draw : result.draws) ++counts[agreement_key(draw[row][j])];
            auto best = counts.begin();
            for (auto it = counts.begin(); it != counts.end(); ++it) {
                if (it->second > best->second) best = it;
            }
            result.modal[row][j] = best->first;
            result.agreement(i, static_cast<Eigen::Index>(j)) =
                static_cast<double>(best->second) / static_cast<double>(k);
        }
    }
    return result;
}

void save_gain_model(std::ostream& out, const GainModel& model) {
    write_model_header(out, "categorical-gain", model.schema.hash());
    write_f64(out, model.hint_rate);
    write_f64(out, model.lambda);
    write_f64(out, model.seeds.low);
    write_f64(out, model.seeds.high);
    write_mlp(out, model.generator);
    write_mlp(out, model.discriminator);
}

GainModel load_gain_model(std::istream& in, const FeatureSchema& schema) {
    read_model_header(in, "categorical-gain", schema.hash());
    GainModel model;
    model.schema = schema;
    model.hint_rate = read_f64(in);
    model.lambda = read_f64(in);
    model.seeds.low = read_f64(in);
    model.seeds.high = read_f64(in);
    model.generator = read_mlp(in);
    model.discriminator = read_mlp(in);
    const std::size_t q = schema.total_width();
    if (model.generator.input_width() != 2 * q || model.generator.output_width() != q ||
        model.discriminator.input_width() != 2 * q || model.discriminator.output_width() != schema.feature_count()) {
        throw DimensionError("model network shapes do not match the schema");
    }
    return model;
}

void save_gain_model(const std::string& path, const GainModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file '" + path + "'");
    save_gain_model(out, model);
    if (!out) throw Error("failed writing model file '" + path + "'");
}

GainModel load_gain_model(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path + "'");
    return load_gain_model(in, schema);
}

}  // namespace cgain
