#include "cgain/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgain/error.hpp"
#include "cgain/gain.hpp"
#include "cgain/linalg.hpp"

namespace cgain {
namespace {

void check_schema(const FeatureSchema& a, const FeatureSchema& b, const char* what) {
    if (!(a == b)) throw SchemaError(std::string(what) + ": schema mismatch");
}

}  // namespace

VectorXd column_means(const FuzzyDataset& train) {
    const auto& schema = train.schema;
    VectorXd means(static_cast<Eigen::Index>(schema.total_width()));
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const auto& spec = schema.feature(j);
        const double prior = spec.kind == FeatureKind::multiclass ? 1.0 / static_cast<double>(spec.cardinality) : 0.5;
        for (std::size_t k = 0; k < spec.cardinality; ++k) {
            const auto c = static_cast<Eigen::Index>(schema.offset(j) + k);
            const double observed = train.mask.col(c).sum();
            means(c) = observed > 0.0 ? train.mask.col(c).dot(train.values.col(c)) / observed : prior;
        }
    }
    return means;
}

MatrixXd prefill(const FuzzyDataset& data, const VectorXd& means) {
    if (means.size() != data.values.cols()) throw DimensionError("prefill: means width mismatch");
    MatrixXd out = data.values;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            if (data.mask(i, c) == 0.0) out(i, c) = means(c);
        }
    }
    return out;
}

MatrixXd restore_observed(const MatrixXd& imputed, const FuzzyDataset& data) {
    if (imputed.rows() != data.values.rows() || imputed.cols() != data.values.cols()) {
        throw DimensionError("restore_observed: shape mismatch");
    }
    return (data.mask.array() != 0.0).select(data.values, imputed);
}

MatrixXd no_impute(const FuzzyDataset& target) { return target.values; }

MatrixXd avg_impute(const FuzzyDataset& train, const FuzzyDataset& target) {
    check_schema(train.schema, target.schema, "avg_impute");
    return prefill(target, column_means(train));
}

SvdImputer svd_fit(const MatrixXd& prefilled, std::size_t rank) {
    const auto limit = static_cast<std::size_t>(std::min(prefilled.rows(), prefilled.cols()));
    if (rank == 0 || rank > limit) {
        throw Error("svd_fit: rank " + std::to_string(rank) + " outside [1, " + std::to_string(limit) + "]");
    }
    const Svd svd = jacobi_svd(prefilled);
    const auto r = static_cast<Eigen::Index>(rank);
    SvdImputer imputer;
    imputer.rank = rank;
    imputer.singular_values = svd.singular_values;
    imputer.left = svd.u.leftCols(r);
    imputer.components = svd.singular_values.head(r).asDiagonal() * svd.v.leftCols(r).transpose();
    imputer.components_pinv = pseudo_inverse(imputer.components);
    return imputer;
}

SvdImputer svd_fit(const FuzzyDataset& train, std::size_t rank) {
    const VectorXd means = column_means(train);
    SvdImputer imputer = svd_fit(prefill(train, means), rank);
    imputer.means = means;
    return imputer;
}

MatrixXd svd_impute_train(const SvdImputer& imputer, const FuzzyDataset& train) {
    if (imputer.left.rows() != train.values.rows() || imputer.components.cols() != train.values.cols()) {
        throw SchemaError("svd_impute_train: dataset is not the one the imputer was fitted on");
    }
    return restore_observed(imputer.left * imputer.components, train);
}

MatrixXd svd_projector(const SvdImputer& imputer) { return imputer.components_pinv * imputer.components; }

MatrixXd svd_impute_test(const SvdImputer& imputer, const FuzzyDataset& test) {
    if (imputer.components.cols() != test.values.cols()) throw SchemaError("svd_impute_test: width mismatch");
    const MatrixXd filled = prefill(test, imputer.means);
    return restore_observed(filled * svd_projector(imputer), test);
}

AutoencoderImputer ae_fit(const FuzzyDataset& train, std::size_t rank, const AutoencoderConfig& config) {
    if (rank == 0) throw Error("ae_fit: rank must be at least 1");
    if (train.rows() == 0) throw Error("ae_fit: empty training set");
    if (config.batch_size == 0) throw Error("ae_fit: batch size must be positive");
    const auto& schema = train.schema;
    const std::size_t q = schema.total_width();

    AutoencoderImputer imputer;
    imputer.schema = schema;
    imputer.means = column_means(train);
    Rng init(derive_seed(config.seed, "init"));
    const std::size_t widths[] = {q, rank, q};
    const Activation acts[] = {Activation::tanh, Activation::blockwise};
    imputer.network = Mlp::glorot(widths, acts, generator_heads(schema), init);

    const MatrixXd inputs = prefill(train, imputer.means);
    Adam opt(imputer.network, config.optimizer);
    std::vector<std::size_t> order(train.rows());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, "batches", epoch));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto b = static_cast<Eigen::Index>(std::min(config.batch_size, order.size() - start));
            MatrixXd x(b, static_cast<Eigen::Index>(q));
            MatrixXd target(b, static_cast<Eigen::Index>(q));
            MatrixXd m(b, static_cast<Eigen::Index>(q));
            for (Eigen::Index i = 0; i < b; ++i) {
                const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(i)]);
                x.row(i) = inputs.row(src);
                target.row(i) = train.values.row(src);
                m.row(i) = train.mask.row(src);
            }
            ForwardCache cache;
            const MatrixXd out = imputer.network.forward(x, cache);
            MatrixXd grad(b, static_cast<Eigen::Index>(q));
            for (Eigen::Index i = 0; i < b; ++i) {
                const VectorXd t = target.row(i).transpose();
                const VectorXd o = out.row(i).transpose();
                const VectorXd mi = m.row(i).transpose();
                total += loss_sim(t, o, mi, schema);
                grad.row(i) = loss_sim_gradient(t, o, mi, schema).transpose() / static_cast<double>(b);
            }
            opt.step(imputer.network, imputer.network.backward(cache, grad), epoch + 1);
        }
        const double mean_loss = total / static_cast<double>(train.rows());
        imputer.loss_trace.push_back(mean_loss);
        if (!std::isfinite(mean_loss)) throw DivergenceError("auto-encoder reconstruction loss is not finite", epoch + 1);
    }
    return imputer;
}

MatrixXd ae_impute(const AutoencoderImputer& imputer, const FuzzyDataset& target) {
    check_schema(imputer.schema, target.schema, "ae_impute");
    const MatrixXd recon = imputer.network.forward(prefill(target, imputer.means));
    return restore_observed(recon, target);
}

}  // namespace cgain
