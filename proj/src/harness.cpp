#include "cgain/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "cgain/error.hpp"
#include "cgain/logreg.hpp"
#include "cgain/metrics.hpp"

namespace cgain {
namespace {

constexpr Method all_methods[] = {Method::complete,      Method::most_popular, Method::random,
                                  Method::no_imputation, Method::average,      Method::svd,
                                  Method::autoencoder,   Method::gain};

std::uint64_t proportion_key(double proportion) {
    return static_cast<std::uint64_t>(std::llround(proportion * 1e6));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void append(std::vector<double>& out, const MatrixXd& m) { out.insert(out.end(), m.data(), m.data() + m.size()); }
void append(std::vector<double>& out, const VectorXd& v) { out.insert(out.end(), v.data(), v.data() + v.size()); }

struct Scores {
    double accuracy = 0.0;
    double auroc = 0.0;
};

Scores downstream(const MatrixXd& x_train, std::span<const int> y_train, const MatrixXd& x_test,
                  std::span<const int> y_test, double ridge, std::vector<double>* fitted) {
    const LogisticModel model = fit_logreg_ridge(x_train, y_train, ridge);
    if (fitted) {
        append(*fitted, model.weights);
        fitted->push_back(model.intercept);
    }
    const VectorXd scores = model.predict_proba(x_test);
    const std::span<const double> s(scores.data(), static_cast<std::size_t>(scores.size()));
    return {accuracy(s, y_test), auroc(s, y_test)};
}

// Stratified split of [0, n) into (fit, validation) index sets.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_split(std::span<const int> labels,
                                                                                double fraction,
                                                                                std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> fit, validation;
    for (const int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        rng.shuffle(std::span<std::size_t>(members));
        auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        if (members.size() >= 2) take = std::clamp<std::size_t>(take, 1, members.size() - 1);
        validation.insert(validation.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
        fit.insert(fit.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    std::sort(fit.begin(), fit.end());
    std::sort(validation.begin(), validation.end());
    return {fit, validation};
}

std::vector<int> pick(std::span<const int> labels, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto r : rows) out.push_back(labels[r]);
    return out;
}

// Imputes (train, test) for a low-rank method at a given rank.
using LowRankImputer = std::pair<MatrixXd, MatrixXd> (*)(const FuzzyDataset&, const FuzzyDataset&, std::size_t,
                                                          const BenchmarkConfig&, std::uint64_t,
                                                          std::vector<double>*);

std::pair<MatrixXd, MatrixXd> svd_pair(const FuzzyDataset& train, const FuzzyDataset& test, std::size_t rank,
                                       const BenchmarkConfig&, std::uint64_t, std::vector<double>* fitted) {
    const SvdImputer imputer = svd_fit(train, rank);
    if (fitted) {
        append(*fitted, imputer.means);
        append(*fitted, imputer.components);
    }
    return {svd_impute_train(imputer, train), svd_impute_test(imputer, test)};
}

std::pair<MatrixXd, MatrixXd> ae_pair(const FuzzyDataset& train, const FuzzyDataset& test, std::size_t rank,
                                      const BenchmarkConfig& config, std::uint64_t seed, std::vector<double>* fitted) {
    AutoencoderConfig ae = config.autoencoder;
    ae.seed = derive_seed(seed, "autoencoder", rank);
    const AutoencoderImputer imputer = ae_fit(train, rank, ae);
    if (fitted) {
        append(*fitted, imputer.means);
        append(*fitted, imputer.network.parameters());
    }
    return {ae_impute(imputer, train), ae_impute(imputer, test)};
}

CellResult evaluate_low_rank(LowRankImputer impute_pair, const FoldData& fold, const BenchmarkConfig& config,
                             std::uint64_t seed, bool rank_limited_by_rows) {
    const auto [fit_rows, val_rows] = validation_split(fold.train_labels, config.validation_fraction,
                                                       derive_seed(seed, "validation"));
    const FuzzyDataset inner_fit = select_rows(fold.hard_train, fit_rows);
    const FuzzyDataset inner_val = select_rows(fold.hard_train, val_rows);
    const auto y_fit = pick(fold.train_labels, fit_rows);
    const auto y_val = pick(fold.train_labels, val_rows);
    const std::size_t q = fold.hard_train.schema.total_width();

    std::size_t best_rank = 0;
    double best_auroc = -1.0;
    for (const std::size_t rank : config.ranks) {
        const std::size_t limit = rank_limited_by_rows ? std::min(inner_fit.rows(), q) : q;
        if (rank == 0 || rank > limit) continue;
        const auto [x_fit, x_val] = impute_pair(inner_fit, inner_val, rank, config, seed, nullptr);
        const Scores s = downstream(x_fit, y_fit, x_val, y_val, config.ridge, nullptr);
        if (s.auroc > best_auroc) {
            best_auroc = s.auroc;
            best_rank = rank;
        }
    }
    if (best_rank == 0) throw Error("no admissible rank among the configured candidates");

    CellResult result;
    const auto [x_train, x_test] = impute_pair(fold.hard_train, fold.hard_test, best_rank, config, seed,
                                               &result.fitted);
    const Scores s = downstream(x_train, fold.train_labels, x_test, fold.test_labels, config.ridge, &result.fitted);
    result.accuracy = s.accuracy;
    result.auroc = s.auroc;
    result.note = "rank=" + std::to_string(best_rank);
    return result;
}

CellResult evaluate_gain(const FoldData& fold, const BenchmarkConfig& config, std::uint64_t seed) {
    GainConfig gain = config.gain;
    gain.seed = derive_seed(seed, "gain");
    GainModel model = make_gain_model(fold.fuzzy_train.schema, gain);
    train(model, fold.fuzzy_train, gain);

    CellResult result;
    append(result.fitted, model.generator.parameters());
    append(result.fitted, model.discriminator.parameters());

    const std::size_t k = std::max<std::size_t>(config.imputations, 1);
    const ImputationResult train_imp = impute(model, fold.fuzzy_train, k, derive_seed(seed, "impute-train"));
    const ImputationResult test_imp = impute(model, fold.fuzzy_test, k, derive_seed(seed, "impute-test"));

    if (config.modal_completion) {
        auto coded = [](const std::vector<RawRecord>& records, const FeatureSchema& schema) {
            MatrixXd out(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(schema.total_width()));
            for (std::size_t i = 0; i < records.size(); ++i) {
                out.row(static_cast<Eigen::Index>(i)) = encode_binary(records[i], schema).codes.transpose();
            }
            return out;
        };
        const Scores s = downstream(coded(train_imp.modal, model.schema), fold.train_labels,
                                    coded(test_imp.modal, model.schema), fold.test_labels, config.ridge,
                                    &result.fitted);
        result.accuracy = s.accuracy;
        result.auroc = s.auroc;
        return result;
    }

    double acc = 0.0, auc = 0.0;
    for (std::size_t d = 0; d < k; ++d) {
        const Scores s = downstream(train_imp.coded[d], fold.train_labels, test_imp.coded[d], fold.test_labels,
                                    config.ridge, &result.fitted);
        acc += s.accuracy;
        auc += s.auroc;
    }
    result.accuracy = acc / static_cast<double>(k);
    result.auroc = auc / static_cast<double>(k);
    return result;
}

// Test rows get random categories and flipped labels.
FoldData scramble_test(const FoldData& fold, std::uint64_t seed) {
    FoldData out = fold;
    Rng rng(seed);
    const auto& schema = fold.hard_test.schema;
    for (Eigen::Index i = 0; i < out.hard_test.values.rows(); ++i) {
        RawRecord record(schema.feature_count(), Missing{});
        for (std::size_t j = 0; j < schema.feature_count(); ++j) {
            const auto& spec = schema.feature(j);
            switch (spec.kind) {
                case FeatureKind::multiclass: record[j] = rng.index(spec.cardinality); break;
                case FeatureKind::multilabel: {
                    std::vector<std::size_t> set;
                    for (std::size_t k = 0; k < spec.cardinality; ++k) {
                        if (rng.uniform() < 0.5) set.push_back(k);
                    }
                    record[j] = set;
                    break;
                }
                case FeatureKind::numeric: record[j] = rng.uniform(); break;
            }
        }
        const BinaryRow row = encode_binary(record, schema);
        const VectorXd m = out.hard_test.mask.row(i).transpose();
        const VectorXd codes = row.codes.cwiseProduct(m);
        out.hard_test.values.row(i) = codes.transpose();
        out.hard_test.binary.row(i) = codes.transpose();
        out.fuzzy_test.binary.row(i) = codes.transpose();
        out.fuzzy_test.values.row(i) = codes.transpose();
    }
    refuzzify(out.fuzzy_test, derive_seed(seed, "fuzzify"));
    for (auto& y : out.test_labels) y = 1 - y;
    return out;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::complete: return "complete";
        case Method::most_popular: return "most_popular";
        case Method::random: return "random";
        case Method::no_imputation: return "no_imputation";
        case Method::average: return "average";
        case Method::svd: return "svd";
        case Method::autoencoder: return "autoencoder";
        case Method::gain: return "gain";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (const Method m : all_methods) {
        if (to_string(m) == name) return m;
    }
    throw UsageError("unknown method '" + std::string(name) +
                     "' (expected complete, most_popular, random, no_imputation, average, svd, autoencoder, gain)");
}

bool is_sanity_method(Method method) {
    return method == Method::complete || method == Method::most_popular || method == Method::random;
}

MatrixXd sample_feature_mask(const FuzzyDataset& dataset, const MaskingPlan& plan) {
    if (!(plan.proportion >= 0.0 && plan.proportion <= 1.0)) throw Error("masking proportion must lie in [0, 1]");
    Rng rng(plan.seed);
    MatrixXd mask = dataset.feature_mask;
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        for (Eigen::Index j = 0; j < mask.cols(); ++j) {
            const double u = rng.uniform();
            if (mask(i, j) != 0.0 && u < plan.proportion) mask(i, j) = 0.0;
        }
    }
    return mask;
}

MaskedDataset mask_dataset(const FuzzyDataset& dataset, const MaskingPlan& plan) {
    const MatrixXd mask = sample_feature_mask(dataset, plan);
    MaskedDataset out{dataset, {}};
    const auto& schema = dataset.schema;
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        for (std::size_t j = 0; j < schema.feature_count(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (mask(i, jj) != 0.0 || dataset.feature_mask(i, jj) == 0.0) continue;
            const auto off = static_cast<Eigen::Index>(schema.offset(j));
            const auto w = static_cast<Eigen::Index>(schema.width(j));
            out.truth.push_back({static_cast<std::size_t>(i), j, dataset.values.row(i).segment(off, w).transpose(),
                                 dataset.binary.row(i).segment(off, w).transpose()});
        }
    }
    apply_feature_mask(out.dataset, mask);
    return out;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw Error("kfold_split: k must be positive");
    if (n < k) throw Error("kfold_split: " + std::to_string(n) + " samples cannot fill " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "fold"));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(folds[f].begin(), folds[f].end());
        pos += size;
    }
    return folds;
}

bool EvalReport::has_errors() const {
    return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.error.empty(); });
}

const ReportRow* EvalReport::find(std::optional<double> proportion, std::string_view method,
                                  std::string_view metric) const {
    for (const auto& r : rows) {
        const bool same_prop = proportion.has_value() == r.proportion.has_value() &&
                               (!proportion || std::abs(*proportion - *r.proportion) < 1e-12);
        if (same_prop && r.method == method && r.metric == metric) return &r;
    }
    return nullptr;
}

FoldData make_fold(const FuzzyDataset& fuzzy, const FuzzyDataset& hard, std::span<const int> labels,
                   const std::vector<std::vector<std::size_t>>& folds, std::size_t fold, double proportion,
                   std::uint64_t seed) {
    const MaskingPlan plan{proportion, derive_seed(derive_seed(seed, "mask", fold), "proportion",
                                                   proportion_key(proportion))};
    const MatrixXd mask = sample_feature_mask(fuzzy, plan);
    FuzzyDataset masked_fuzzy = fuzzy;
    FuzzyDataset masked_hard = hard;
    apply_feature_mask(masked_fuzzy, mask);
    apply_feature_mask(masked_hard, mask);

    std::vector<std::size_t> train_rows;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f != fold) train_rows.insert(train_rows.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const auto& test_rows = folds.at(fold);

    FoldData out{select_rows(masked_fuzzy, train_rows), select_rows(masked_fuzzy, test_rows),
                 select_rows(masked_hard, train_rows),  select_rows(masked_hard, test_rows),
                 pick(labels, train_rows),               pick(labels, test_rows)};
    return out;
}

CellResult evaluate_method(Method method, const FoldData& fold, const BenchmarkConfig& config,
                           std::uint64_t cell_seed) {
    CellResult result;
    const auto& y_test = fold.test_labels;
    switch (method) {
        case Method::complete:
        case Method::no_imputation: {
            const Scores s = downstream(fold.hard_train.values, fold.train_labels, fold.hard_test.values, y_test,
                                        config.ridge, &result.fitted);
            result.accuracy = s.accuracy;
            result.auroc = s.auroc;
            return result;
        }
        case Method::most_popular: {
            const double freq = static_cast<double>(std::count(fold.train_labels.begin(), fold.train_labels.end(), 1)) /
                                static_cast<double>(fold.train_labels.size());
            result.fitted.push_back(freq);
            const std::vector<double> scores(y_test.size(), freq);
            result.accuracy = accuracy(scores, y_test);
            result.auroc = auroc(scores, y_test);
            return result;
        }
        case Method::random: {
            Rng rng(derive_seed(cell_seed, "random"));
            std::vector<double> scores(y_test.size());
            for (auto& s : scores) s = rng.uniform();
            result.accuracy = accuracy(scores, y_test);
            result.auroc = auroc(scores, y_test);
            return result;
        }
        case Method::average: {
            const VectorXd means = column_means(fold.hard_train);
            append(result.fitted, means);
            const Scores s = downstream(prefill(fold.hard_train, means), fold.train_labels,
                                        prefill(fold.hard_test, means), y_test, config.ridge, &result.fitted);
            result.accuracy = s.accuracy;
            result.auroc = s.auroc;
            return result;
        }
        case Method::svd: return evaluate_low_rank(&svd_pair, fold, config, cell_seed, true);
        case Method::autoencoder: return evaluate_low_rank(&ae_pair, fold, config, cell_seed, false);
        case Method::gain: return evaluate_gain(fold, config, cell_seed);
    }
    return result;
}

namespace {

struct Cell {
    Method method;
    std::optional<double> proportion;
    std::size_t fold;
    CellResult result;
    std::string error;
};

template <typename Job>
void run_parallel(std::size_t count, std::size_t threads, Job job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::uint64_t cell_seed(std::uint64_t seed, Method method, std::optional<double> proportion, std::size_t fold) {
    return derive_seed(derive_seed(seed, "cell", fold), to_string(method), proportion ? proportion_key(*proportion) : 0);
}

}  // namespace

EvalReport run_benchmark(std::span<const RawRecord> records, const FeatureSchema& schema, std::span<const int> labels,
                         const BenchmarkConfig& config) {
    if (config.methods.empty()) throw UsageError("no methods requested");
    if (records.size() != labels.size()) throw DimensionError("one label per record required");
    for (const double p : config.proportions) {
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("masking proportions must lie in [0, 1]");
    }
    const FuzzyDataset fuzzy = encode_dataset(records, schema, derive_seed(config.seed, "fuzzify"), Coding::fuzzy);
    const FuzzyDataset hard = encode_dataset(records, schema, 0, Coding::hard);
    const auto folds = kfold_split(records.size(), config.folds, config.seed);

    std::vector<Cell> cells;
    for (const Method m : config.methods) {
        if (is_sanity_method(m)) {
            for (std::size_t f = 0; f < config.folds; ++f) cells.push_back({m, std::nullopt, f, {}, {}});
        }
    }
    for (const double p : config.proportions) {
        for (const Method m : config.methods) {
            if (is_sanity_method(m)) continue;
            for (std::size_t f = 0; f < config.folds; ++f) cells.push_back({m, p, f, {}, {}});
        }
    }

    run_parallel(cells.size(), config.threads, [&](std::size_t i) {
        Cell& cell = cells[i];
        try {
            const FoldData fold = make_fold(fuzzy, hard, labels, folds, cell.fold, cell.proportion.value_or(0.0),
                                            config.seed);
            cell.result = evaluate_method(cell.method, fold, config,
                                          cell_seed(config.seed, cell.method, cell.proportion, cell.fold));
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });

    EvalReport report;
    for (std::size_t start = 0; start < cells.size(); start += config.folds) {
        const Cell& head = cells[start];
        for (const char* metric : {"accuracy", "auroc"}) {
            ReportRow row;
            row.proportion = head.proportion;
            row.method = std::string(to_string(head.method));
            row.metric = metric;
            std::string notes;
            for (std::size_t f = 0; f < config.folds; ++f) {
                const Cell& c = cells[start + f];
                if (!c.error.empty() && row.error.empty()) row.error = "fold " + std::to_string(f) + ": " + c.error;
                row.fold_values.push_back(std::string(metric) == "accuracy" ? c.result.accuracy : c.result.auroc);
                if (!c.result.note.empty()) notes += (notes.empty() ? "" : ";") + c.result.note;
            }
            row.note = notes;
            if (row.error.empty()) {
                row.mean = mean(row.fold_values);
                row.sd = stddev(row.fold_values);
            } else {
                row.mean = row.sd = std::numeric_limits<double>::quiet_NaN();
            }
            report.rows.push_back(std::move(row));
        }
    }

    auto& md = report.metadata;
    md.emplace_back("seed", std::to_string(config.seed));
    md.emplace_back("schema_hash", std::to_string(schema.hash()));
    md.emplace_back("rows", std::to_string(records.size()));
    md.emplace_back("folds", std::to_string(config.folds));
    md.emplace_back("ridge", format_number(config.ridge));
    md.emplace_back("imputations", std::to_string(config.imputations));
    md.emplace_back("gain_epochs", std::to_string(config.gain.epochs));
    md.emplace_back("gain_batch_size", std::to_string(config.gain.batch_size));
    md.emplace_back("gain_hint_rate", format_number(config.gain.hint_rate));
    md.emplace_back("gain_lambda", format_number(config.gain.lambda));
    md.emplace_back("autoencoder_epochs", std::to_string(config.autoencoder.epochs));
    md.emplace_back("prefill", "column-mean");
    md.emplace_back("rank_selection", "validation AUROC, fraction " + format_number(config.validation_fraction));
    md.emplace_back("gain_aggregation", config.modal_completion ? "modal-completion" : "per-draw-metric-mean");
    md.emplace_back("sd", "population");
    return report;
}

std::vector<AuditResult> audit_leakage(std::span<const RawRecord> records, const FeatureSchema& schema,
                                       std::span<const int> labels, const BenchmarkConfig& config,
                                       double proportion) {
    const FuzzyDataset fuzzy = encode_dataset(records, schema, derive_seed(config.seed, "fuzzify"), Coding::fuzzy);
    const FuzzyDataset hard = encode_dataset(records, schema, 0, Coding::hard);
    const auto folds = kfold_split(records.size(), config.folds, config.seed);

    std::vector<AuditResult> results;
    for (const Method m : config.methods) {
        const std::optional<double> prop = is_sanity_method(m) ? std::nullopt : std::optional<double>(proportion);
        const FoldData fold = make_fold(fuzzy, hard, labels, folds, 0, prop.value_or(0.0), config.seed);
        const FoldData scrambled = scramble_test(fold, derive_seed(config.seed, "audit"));
        const std::uint64_t seed = cell_seed(config.seed, m, prop, 0);
        AuditResult r{m, false, {}};
        try {
            const CellResult a = evaluate_method(m, fold, config, seed);
            const CellResult b = evaluate_method(m, scrambled, config, seed);
            r.passed = a.fitted.size() == b.fitted.size() &&
                       std::equal(a.fitted.begin(), a.fitted.end(), b.fitted.begin(),
                                  [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; });
            r.detail = std::to_string(a.fitted.size()) + " fitted values compared";
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

LossCurves loss_curves(std::span<const RawRecord> records, const FeatureSchema& schema, double proportion,
                       const GainConfig& gain, std::uint64_t seed) {
    FuzzyDataset fuzzy = encode_dataset(records, schema, derive_seed(seed, "fuzzify"), Coding::fuzzy);
    FuzzyDataset hard = encode_dataset(records, schema, 0, Coding::hard);
    const MatrixXd mask = sample_feature_mask(
        fuzzy, {proportion, derive_seed(derive_seed(seed, "mask"), "proportion", proportion_key(proportion))});
    apply_feature_mask(fuzzy, mask);
    apply_feature_mask(hard, mask);

    auto run = [&](const FuzzyDataset& data, TrainTrace& trace, std::string& error) {
        GainModel model = make_gain_model(schema, gain);
        try {
            trace = train(model, data, gain);
        } catch (const TrainingDiverged& e) {
            trace = e.trace();
            close_diverged_trace(trace);
            error = e.what();
        }
    };
    LossCurves out;
    run(fuzzy, out.fuzzy, out.fuzzy_error);
    run(hard, out.hard, out.hard_error);
    return out;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "proportion,method,metric,mean,sd,fold_values\n";
    for (const auto& r : report.rows) {
        out << (r.proportion ? format_number(*r.proportion) : "") << ',' << r.method << ',' << r.metric << ','
            << format_number(r.mean) << ',' << format_number(r.sd) << ',';
        if (!r.error.empty()) {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            out << "\"error: " << msg << "\"\n";
            continue;
        }
        for (std::size_t f = 0; f < r.fold_values.size(); ++f) out << (f ? ";" : "") << format_number(r.fold_values[f]);
        out << '\n';
    }
}

void write_report_json(std::ostream& out, const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.metadata) doc["metadata"][k] = v;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["proportion"] = r.proportion ? nlohmann::ordered_json(*r.proportion) : nlohmann::ordered_json(nullptr);
        row["method"] = r.method;
        row["metric"] = r.metric;
        row["mean"] = r.mean;
        row["sd"] = r.sd;
        row["fold_values"] = r.fold_values;
        if (!r.note.empty()) row["note"] = r.note;
        if (!r.error.empty()) row["error"] = r.error;
        doc["rows"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

}  // namespace cgain
