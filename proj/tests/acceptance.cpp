// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cgain/baselines.hpp"
#include "cgain/config.hpp"
#include "cgain/csv_io.hpp"
#include "cgain/gain.hpp"
#include "cgain/harness.hpp"
#include "cgain/linalg.hpp"
#include "cgain/metrics.hpp"
#include "cgain/synthetic.hpp"

using namespace cgain;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0.0 && seconds >= budget_seconds) {
        o.pass = false;
        o.detail += "; over the time budget";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

double rel_error(const VectorXd& a, const VectorXd& b) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-12});
}

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

template <typename F>
VectorXd numeric_gradient(Mlp& net, F objective) {
    const VectorXd theta = net.parameters();
    VectorXd out(theta.size());
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        VectorXd t = theta;
        t(i) += h;
        net.set_parameters(t);
        const double up = objective();
        t(i) -= 2 * h;
        net.set_parameters(t);
        out(i) = (up - objective()) / (2 * h);
    }
    net.set_parameters(theta);
    return out;
}

VectorXd flatten(const Gradients& g) {
    std::vector<double> out;
    for (const auto& l : g.layers) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out.push_back(l.weights(r, c));
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
    }
    return Eigen::Map<VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

FeatureSchema mixed_schema() {
    return FeatureSchema({{"a", FeatureKind::multiclass, 3, {}},
                          {"b", FeatureKind::multilabel, 2, {}},
                          {"c", FeatureKind::numeric, 1, {}},
                          {"d", FeatureKind::multiclass, 2, {}}});
}

FuzzyDataset mixed_dataset(std::size_t rows, std::uint64_t seed, double missing) {
    Rng rng(seed);
    std::vector<RawRecord> records;
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<std::size_t> set;
        if (rng.uniform() < 0.5) set.push_back(0);
        if (rng.uniform() < 0.5) set.push_back(1);
        RawRecord r{rng.index(3), set, rng.uniform(), rng.index(2)};
        for (auto& cell : r) {
            if (rng.uniform() < missing) cell = Missing{};
        }
        records.push_back(r);
    }
    return encode_dataset(records, mixed_schema(), seed);
}

struct Uci {
    FeatureSchema schema;
    std::vector<RawRecord> records;
    std::vector<int> labels;
};

Uci load_uci() {
    const std::string dir = CGAIN_DATA_DIR;
    Uci u;
    u.schema = FeatureSchema::load(dir + "/uci_breast_cancer.schema");
    auto data = records_from_table(read_csv(dir + "/uci_breast_cancer.csv"), u.schema, "class");
    u.records = std::move(data.records);
    u.labels = binary_labels(data.labels, "recurrence-events");
    return u;
}

// Settings used for every UCI run.
RunConfig uci_config(std::uint64_t seed) {
    RunConfig c;
    c.ridge = 10.0;
    c.seed = seed;
    return c;
}

Outcome codec_exactness() {
    Rng rng(derive_seed(1, "acceptance-codec"));
    std::size_t draws = 0, failures_mc = 0, failures_ml = 0;
    const FeatureSpec dummy{"f", FeatureKind::multiclass, 2, {}};
    for (std::size_t q = 2; q <= 6; ++q) {
        FeatureSpec spec = dummy;
        spec.cardinality = q;
        for (std::size_t active = 0; active < q; ++active) {
            VectorXd z = VectorXd::Zero(static_cast<Eigen::Index>(q));
            z(static_cast<Eigen::Index>(active)) = 1.0;
            for (int d = 0; d < 1000; ++d, ++draws) {
                if (std::get<std::size_t>(decode(fuzzify_multiclass(z, rng), spec)) != active) ++failures_mc;
            }
        }
    }
    for (std::size_t q = 1; q <= 4; ++q) {
        const FeatureSpec spec{"f", FeatureKind::multilabel, q, {}};
        for (std::size_t pattern = 0; pattern < (std::size_t{1} << q); ++pattern) {
            VectorXd z(static_cast<Eigen::Index>(q));
            std::vector<std::size_t> expected;
            for (std::size_t k = 0; k < q; ++k) {
                z(static_cast<Eigen::Index>(k)) = static_cast<double>((pattern >> k) & 1);
                if ((pattern >> k) & 1) expected.push_back(k);
            }
            for (int d = 0; d < 1000; ++d, ++draws) {
                if (std::get<std::vector<std::size_t>>(decode(fuzzify_multilabel(z, rng), spec)) != expected) {
                    ++failures_ml;
                }
            }
        }
    }
    return {failures_mc + failures_ml == 0, std::to_string(draws) + " draws, " + std::to_string(failures_mc) +
                                                " multiclass and " + std::to_string(failures_ml) +
                                                " multilabel decode failures"};
}

Outcome gradient_suite() {
    Rng rng(derive_seed(2, "acceptance-gradients"));
    double worst = 0.0;
    int instances = 0;

    // Dense networks with every hidden activation and both head kinds.
    const Activation hidden[] = {Activation::relu, Activation::tanh, Activation::sigmoid, Activation::linear};
    for (int trial = 0; trial < 24; ++trial) {
        std::vector<HeadBlock> blocks;
        std::size_t off = 0;
        for (std::size_t b = 0; b < 1 + rng.index(3); ++b) {
            const HeadKind kind = rng.index(2) ? HeadKind::softmax : HeadKind::sigmoid;
            const std::size_t w = kind == HeadKind::softmax ? 2 + rng.index(3) : 1 + rng.index(3);
            blocks.push_back({off, w, kind});
            off += w;
        }
        const std::vector<std::size_t> widths{2 + rng.index(4), 2 + rng.index(5), 2 + rng.index(5), off};
        const Activation h = hidden[trial % 4];
        const std::vector<Activation> acts{h, h, Activation::blockwise};
        Mlp net = Mlp::glorot(widths, acts, blocks, rng);
        VectorXd theta = net.parameters();
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += rng.uniform(-0.3, 0.3);
        net.set_parameters(theta);

        const MatrixXd x = random_matrix(3, static_cast<Eigen::Index>(widths[0]), rng);
        const MatrixXd target = random_matrix(3, static_cast<Eigen::Index>(off), rng, 0.0, 1.0);
        // Cross-entropy per softmax block, log-loss per sigmoid unit.
        auto loss = [&](const MatrixXd& out) {
            double v = 0.0;
            for (const auto& b : blocks) {
                for (Eigen::Index i = 0; i < out.rows(); ++i) {
                    for (auto k = static_cast<Eigen::Index>(b.offset); k < static_cast<Eigen::Index>(b.offset + b.width); ++k) {
                        v -= target(i, k) * std::log(out(i, k));
                        if (b.kind == HeadKind::sigmoid) v -= (1.0 - target(i, k)) * std::log(1.0 - out(i, k));
                    }
                }
            }
            return v;
        };
        ForwardCache cache;
        const MatrixXd out = net.forward(x, cache);
        MatrixXd grad_out = MatrixXd::Zero(out.rows(), out.cols());
        for (const auto& b : blocks) {
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                for (auto k = static_cast<Eigen::Index>(b.offset); k < static_cast<Eigen::Index>(b.offset + b.width); ++k) {
                    grad_out(i, k) = -target(i, k) / out(i, k);
                    if (b.kind == HeadKind::sigmoid) grad_out(i, k) += (1.0 - target(i, k)) / (1.0 - out(i, k));
                }
            }
        }
        const VectorXd analytic = flatten(net.backward(cache, grad_out));
        const VectorXd numeric = numeric_gradient(net, [&] { return loss(net.forward(x)); });
        worst = std::max(worst, rel_error(analytic, numeric));
        ++instances;
    }

    // The adversarial and similarity losses through generator -> discriminator.
    const FuzzyDataset data = mixed_dataset(6, 4, 0.4);
    for (int trial = 0; trial < 20; ++trial) {
        GainConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial);
        cfg.generator_hidden = {5, 4, 6};
        cfg.discriminator_hidden = {5, 4};
        cfg.lambda = 0.7;
        GainModel model = make_gain_model(data.schema, cfg);
        for (Mlp* net : {&model.generator, &model.discriminator}) {
            VectorXd theta = net->parameters();
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += rng.uniform(-0.2, 0.2);
            net->set_parameters(theta);
        }
        const auto n = static_cast<Eigen::Index>(data.rows());
        GainBatch b{data.values, data.mask, data.feature_mask, MatrixXd(n, data.values.cols()),
                    MatrixXd(n, data.values.cols()), MatrixXd(n, data.feature_mask.cols())};
        for (Eigen::Index i = 0; i < n; ++i) {
            b.seeds.row(i) = sample_seeds(data.mask.row(i).transpose(), model.seeds, rng).transpose();
            const Hint h = sample_hints(data.mask.row(i).transpose(), model.schema, 0.5, rng);
            b.hints.row(i) = h.values.transpose();
            if (trial % 2) b.weights.row(i) = h.neutralized.transpose();
            else b.weights.row(i).setOnes();
        }
        auto objective = [&](bool generator) {
            const GeneratorOutput g = generator_forward(model, b.x, b.mask, b.seeds);
            const MatrixXd pred = discriminator_forward(model, g.combined, b.hints);
            double total = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const VectorXd mu = b.feature_mask.row(i).transpose(), d = pred.row(i).transpose(),
                               w = b.weights.row(i).transpose();
                if (generator) {
                    total += loss_g(mu, d, w) + model.lambda * loss_sim(b.x.row(i).transpose(), g.raw.row(i).transpose(),
                                                                        b.mask.row(i).transpose(), model.schema);
                } else {
                    total += loss_d(mu, d, w);
                }
            }
            return total / static_cast<double>(n);
        };
        worst = std::max(worst, rel_error(flatten(discriminator_gradients(model, b).grads),
                                          numeric_gradient(model.discriminator, [&] { return objective(false); })));
        worst = std::max(worst, rel_error(flatten(generator_gradients(model, b).grads),
                                          numeric_gradient(model.generator, [&] { return objective(true); })));
        ++instances;
    }
    return {worst < 1e-4 && instances >= 20,
            std::to_string(instances) + " instances, worst relative error " + fmt("%.2e", worst)};
}

Outcome loss_oracles() {
    const double ln2 = std::log(2.0);
    VectorXd mu(2), half(2);
    mu << 1, 0;
    half << 0.5, 0.5;
    const double d = loss_d(mu, half);
    const double g = loss_g(VectorXd::Zero(1), VectorXd::Constant(1, 0.5));
    const FeatureSchema one({{"f", FeatureKind::multiclass, 3, {}}});
    VectorXd x(3);
    x << 0.1, 0.8, 0.1;
    const double s = loss_sim(x, VectorXd::Constant(3, 1.0 / 3.0), VectorXd::Ones(3), one);
    const double err = std::max({std::abs(d - 2 * ln2), std::abs(g - ln2), std::abs(s - std::log(3.0))});
    return {err <= 1e-9, "loss_d " + fmt("%.12f", d) + ", loss_g " + fmt("%.12f", g) + ", loss_sim " +
                             fmt("%.12f", s) + ", max error " + fmt("%.1e", err)};
}

Outcome svd_correctness() {
    Rng rng(derive_seed(4, "acceptance-svd"));
    double worst_ey = 0.0, worst_proj = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const MatrixXd a = random_matrix(5, 4, rng);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a.transpose() * a);
        const VectorXd lambda = eig.eigenvalues().reverse().cwiseMax(0.0);
        for (std::size_t r = 1; r <= 4; ++r) {
            const SvdImputer fit = svd_fit(a, r);
            const double residual = (a - fit.left * fit.components).norm();
            const double oracle = std::sqrt(lambda.tail(4 - static_cast<Eigen::Index>(r)).sum());
            worst_ey = std::max(worst_ey, std::abs(residual - oracle));
            const MatrixXd p = svd_projector(fit);
            worst_proj = std::max(worst_proj, (p * p - p).cwiseAbs().maxCoeff());
        }
    }
    return {worst_ey < 1e-8 && worst_proj < 1e-10,
            "Eckart-Young residual error " + fmt("%.1e", worst_ey) + ", projector idempotence " + fmt("%.1e", worst_proj)};
}

Outcome uci_complete(const Uci& uci) {
    RunConfig c = uci_config(0);
    c.methods = {Method::complete, Method::most_popular};
    const auto report = run_benchmark(uci.records, uci.schema, uci.labels, benchmark_config(c));
    const auto* acc = report.find(std::nullopt, "complete", "accuracy");
    const auto* auc = report.find(std::nullopt, "complete", "auroc");
    const auto* pop = report.find(std::nullopt, "most_popular", "auroc");
    if (!acc || !auc || !pop || report.has_errors()) return {false, "benchmark cells failed"};
    bool pop_exact = true;
    for (const double v : pop->fold_values) pop_exact = pop_exact && v == 0.5;
    const bool pass = std::abs(acc->mean - 0.737) <= 0.06 && std::abs(auc->mean - 0.721) <= 0.06 && pop_exact &&
                      pop->sd == 0.0;
    return {pass, "complete accuracy " + fmt("%.3f", acc->mean) + fmt(" +- %.3f", acc->sd) + ", AUROC " +
                      fmt("%.3f", auc->mean) + fmt(" +- %.3f", auc->sd) + "; most-popular AUROC " +
                      fmt("%.3f", pop->mean) + fmt(" +- %.3f", pop->sd)};
}

Outcome uci_masked(const Uci& uci) {
    constexpr int seeds = 5;
    double gain30 = 0.0, none30 = 0.0, gain50 = 0.0;
    int direction = 0;
    std::string per_seed;
    for (int s = 0; s < seeds; ++s) {
        RunConfig c = uci_config(static_cast<std::uint64_t>(s));
        c.methods = {Method::no_imputation, Method::average, Method::gain};
        c.proportions = {0.3, 0.5};
        const auto report = run_benchmark(uci.records, uci.schema, uci.labels, benchmark_config(c));
        if (report.has_errors()) return {false, "benchmark cells failed for seed " + std::to_string(s)};
        const double g30 = report.find(0.3, "gain", "auroc")->mean;
        const double n30 = report.find(0.3, "no_imputation", "auroc")->mean;
        const double g50 = report.find(0.5, "gain", "auroc")->mean;
        const double a50 = report.find(0.5, "average", "auroc")->mean;
        gain30 += g30 / seeds;
        none30 += n30 / seeds;
        gain50 += g50 / seeds;
        direction += g50 >= a50 ? 1 : 0;
        per_seed += "\n      seed " + std::to_string(s) + ": 30% gain " + fmt("%.3f", g30) + " no-imputation " +
                    fmt("%.3f", n30) + "; 50% gain " + fmt("%.3f", g50) + " average " + fmt("%.3f", a50);
    }
    const bool a = gain30 >= 0.64 && gain30 >= none30 - 0.02;
    const bool b = gain50 >= 0.64;
    const bool c = direction >= 3;
    return {a && b && c, "mean over seeds: 30% gain " + fmt("%.3f", gain30) + " vs no-imputation " +
                             fmt("%.3f", none30) + (a ? " ok" : " NOT MET") + "; 50% gain " + fmt("%.3f", gain50) +
                             (b ? " ok" : " NOT MET") + "; gain >= average at 50% in " + std::to_string(direction) +
                             "/5 seeds" + (c ? " ok" : " NOT MET") + per_seed};
}

Outcome loss_shapes() {
    constexpr int seeds = 5;
    int hard_ok = 0, fuzzy_ok = 0;
    std::string per_seed;
    for (int s = 0; s < seeds; ++s) {
        const auto seed = static_cast<std::uint64_t>(s);
        const auto corpus = make_dependent_corpus(1000, 15, derive_seed(seed, "synthetic"), 0.2);
        RunConfig c;
        c.seed = seed;
        c.epochs = 200;
        const LossCurves curves = loss_curves(corpus.records, corpus.schema, 0.2, gain_config(c), seed);
        if (curves.fuzzy.epochs() < 200 || curves.hard.epochs() < 200) {
            return {false, "a run diverged: " + curves.fuzzy_error + curves.hard_error};
        }
        const auto& h = curves.hard;
        const auto& f = curves.fuzzy;
        const bool hard = h.loss_g[199] > h.loss_g[4] && h.loss_d[199] < h.loss_d[4];
        const bool fuzzy = f.loss_g[199] < f.loss_g[4];
        hard_ok += hard ? 1 : 0;
        fuzzy_ok += fuzzy ? 1 : 0;
        per_seed += "\n      seed " + std::to_string(s) + ": hard G " + fmt("%.3f", h.loss_g[4]) + " -> " +
                    fmt("%.3f", h.loss_g[199]) + ", D " + fmt("%.3f", h.loss_d[4]) + " -> " +
                    fmt("%.3f", h.loss_d[199]) + "; fuzzy G " + fmt("%.3f", f.loss_g[4]) + " -> " +
                    fmt("%.3f", f.loss_g[199]) + ", D " + fmt("%.3f", f.loss_d[4]) + " -> " + fmt("%.3f", f.loss_d[199]);
    }
    return {hard_ok >= 4 && fuzzy_ok >= 4, "hard-coding shape in " + std::to_string(hard_ok) +
                                               "/5 seeds, fuzzy-coding shape in " + std::to_string(fuzzy_ok) +
                                               "/5 seeds" + per_seed};
}

Outcome protocol_integrity(const Uci& uci) {
    // Audit every method. Short training keeps this fast; the audit compares
    // fitted parameters, which does not depend on how long training runs.
    RunConfig c = uci_config(0);
    c.methods = {Method::complete, Method::most_popular, Method::random, Method::no_imputation,
                 Method::average,  Method::svd,          Method::autoencoder, Method::gain};
    c.epochs = 30;
    c.ae_epochs = 30;
    c.imputations = 5;
    std::string failed;
    for (const auto& r : audit_leakage(uci.records, uci.schema, uci.labels, benchmark_config(c), 0.3)) {
        if (!r.passed) failed += " " + std::string(to_string(r.method)) + " (" + r.detail + ")";
    }

    // Manifest replay: settings -> manifest text -> parsed settings -> identical report.
    c.command = "benchmark";
    c.proportions = {0.3};
    const RunConfig replayed = parse_config(manifest_text(c));
    std::ostringstream first, second;
    write_report_csv(first, run_benchmark(uci.records, uci.schema, uci.labels, benchmark_config(c)));
    write_report_csv(second, run_benchmark(uci.records, uci.schema, uci.labels, benchmark_config(replayed)));
    const bool replay = manifest_text(replayed) == manifest_text(c) && first.str() == second.str();
    return {failed.empty() && replay, std::string("leakage audit ") + (failed.empty() ? "passed for all 8 methods" : "failed:" + failed) +
                                          "; manifest replay " + (replay ? "bit-identical" : "DIFFERS")};
}

Outcome property_suite() {
    std::vector<std::string> broken;

    // Pass-through: observed generator outputs equal the inputs.
    const FuzzyDataset data = mixed_dataset(200, 9, 0.3);
    for (std::uint64_t s = 0; s < 5; ++s) {
        GainConfig cfg;
        cfg.seed = s;
        const GainModel model = make_gain_model(data.schema, cfg);
        Rng rng(s);
        MatrixXd seeds(data.values.rows(), data.values.cols());
        for (Eigen::Index i = 0; i < seeds.rows(); ++i) {
            seeds.row(i) = sample_seeds(data.mask.row(i).transpose(), model.seeds, rng).transpose();
        }
        const GeneratorOutput out = generator_forward(model, data.values, data.mask, seeds);
        if (!((data.mask.array() == 1.0).select(data.values, out.combined).array() == out.combined.array()).all()) {
            broken.push_back("pass-through");
            break;
        }
    }

    // Hint exactness: round(rate * p) whole blocks neutralized.
    std::vector<FeatureSpec> specs;
    for (std::size_t j = 0; j < 10; ++j) specs.push_back({"f" + std::to_string(j), FeatureKind::multiclass, 2 + j % 3, {}});
    const FeatureSchema schema(specs);
    Rng rng(10);
    bool hints_ok = true;
    for (const double rate : {0.0, 0.1, 0.25, 0.5, 1.0}) {
        for (int t = 0; t < 500; ++t) {
            VectorXd mu(10);
            for (Eigen::Index j = 0; j < 10; ++j) mu(j) = static_cast<double>(rng.index(2));
            const VectorXd m = build_masks(mu, schema);
            const Hint h = sample_hints(m, schema, rate, rng);
            hints_ok = hints_ok && h.neutralized.sum() == std::round(rate * 10);
            for (std::size_t j = 0; j < 10; ++j) {
                const auto block = h.values.segment(static_cast<Eigen::Index>(schema.offset(j)),
                                                    static_cast<Eigen::Index>(schema.width(j)));
                const double expected = h.neutralized(static_cast<Eigen::Index>(j)) == 1.0 ? 0.5 : mu(static_cast<Eigen::Index>(j));
                hints_ok = hints_ok && (block.array() == expected).all();
            }
        }
    }
    if (!hints_ok) broken.push_back("hint exactness");

    // Masking concentration: 10 000 cells at 0.3 land within 0.015.
    const auto corpus = make_dependent_corpus(1000, 10, 11);
    const auto coded = encode_dataset(corpus.records, corpus.schema, 1);
    double worst_fraction = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto masked = mask_dataset(coded, {0.3, derive_seed(s, "mask")});
        worst_fraction = std::max(worst_fraction, std::abs(1.0 - masked.dataset.feature_mask.mean() - 0.3));
    }
    if (worst_fraction > 0.015) broken.push_back("masking concentration");

    // AUROC against the brute-force pairwise count.
    bool auroc_ok = true;
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 2 + rng.index(50);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.index(9)) / 9.0;
            y[i] = static_cast<int>(rng.index(2));
        }
        y[0] = 0;
        y[1] = 1;
        double good = 0.0, pairs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (y[i] == 1 && y[j] == 0) {
                    pairs += 1.0;
                    good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
                }
            }
        }
        auroc_ok = auroc_ok && std::abs(auroc(s, y) - good / pairs) < 1e-12;
    }
    if (!auroc_ok) broken.push_back("AUROC oracle");

    std::string detail = "pass-through, hint exactness, masking concentration (worst deviation " +
                         fmt("%.4f", worst_fraction) + "), AUROC oracle";
    if (!broken.empty()) {
        detail += "; broken:";
        for (const auto& b : broken) detail += " " + b;
    }
    return {broken.empty(), detail};
}

}  // namespace

int main() {
    const Uci uci = load_uci();
    criterion(1, "codec exactness", 10, codec_exactness);
    criterion(2, "gradient suite", 30, gradient_suite);
    criterion(3, "loss oracles", 0, loss_oracles);
    criterion(4, "SVD correctness", 0, svd_correctness);
    criterion(5, "UCI complete-data reproduction", 60, [&] { return uci_complete(uci); });
    criterion(6, "UCI masked spot checks", 20 * 60, [&] { return uci_masked(uci); });
    criterion(7, "loss-curve shapes on the synthetic corpus", 15 * 60, loss_shapes);
    criterion(8, "protocol integrity", 0, [&] { return protocol_integrity(uci); });
    criterion(9, "property suite", 0, property_suite);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
