#include "cgain/synthetic.hpp"

#include <string>

#include "cgain/error.hpp"
#include "cgain/random.hpp"

namespace cgain {

SyntheticCorpus make_dependent_corpus(std::size_t rows, std::size_t features, std::uint64_t seed, double noise,
                                      std::size_t clusters) {
    if (features == 0 || clusters == 0) throw Error("synthetic corpus needs at least one feature and cluster");
    if (!(noise >= 0.0 && noise <= 1.0)) throw Error("synthetic noise must lie in [0, 1]");

    std::vector<FeatureSpec> specs;
    for (std::size_t j = 0; j < features; ++j) {
        specs.push_back({"f" + std::to_string(j), FeatureKind::multiclass, 2 + j % 5, {}});
    }
    SyntheticCorpus corpus{FeatureSchema(std::move(specs)), {}, {}};

    Rng proto_rng(derive_seed(seed, "prototypes"));
    std::vector<std::vector<std::size_t>> prototype(clusters, std::vector<std::size_t>(features));
    for (auto& proto : prototype) {
        for (std::size_t j = 0; j < features; ++j) proto[j] = proto_rng.index(corpus.schema.feature(j).cardinality);
    }

    Rng rng(derive_seed(seed, "rows"));
    corpus.records.reserve(rows);
    corpus.labels.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t c = rng.index(clusters);
        RawRecord record(features);
        for (std::size_t j = 0; j < features; ++j) {
            const std::size_t q = corpus.schema.feature(j).cardinality;
            record[j] = rng.uniform() < noise ? rng.index(q) : prototype[c][j];
        }
        corpus.records.push_back(std::move(record));
        corpus.labels.push_back(static_cast<int>(c % 2));
    }
    return corpus;
}

}  // namespace cgain
