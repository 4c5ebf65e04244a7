#pragma once

// Synthetic categorical corpus with strong dependencies between features:
// every row belongs to one of a few latent clusters, and each feature takes
// its cluster's preferred category with probability 1 - noise, otherwise a
// uniform one. The binary label is the cluster's parity.

#include <cstdint>
#include <vector>

#include "cgain/codec.hpp"

namespace cgain {

struct SyntheticCorpus {
    FeatureSchema schema;
    std::vector<RawRecord> records;
    std::vector<int> labels;
};

/// Feature j is multiclass with 2 + j % 5 categories.
SyntheticCorpus make_dependent_corpus(std::size_t rows, std::size_t features, std::uint64_t seed,
                                      double noise = 0.2, std::size_t clusters = 4);

}  // namespace cgain
