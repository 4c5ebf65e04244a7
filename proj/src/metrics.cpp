#include "cgain/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgain/error.hpp"

namespace cgain {

double accuracy(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty()) throw Error("accuracy: need equal, non-empty inputs");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) hits += (scores[i] >= 0.5 ? 1 : 0) == labels[i];
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw Error("auroc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mid-ranks (1-based) over tie groups.
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && scores[order[end]] == scores[order[start]]) ++end;
        const double mid_rank = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) {
            if (labels[order[k]] == 1) {
                positive_rank_sum += mid_rank;
                ++positives;
            }
        }
        start = end;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw Error("auroc: undefined when only one class is present");
    const double np = static_cast<double>(positives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    // Equal values give exactly 0 even when the mean does not round-trip.
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace cgain
