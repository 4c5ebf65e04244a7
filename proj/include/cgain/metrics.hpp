#pragma once

#include <span>
#include <vector>

namespace cgain {

/// Fraction of samples with I(score >= 0.5) == label.
double accuracy(std::span<const double> scores, std::span<const int> labels);

/// Area under the ROC curve as the Mann-Whitney statistic: the share of
/// (positive, negative) pairs ranked correctly, ties counting one half.
/// Throws Error when either class is absent.
double auroc(std::span<const double> scores, std::span<const int> labels);

double mean(std::span<const double> values);
/// Population standard deviation (divides by n).
double stddev(std::span<const double> values);

}  // namespace cgain
