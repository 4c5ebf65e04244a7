#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace cgain {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LogisticModel {
    VectorXd weights;
    double intercept = 0.0;
    std::size_t iterations = 0;

    /// P(label = 1) per row.
    VectorXd predict_proba(const MatrixXd& features) const;
};

struct LogregOptions {
    double gradient_tolerance = 1e-6;
    std::size_t max_iterations = 10000;
};

/// Minimizes sum_i log-loss + ridge/2 * |w|^2 (intercept unpenalized) by
/// full-batch gradient descent: Barzilai-Borwein trial steps safeguarded by
/// Armijo backtracking. Throws NumericError if the gradient norm is still
/// above tolerance at the iteration cap.
LogisticModel fit_logreg_ridge(const MatrixXd& features, std::span<const int> labels, double ridge,
                               const LogregOptions& options = {});

}  // namespace cgain
