#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace cgain {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thin singular value decomposition A = U diag(s) V^T with k = min(m, n):
/// U is m x k, s has k non-increasing entries, V is n x k.
struct Svd {
    MatrixXd u;
    VectorXd singular_values;
    MatrixXd v;
};

/// One-sided (Hestenes) Jacobi SVD. Sweeps until every column pair is
/// orthogonal to `tolerance` relative to the column norms; throws
/// NumericError after `max_sweeps` sweeps without convergence. A tolerance
/// of 0 means sqrt(rows) * machine epsilon.
Svd jacobi_svd(const MatrixXd& a, double tolerance = 0.0, std::size_t max_sweeps = 100);

/// Moore-Penrose pseudo-inverse through jacobi_svd; singular values below
/// `relative_cutoff * max singular value` are treated as zero.
MatrixXd pseudo_inverse(const MatrixXd& a, double relative_cutoff = 1e-10);

}  // namespace cgain
