#include "cgain/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cgain/error.hpp"

namespace cgain {
namespace {

// Fills zero columns of `u` (left by zero singular values) with unit
// vectors orthogonal to every other column.
void complete_basis(MatrixXd& u, const VectorXd& s) {
    const Eigen::Index m = u.rows();
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        if (s(c) > 0.0) continue;
        for (Eigen::Index e = 0; e < m; ++e) {
            VectorXd candidate = VectorXd::Unit(m, e);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index o = 0; o < u.cols(); ++o) {
                    if (o == c || (s(o) <= 0.0 && o > c)) continue;
                    candidate -= u.col(o).dot(candidate) * u.col(o);
                }
            }
            const double norm = candidate.norm();
            if (norm > 1e-6) {
                u.col(c) = candidate / norm;
                break;
            }
        }
    }
}

Svd jacobi_tall(const MatrixXd& a, double tolerance, std::size_t max_sweeps) {
    const Eigen::Index n = a.cols();
    if (tolerance <= 0.0) {
        tolerance = std::sqrt(static_cast<double>(a.rows())) * std::numeric_limits<double>::epsilon();
    }
    MatrixXd work = a;
    MatrixXd v = MatrixXd::Identity(n, n);

    std::size_t sweep = 0;
    for (;; ++sweep) {
        if (sweep == max_sweeps) throw NumericError("Jacobi SVD did not converge", max_sweeps);
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = work.col(p).squaredNorm();
                const double beta = work.col(q).squaredNorm();
                const double gamma = work.col(p).dot(work.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= tolerance * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index r = 0; r < work.rows(); ++r) {
                    const double wp = work(r, p);
                    const double wq = work(r, q);
                    work(r, p) = c * wp - s * wq;
                    work(r, q) = s * wp + c * wq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vp = v(r, p);
                    const double vq = v(r, q);
                    v(r, p) = c * vp - s * vq;
                    v(r, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    VectorXd norms(n);
    for (Eigen::Index c = 0; c < n; ++c) norms(c) = work.col(c).norm();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

    Svd out{MatrixXd::Zero(a.rows(), n), VectorXd(n), MatrixXd(n, n)};
    const double largest = norms.size() ? norms.maxCoeff() : 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index c = order[static_cast<std::size_t>(k)];
        double sigma = norms(c);
        // Columns that collapsed to rounding noise carry no direction.
        if (sigma <= largest * 1e-15 * static_cast<double>(std::max(a.rows(), n))) sigma = 0.0;
        out.singular_values(k) = sigma;
        out.v.col(k) = v.col(c);
        if (sigma > 0.0) out.u.col(k) = work.col(c) / sigma;
    }
    complete_basis(out.u, out.singular_values);
    return out;
}

}  // namespace

Svd jacobi_svd(const MatrixXd& a, double tolerance, std::size_t max_sweeps) {
    if (a.rows() >= a.cols()) return jacobi_tall(a, tolerance, max_sweeps);
    Svd t = jacobi_tall(a.transpose(), tolerance, max_sweeps);
    return Svd{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

MatrixXd pseudo_inverse(const MatrixXd& a, double relative_cutoff) {
    const Svd svd = jacobi_svd(a);
    const double largest = svd.singular_values.size() ? svd.singular_values.maxCoeff() : 0.0;
    VectorXd inv = VectorXd::Zero(svd.singular_values.size());
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
        if (svd.singular_values(k) > relative_cutoff * largest) inv(k) = 1.0 / svd.singular_values(k);
    }
    return svd.v * inv.asDiagonal() * svd.u.transpose();
}

}  // namespace cgain
